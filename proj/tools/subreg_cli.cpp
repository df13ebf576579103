#include "subreg/cli.hpp"

int main(int argc, char** argv) { return subreg::cli::run(argc, argv); }
