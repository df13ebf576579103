// Denoise a noisy piecewise-constant signal with 1-D total variation and
// print the recovered constant sets.

#include <iostream>

#include "subreg/subreg.hpp"

int main()
{
    using namespace subreg;
    const auto truth = GroundTruth::chain_blocks({10, 10, 10, 10}, {1.0, 0.0, 3.0, 2.0});
    std::mt19937_64 rng(trial_seed(42, 0));
    const Vector z = truth.w() + 0.1 * gaussian_vector(truth.size(), rng);

    const auto f = SetFunction::chain_tv(truth.size());
    const double lambda = lambda_bound(f, truth, compute_nu(truth));
    const auto sol = prox(ProxProblem(f, z, lambda));

    std::cout << "lambda = " << lambda << ", f(w) = " << lovasz_extension(f, sol.w) << "\n";
    for (std::size_t j = 0; j < sol.lattice.size(); ++j) {
        const auto& block = sol.lattice.block(j);
        std::cout << "block " << j << ": " << block.size() << " elements, value " << sol.w[block.front()] << "\n";
    }
    std::cout << "level sets recovered: " << (same_lattice(truth.partition(), sol.lattice) ? "yes" : "no") << "\n";
}
