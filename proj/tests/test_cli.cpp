#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "subreg/cli.hpp"

using namespace subreg;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        dir_ = fs::temp_directory_path() /
               ("subreg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string file(const std::string& name, const std::string& content)
    {
        const auto path = dir_ / name;
        std::ofstream(path) << content;
        return path.string();
    }

    std::string out(const std::string& sub) const { return (dir_ / sub).string(); }

    int run(std::vector<std::string> args)
    {
        args.insert(args.begin(), "subreg");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        stdout_.str("");
        stderr_.str("");
        return cli::run(static_cast<int>(argv.size()), argv.data(), stdout_, stderr_);
    }

    static std::string slurp(const fs::path& p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    fs::path dir_;
    std::ostringstream stdout_, stderr_;
};

} // namespace

TEST(Io, FormatAndParseNumbers)
{
    EXPECT_EQ(io::format_number(0.25), "0.25");
    EXPECT_EQ(io::format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
    double x = 0;
    EXPECT_TRUE(io::parse_number("1e-3", x));
    EXPECT_EQ(x, 1e-3);
    EXPECT_FALSE(io::parse_number("abc", x));
    const double y = 0.1 + 0.2;
    ASSERT_TRUE(io::parse_number(io::format_number(y), x));
    EXPECT_EQ(x, y);
}

TEST(Io, CsvRoundTrip)
{
    io::CsvTable t;
    t.header = {"a", "b"};
    t.add_row({"1", "x,y"});
    t.add_row({"2.5", "z"});
    std::stringstream ss;
    io::write_csv(ss, t);
    const auto back = io::read_csv(ss);
    EXPECT_EQ(back.header, t.header);
    EXPECT_EQ(back.rows, t.rows);
    EXPECT_EQ(back.number(1, "a"), 2.5);
    EXPECT_THROW(back.column("c"), io_error);
}

TEST(Io, SvgIsWellFormed)
{
    std::ostringstream os;
    io::write_svg(os, {{"a<b", {1, 2, 3}, {1, 10, 100}}}, {"t", "x", "y", true});
    const auto s = os.str();
    EXPECT_NE(s.find("<svg"), std::string::npos);
    EXPECT_NE(s.find("a&lt;b"), std::string::npos);
    EXPECT_NE(s.find("</svg>"), std::string::npos);
}

TEST_F(CliTest, ReadersAcceptHeadersAndComments)
{
    const auto z = io::read_signal(file("z.csv", "z\n1\n-2.5\n"));
    EXPECT_EQ(z.size(), 2);
    EXPECT_EQ(z[1], -2.5);
    const auto g = io::read_graph(file("g.txt", "# chain\n1 2 0.5\n2 3\n"));
    EXPECT_EQ(g.size(), 3u);
    EXPECT_DOUBLE_EQ(g.cut(SubsetMask::from_indices(3, {0})), 0.5);
    EXPECT_THROW(io::read_graph(file("bad.txt", "0 1\n")), std::exception);
    EXPECT_THROW(io::read_signal(file("empty.csv", "")), std::exception);
}

TEST_F(CliTest, OutputSetRollsBackWithoutCommit)
{
    {
        io::OutputSet o(dir_ / "o");
        o.add("a.csv", [](std::ostream& os) { os << "x\n"; });
    }
    EXPECT_FALSE(fs::exists(dir_ / "o" / "a.csv"));
    EXPECT_FALSE(fs::exists(dir_ / "o" / "a.csv.tmp"));
    io::OutputSet o(dir_ / "o");
    o.add("a.csv", [](std::ostream& os) { os << "x\n"; });
    o.commit();
    EXPECT_EQ(slurp(dir_ / "o" / "a.csv"), "x\n");
}

TEST_F(CliTest, ProxWritesSolution)
{
    const auto z = file("z.csv", "1\n0\n");
    ASSERT_EQ(run({"prox", "--family", "chain-tv", "--signal", z, "--lambda", "0.25", "--out", out("r")}), 0)
        << stderr_.str();
    const auto w = io::read_csv(fs::path(out("r")) / "w.csv");
    EXPECT_NEAR(w.number(0, "w"), 0.75, 1e-12);
    EXPECT_NEAR(w.number(1, "w"), 0.25, 1e-12);
    EXPECT_TRUE(fs::exists(fs::path(out("r")) / "lattice.csv"));
}

TEST_F(CliTest, EvalConstantIsZero)
{
    const auto h = file("h.csv", "0\n2\n2\n0\n");
    const auto w = file("w.csv", "1.5\n1.5\n1.5\n");
    ASSERT_EQ(run({"eval", "--family", "cardinality", "--profile", h, "--w", w}), 0) << stderr_.str();
    EXPECT_NE(stdout_.str().find("f(w) = 0"), std::string::npos) << stdout_.str();
}

TEST_F(CliTest, PathSingleBreakpoint)
{
    const auto z = file("z.csv", "1\n0\n");
    ASSERT_EQ(run({"path", "--family", "chain-tv", "--signal", z, "--out", out("p")}), 0) << stderr_.str();
    const auto b = io::read_csv(fs::path(out("p")) / "breakpoints.csv");
    ASSERT_EQ(b.rows.size(), 1u);
    EXPECT_NEAR(b.number(0, "lambda"), 0.5, 1e-12);
}

TEST_F(CliTest, RecoverGridHasOneRowPerSigma)
{
    ASSERT_EQ(run({"recover", "--family", "chain-tv", "--truth-lengths", "5,5", "--truth-values", "1,0", "--sigma",
                   "0.1,0.2,0.3", "--lambda", "0.5", "--trials", "20", "--out", out("rec")}),
              0)
        << stderr_.str();
    const auto t = io::read_csv(fs::path(out("rec")) / "recover.csv");
    EXPECT_EQ(t.rows.size(), 3u);
}

TEST_F(CliTest, ReRunIsByteIdentical)
{
    const std::vector<std::string> args{"recover", "--family", "chain-tv", "--truth-lengths", "4,4,4", "--truth-values",
                                        "1,0,2", "--sigma", "0.2", "--lambda", "0.4", "--trials", "30", "--seed", "5"};
    auto a = args, b = args;
    a.insert(a.end(), {"--out", out("a")});
    b.insert(b.end(), {"--out", out("b")});
    ASSERT_EQ(run(a), 0) << stderr_.str();
    ASSERT_EQ(run(b), 0) << stderr_.str();
    std::vector<std::string> names;
    for (const auto& e : fs::directory_iterator(out("a"))) names.push_back(e.path().filename().string());
    ASSERT_FALSE(names.empty());
    for (const auto& n : names) EXPECT_EQ(slurp(fs::path(out("a")) / n), slurp(fs::path(out("b")) / n)) << n;
}

TEST_F(CliTest, ConfigFileAndOverrides)
{
    const auto z = file("z.csv", "1\n0\n");
    const auto cfg = file("c.json", R"({"family": "chain-tv", "signal": ")" + z + R"(", "lambda": 0.75})");
    ASSERT_EQ(run({"prox", "--config", cfg, "--out", out("c1")}), 0) << stderr_.str();
    EXPECT_NEAR(io::read_csv(fs::path(out("c1")) / "w.csv").number(0, "w"), 0.5, 1e-12);
    ASSERT_EQ(run({"prox", "--config", cfg, "--lambda", "0.25", "--out", out("c2")}), 0) << stderr_.str();
    EXPECT_NEAR(io::read_csv(fs::path(out("c2")) / "w.csv").number(0, "w"), 0.75, 1e-12);
    const auto bad = file("bad.json", R"({"family": "chain-tv", "bogus": 1})");
    EXPECT_EQ(run({"prox", "--config", bad, "--signal", z, "--lambda", "1", "--out", out("c3")}), 1);
}

TEST_F(CliTest, UsageErrorsExitWithOneAndWriteNothing)
{
    const auto z = file("z.csv", "1\n0\n");
    EXPECT_EQ(run({"prox", "--family", "chain-tv", "--signal", (dir_ / "missing.csv").string(), "--lambda", "1",
                   "--out", out("m")}),
              1);
    EXPECT_FALSE(fs::exists(fs::path(out("m")) / "w.csv"));
    EXPECT_EQ(run({"prox", "--family", "chain-tv", "--signal", z, "--lambda", "-1", "--out", out("n")}), 1);
    EXPECT_EQ(run({"prox", "--family", "nonsense", "--signal", z, "--lambda", "1"}), 1);
    EXPECT_EQ(run({}), 1);
    EXPECT_EQ(run({"--help"}), 0);
}

TEST_F(CliTest, SolveWritesTraceAndPlot)
{
    const auto z = file("z.csv", "1\n0\n2\n2\n");
    ASSERT_EQ(run({"solve", "--family", "chain-tv", "--signal", z, "--lambda", "0.3", "--max-iters", "50", "--out",
                   out("s"), "--plot"}),
              0)
        << stderr_.str();
    EXPECT_TRUE(fs::exists(fs::path(out("s")) / "trace.csv"));
    EXPECT_TRUE(fs::exists(fs::path(out("s")) / "trace.svg"));
    EXPECT_EQ(io::read_csv(fs::path(out("s")) / "w.csv").rows.size(), 4u);
}

TEST_F(CliTest, BenchWritesCsvAndSvg)
{
    ASSERT_EQ(run({"bench", "--p", "30", "--n", "20", "--time-budget-ms", "20", "--out", out("b")}), 0)
        << stderr_.str();
    const auto t = io::read_csv(fs::path(out("b")) / "bench.csv");
    EXPECT_EQ(t.header, (std::vector<std::string>{"method", "iter", "wall_time_ms", "objective", "gap"}));
    EXPECT_TRUE(fs::exists(fs::path(out("b")) / "bench.svg"));
}
