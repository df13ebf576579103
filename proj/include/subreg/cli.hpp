#pragma once

// Command-line driver. Settings come from an optional JSON config
// (`--config`) and are overridden by flags of the same name. Each
// subcommand stages its files and commits them together, so a failure
// leaves no partial output. Exit codes: 0 ok, 1 usage or input error,
// 2 numerical failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "bench.hpp"
#include "io.hpp"
#include "path.hpp"
#include "prox.hpp"
#include "recovery.hpp"
#include "solver.hpp"

namespace subreg::cli {

using json = nlohmann::json;

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Kind { text, number, integer, list, flag };

struct OptionSpec {
    const char* name;
    Kind kind;
    const char* help;
};

inline const std::vector<OptionSpec>& option_specs()
{
    static const std::vector<OptionSpec> specs{
        {"family", Kind::text, "chain-tv | grid-tv | cut | cardinality | noisy-cut | table | symmetrized"},
        {"p", Kind::integer, "ground-set size (chain-tv, generated profiles, bench)"},
        {"width", Kind::integer, "grid width (grid-tv)"},
        {"height", Kind::integer, "grid height (grid-tv)"},
        {"graph", Kind::text, "edge list `i j weight`, 1-based (cut; hidden graph for noisy-cut)"},
        {"profile", Kind::text, "cardinality profile h(0..p), one value per line"},
        {"profile-kind", Kind::text, "generated profile: quadratic | range | single-kink"},
        {"penalty", Kind::number, "mismatch penalty of the noisy cut"},
        {"table", Kind::text, "2^p set values, one per line (table, symmetrized)"},
        {"signal", Kind::text, "single-column CSV signal z"},
        {"truth-lengths", Kind::list, "synthetic signal: block lengths along a chain"},
        {"truth-values", Kind::list, "synthetic signal: block values"},
        {"sigma", Kind::list, "noise level(s)"},
        {"lambda", Kind::list, "regularization weight (a grid for recover)"},
        {"w", Kind::text, "point at which eval computes f(w)"},
        {"design", Kind::text, "design matrix CSV (rows of numbers) for solve; default denoising"},
        {"solver", Kind::text, "fista | ista | subgradient-t | subgradient-sqrt"},
        {"engine", Kind::text, "prox engine: fast | decomposition | mnp"},
        {"max-iters", Kind::integer, "iteration cap"},
        {"tol", Kind::number, "relative objective-change tolerance (0 disables)"},
        {"time-budget-ms", Kind::number, "wall-clock budget in milliseconds"},
        {"experiment", Kind::text, "recover experiment: theorem | robust-tv"},
        {"trials", Kind::integer, "Monte-Carlo trials (replications for robust-tv)"},
        {"threads", Kind::integer, "worker threads (0 = hardware)"},
        {"seed", Kind::integer, "random seed"},
        {"jump", Kind::integer, "robust-tv: first index (1-based) of the high segment"},
        {"outlier-fraction", Kind::number, "robust-tv: fraction of outliers"},
        {"n", Kind::integer, "bench: number of observations"},
        {"correlation", Kind::number, "bench: correlation of neighbouring design columns"},
        {"noise", Kind::number, "bench: observation noise"},
        {"out", Kind::text, "output directory"},
        {"plot", Kind::flag, "also write SVG plots"},
    };
    return specs;
}

inline const OptionSpec* find_spec(const std::string& name)
{
    for (const auto& s : option_specs())
        if (name == s.name) return &s;
    return nullptr;
}

inline const std::map<std::string, std::vector<std::string>>& subcommand_options()
{
    static const std::vector<std::string> fn{"family", "p", "width", "height", "graph", "profile", "profile-kind",
                                             "penalty", "table"};
    static const std::vector<std::string> sig{"signal", "truth-lengths", "truth-values", "sigma", "seed"};
    auto join = [](std::vector<std::vector<std::string>> parts) {
        std::vector<std::string> r;
        for (auto& p : parts) r.insert(r.end(), p.begin(), p.end());
        return r;
    };
    static const std::map<std::string, std::vector<std::string>> m{
        {"eval", join({fn, {"w"}})},
        {"prox", join({fn, sig, {"lambda", "engine", "out"}})},
        {"solve", join({fn, sig, {"lambda", "design", "solver", "engine", "max-iters", "tol", "time-budget-ms", "out", "plot"}})},
        {"path", join({fn, sig, {"out"}})},
        {"recover", join({fn, {"truth-lengths", "truth-values", "sigma", "lambda", "engine", "experiment", "trials",
                               "threads", "seed", "jump", "outlier-fraction", "out", "plot"}})},
        {"bench", {"p", "n", "lambda", "correlation", "noise", "time-budget-ms", "seed", "out", "plot"}},
    };
    return m;
}

inline std::vector<double> parse_list(const std::string& name, const std::string& text)
{
    std::vector<double> r;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double x = 0.0;
        if (!io::parse_number(item, x)) throw usage_error("--" + name + ": `" + item + "` is not a number");
        r.push_back(x);
    }
    if (r.empty()) throw usage_error("--" + name + ": empty list");
    return r;
}

inline json flag_value(const OptionSpec& spec, const std::string& text)
{
    const std::string name = spec.name;
    double x = 0.0;
    switch (spec.kind) {
    case Kind::text: return text;
    case Kind::flag: return true;
    case Kind::list: {
        const auto v = parse_list(name, text);
        return v.size() == 1 ? json(v.front()) : json(v);
    }
    case Kind::number:
        if (!io::parse_number(text, x)) throw usage_error("--" + name + " expects a number");
        return x;
    case Kind::integer:
        if (!io::parse_number(text, x) || x < 0 || x != std::floor(x) || x > 9.0e15)
            throw usage_error("--" + name + " expects a non-negative integer");
        return static_cast<std::uint64_t>(x);
    }
    return nullptr;
}

/// Typed view of the merged settings.
class Settings {
public:
    explicit Settings(json j) : j_(std::move(j)) {}

    const json& raw() const { return j_; }
    bool has(const std::string& k) const { return j_.contains(k) && !j_[k].is_null(); }

    std::string text(const std::string& k, std::optional<std::string> def = std::nullopt) const
    {
        if (!has(k)) return require(k, def);
        if (!j_[k].is_string()) throw usage_error("setting `" + k + "` must be a string");
        return j_[k].get<std::string>();
    }
    double number(const std::string& k, std::optional<double> def = std::nullopt) const
    {
        if (!has(k)) return require(k, def);
        if (!j_[k].is_number()) throw usage_error("setting `" + k + "` must be a number");
        return j_[k].get<double>();
    }
    std::uint64_t integer(const std::string& k, std::optional<std::uint64_t> def = std::nullopt) const
    {
        if (!has(k)) return require(k, def);
        const auto& v = j_[k];
        if (v.is_number_unsigned()) return v.get<std::uint64_t>();
        if (v.is_number() && v.get<double>() >= 0 && v.get<double>() == std::floor(v.get<double>()))
            return static_cast<std::uint64_t>(v.get<double>());
        throw usage_error("setting `" + k + "` must be a non-negative integer");
    }
    std::vector<double> list(const std::string& k, std::optional<std::vector<double>> def = std::nullopt) const
    {
        if (!has(k)) return require(k, def);
        const auto& v = j_[k];
        if (v.is_number()) return {v.get<double>()};
        if (!v.is_array() || v.empty()) throw usage_error("setting `" + k + "` must be a number or a list of numbers");
        std::vector<double> r;
        for (const auto& e : v) {
            if (!e.is_number()) throw usage_error("setting `" + k + "` must contain numbers only");
            r.push_back(e.get<double>());
        }
        return r;
    }
    double scalar(const std::string& k, std::optional<double> def = std::nullopt) const
    {
        if (!has(k)) return require(k, def);
        const auto v = list(k);
        if (v.size() != 1) throw usage_error("setting `" + k + "` must be a single number here");
        return v.front();
    }
    bool flag(const std::string& k) const
    {
        if (!has(k)) return false;
        if (!j_[k].is_boolean()) throw usage_error("setting `" + k + "` must be true or false");
        return j_[k].get<bool>();
    }

private:
    template <class T>
    T require(const std::string& k, const std::optional<T>& def) const
    {
        if (!def) throw usage_error("missing required setting `" + k + "`");
        return *def;
    }
    json j_;
};

inline std::string config_hash(const json& cfg)
{
    std::uint64_t h = 1469598103934665603ULL; // FNV-1a
    for (unsigned char c : cfg.dump()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline std::vector<std::size_t> to_sizes(const std::string& k, const std::vector<double>& v)
{
    std::vector<std::size_t> r;
    for (double x : v) {
        if (!(x >= 1) || x != std::floor(x)) throw usage_error("setting `" + k + "` must hold positive integers");
        r.push_back(static_cast<std::size_t>(x));
    }
    return r;
}

inline std::optional<GroundTruth> synthetic_truth(const Settings& s)
{
    if (!s.has("truth-lengths") && !s.has("truth-values")) return std::nullopt;
    const auto lengths = to_sizes("truth-lengths", s.list("truth-lengths"));
    return GroundTruth::chain_blocks(lengths, s.list("truth-values"));
}

/// z from --signal, or w* + sigma * noise from the synthetic truth.
inline std::optional<Vector> load_signal(const Settings& s)
{
    if (s.has("signal")) return io::read_signal(s.text("signal"));
    const auto truth = synthetic_truth(s);
    if (!truth) return std::nullopt;
    const double sigma = s.scalar("sigma", 0.0);
    if (!(sigma >= 0.0)) throw usage_error("sigma must be non-negative");
    std::mt19937_64 rng(trial_seed(s.integer("seed", 1), 0));
    return Vector(truth->w() + sigma * gaussian_vector(truth->size(), rng));
}

/// `p_hint` (0 if unknown) sizes families whose size is not otherwise given.
inline SetFunction build_function(const Settings& s, std::size_t p_hint)
{
    const std::string family = s.text("family");
    auto size = [&]() -> std::size_t {
        const auto p = s.has("p") ? static_cast<std::size_t>(s.integer("p")) : p_hint;
        if (p == 0) throw usage_error("family " + family + " needs --p or a signal to fix the ground-set size");
        return p;
    };
    if (family == "chain-tv") return SetFunction::chain_tv(size());
    if (family == "grid-tv")
        return SetFunction::cut(WeightedGraph::grid(s.integer("width"), s.integer("height")));
    if (family == "cut") return SetFunction::cut(io::read_graph(s.text("graph"), s.has("p") ? s.integer("p") : p_hint));
    if (family == "cardinality") {
        if (s.has("profile")) return SetFunction::cardinality(io::read_profile(s.text("profile")));
        const auto kind = s.text("profile-kind", std::string("quadratic"));
        const auto p = size();
        if (kind == "quadratic") return SetFunction::cardinality(CardinalityProfile::quadratic(p));
        if (kind == "range") return SetFunction::cardinality(CardinalityProfile::range(p));
        if (kind == "single-kink") return SetFunction::cardinality(CardinalityProfile::single_kink(p));
        throw usage_error("unknown profile-kind " + kind);
    }
    if (family == "noisy-cut") {
        const double penalty = s.number("penalty", 1.0);
        auto g = s.has("graph") ? io::read_graph(s.text("graph"), s.has("p") ? s.integer("p") : p_hint)
                                : WeightedGraph::chain(size());
        return SetFunction::noisy_cut(NoisyCutSpec(std::move(g), penalty));
    }
    if (family == "table") return SetFunction::table(io::read_table(s.text("table")));
    if (family == "symmetrized") return SetFunction::symmetrized(io::read_table(s.text("table")));
    throw usage_error("unknown family " + family);
}

inline ProxEngine parse_engine(const std::string& e)
{
    if (e == "fast") return ProxEngine::fast;
    if (e == "decomposition") return ProxEngine::decomposition;
    if (e == "mnp") return ProxEngine::mnp;
    throw usage_error("unknown engine " + e);
}

inline void require_size(const SetFunction& f, const Vector& z)
{
    if (static_cast<std::size_t>(z.size()) != f.size())
        throw usage_error("signal has " + std::to_string(z.size()) + " entries but the set function has p = " +
                          std::to_string(f.size()));
}

inline double nonnegative_lambda(const Settings& s)
{
    const double l = s.scalar("lambda");
    if (!(l >= 0.0) || !std::isfinite(l)) throw usage_error("lambda must be finite and non-negative");
    return l;
}

inline void column_writer(std::ostream& os, const std::string& header, const Vector& v)
{
    os << header << '\n';
    for (double x : v) os << io::format_number(x) << '\n';
}

inline io::CsvTable lattice_table(const OrderedPartition& part, const Vector& w)
{
    io::CsvTable t{{"element", "block", "value"}, {}};
    std::vector<std::vector<std::string>> rows(part.ground_size());
    for (std::size_t b = 0; b < part.size(); ++b)
        for (int e : part.block(b))
            rows[static_cast<std::size_t>(e)] = {std::to_string(e + 1), std::to_string(b + 1), io::format_number(w[e])};
    for (auto& r : rows) t.add_row(std::move(r));
    return t;
}

inline void write_manifest(io::OutputSet& out, const std::string& command, const Settings& s, const json& extra)
{
    json m;
    json keyed = s.raw();
    keyed.erase("out"); // where results go does not change them
    m["command"] = command;
    m["settings"] = keyed;
    if (!extra.is_null()) m["results"] = extra;
    out.add("config-" + config_hash(keyed) + ".json", [&](std::ostream& os) { os << m.dump(2) << '\n'; });
}

inline io::OutputSet open_outputs(const Settings& s)
{
    return io::OutputSet(s.text("out", std::string(".")));
}

// --- subcommands ---------------------------------------------------------

inline void cmd_eval(const Settings& s, std::ostream& os)
{
    const Vector w = io::read_signal(s.text("w"));
    const auto f = build_function(s, static_cast<std::size_t>(w.size()));
    require_size(f, w);
    const auto g = greedy(f, w);
    os << "f(w) = " << io::format_number(g.s.dot(w)) << '\n' << "greedy dual s =";
    for (double x : g.s) os << ' ' << io::format_number(x);
    os << '\n';
}

inline void cmd_prox(const Settings& s, std::ostream& os)
{
    const auto z = load_signal(s);
    if (!z) throw usage_error("prox needs --signal or --truth-lengths/--truth-values");
    const auto f = build_function(s, static_cast<std::size_t>(z->size()));
    require_size(f, *z);
    const auto sol = prox(ProxProblem(f, *z, nonnegative_lambda(s)), parse_engine(s.text("engine", std::string("fast"))));
    auto out = open_outputs(s);
    out.add("w.csv", [&](std::ostream& o) { column_writer(o, "w", sol.w); });
    out.add("lattice.csv", [&](std::ostream& o) { io::write_csv(o, lattice_table(sol.lattice, sol.w)); });
    write_manifest(out, "prox", s, json{{"blocks", sol.lattice.size()}});
    out.commit();
    os << "prox: " << sol.lattice.size() << " constant sets, wrote w.csv and lattice.csv to " << out.dir().string()
       << '\n';
}

inline Matrix read_matrix(const std::filesystem::path& path)
{
    auto in = io::open_input(path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        line = io::strip_comment(line);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> r;
        for (const auto& cell : io::split_csv(line)) {
            double x = 0.0;
            if (!io::parse_number(cell, x)) throw io_error(path.string() + ": non-numeric design entry");
            r.push_back(x);
        }
        if (!rows.empty() && r.size() != rows.front().size()) throw io_error(path.string() + ": ragged design");
        rows.push_back(std::move(r));
    }
    if (rows.empty()) throw io_error(path.string() + ": empty design");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return m;
}

inline void cmd_solve(const Settings& s, std::ostream& os)
{
    const auto z = load_signal(s);
    if (!z) throw usage_error("solve needs --signal (the response when --design is given)");
    std::unique_ptr<SmoothLoss> loss;
    if (s.has("design")) {
        Matrix x = read_matrix(s.text("design"));
        if (x.rows() != z->size()) throw usage_error("design rows and response length differ");
        loss = std::make_unique<LeastSquaresLoss>(std::move(x), *z);
    } else {
        loss = std::make_unique<DenoisingLoss>(*z);
    }
    const auto f = build_function(s, loss->size());
    if (f.size() != loss->size()) throw usage_error("set function size differs from the number of unknowns");
    const double lambda = nonnegative_lambda(s);

    SolverConfig cfg;
    cfg.max_iters = s.integer("max-iters", 500);
    cfg.tol = s.number("tol", 0.0);
    cfg.time_budget_ms = s.number("time-budget-ms", 0.0);
    const auto solver = s.text("solver", std::string("fista"));
    SolverResult r;
    if (solver == "fista" || solver == "ista") {
        cfg.accelerated = solver == "fista";
        r = proximal_gradient(*loss, f, lambda, cfg, make_prox_operator(f, parse_engine(s.text("engine", std::string("fast")))));
    } else if (solver == "subgradient-t" || solver == "subgradient-sqrt") {
        cfg.schedule = solver == "subgradient-t" ? StepSchedule::inverse_t : StepSchedule::inverse_sqrt_t;
        r = subgradient_descent(*loss, f, lambda, cfg);
    } else {
        throw usage_error("unknown solver " + solver);
    }
    auto out = open_outputs(s);
    out.add("w.csv", [&](std::ostream& o) { column_writer(o, "w", r.w); });
    out.add("trace.csv", [&](std::ostream& o) {
        io::CsvTable t{{"iter", "objective", "gap", "wall_time_ms"}, {}};
        for (const auto& row : r.trace)
            t.add_row({std::to_string(row.iter), io::format_number(row.objective), io::format_number(row.gap),
                       io::format_number(row.wall_time_ms)});
        io::write_csv(o, t);
    });
    if (s.flag("plot"))
        out.add("trace.svg", [&](std::ostream& o) {
            io::PlotSeries ps{solver, {}, {}};
            for (const auto& row : r.trace) {
                ps.x.push_back(static_cast<double>(row.iter));
                ps.y.push_back(row.objective - r.trace.back().objective);
            }
            io::write_svg(o, {ps}, {"objective - final objective", "iteration", "objective gap", true});
        });
    json extra{{"objective", r.objective}, {"iterations", r.iterations}, {"converged", r.converged}};
    if (r.step_constant > 0.0) extra["step_constant"] = r.step_constant;
    write_manifest(out, "solve", s, extra);
    out.commit();
    os << "solve: " << solver << " objective " << io::format_number(r.objective) << " after " << r.iterations
       << " iterations\n";
}

inline void cmd_path(const Settings& s, std::ostream& os)
{
    const auto z = load_signal(s);
    if (!z) throw usage_error("path needs --signal or --truth-lengths/--truth-values");
    const auto f = build_function(s, static_cast<std::size_t>(z->size()));
    require_size(f, *z);
    const auto path = prox_path_agglomerative(f, *z);
    auto out = open_outputs(s);
    out.add("breakpoints.csv", [&](std::ostream& o) {
        o << "lambda\n";
        for (double b : path.breakpoints) o << io::format_number(b) << '\n';
    });
    out.add("merges.csv", [&](std::ostream& o) {
        // ids 1..p are the singletons {1}..{p}; merged blocks get p+1, p+2, ...
        io::CsvTable t{{"lambda", "upper", "lower", "merged"}, {}};
        for (const auto& m : path.merges)
            t.add_row({io::format_number(m.lambda), std::to_string(m.upper + 1), std::to_string(m.lower + 1),
                       std::to_string(m.merged + 1)});
        io::write_csv(o, t);
    });
    write_manifest(out, "path", s, json{{"breakpoints", path.breakpoints.size()}});
    out.commit();
    os << "path: " << path.breakpoints.size() << " breakpoints, " << path.merges.size() << " merges\n";
}

inline void cmd_recover(const Settings& s, std::ostream& os)
{
    const auto experiment = s.text("experiment", std::string("theorem"));
    io::CsvTable t{{"sigma", "lambda", "method", "error_mean", "error_std", "recovery_rate", "bound"}, {}};
    std::vector<io::PlotSeries> series;
    std::string x_label = "sigma", y_label;
    if (experiment == "theorem") {
        const auto truth = synthetic_truth(s);
        if (!truth) throw usage_error("recover needs --truth-lengths and --truth-values");
        const auto f = build_function(s, truth->size());
        if (f.size() != truth->size()) throw usage_error("set function size differs from the truth");
        const auto engine_name = s.text("engine", std::string("fast"));
        const auto engine = parse_engine(engine_name);
        const auto trials = static_cast<std::size_t>(s.integer("trials", 500));
        const auto threads = static_cast<unsigned>(s.integer("threads", 0));
        const auto seed = s.integer("seed", 1);
        t.header.insert(t.header.end(), {"bound_raw", "bound_clamped", "nu", "lambda_max", "eta_min", "successes", "trials"});
        y_label = "recovery rate";
        for (double lambda : s.list("lambda")) {
            io::PlotSeries emp{"empirical lambda=" + io::format_number(lambda), {}, {}};
            io::PlotSeries bnd{"bound lambda=" + io::format_number(lambda), {}, {}};
            for (double sigma : s.list("sigma")) {
                if (!(sigma >= 0.0) || !(lambda >= 0.0)) throw usage_error("sigma and lambda must be non-negative");
                const auto r = monte_carlo_recovery(f, *truth, sigma, lambda, trials, seed, engine, threads);
                double eta_min = std::numeric_limits<double>::infinity();
                for (double e : r.eta) eta_min = std::min(eta_min, e);
                // per-trial error is the indicator of a wrong lattice
                const double err = 1.0 - r.empirical;
                t.add_row({io::format_number(sigma), io::format_number(lambda), engine_name, io::format_number(err),
                           io::format_number(std::sqrt(err * (1.0 - err))), io::format_number(r.empirical),
                           io::format_number(r.bound.value), io::format_number(r.bound.raw),
                           r.bound.clamped ? "1" : "0", io::format_number(r.nu), io::format_number(r.lambda_max),
                           io::format_number(eta_min), std::to_string(r.successes), std::to_string(r.trials)});
                emp.x.push_back(sigma);
                emp.y.push_back(r.empirical);
                bnd.x.push_back(sigma);
                bnd.y.push_back(r.bound.value);
            }
            series.push_back(std::move(emp));
            series.push_back(std::move(bnd));
        }
    } else if (experiment == "robust-tv") {
        RobustTvConfig cfg;
        cfg.chain_length = s.integer("p", cfg.chain_length);
        if (s.has("jump")) cfg.jump_position = s.integer("jump") - 1;
        else cfg.jump_position = cfg.chain_length / 2;
        cfg.outlier_fraction = s.number("outlier-fraction", cfg.outlier_fraction);
        cfg.penalty = s.number("penalty", cfg.penalty);
        cfg.sigma_grid = s.list("sigma", cfg.sigma_grid);
        cfg.lambda_grid = s.list("lambda", cfg.lambda_grid);
        cfg.replications = s.integer("trials", cfg.replications);
        cfg.seed = s.integer("seed", cfg.seed);
        y_label = "level-set error";
        std::map<std::string, io::PlotSeries> by_method;
        for (const auto& row : robust_tv_experiment(cfg)) {
            t.add_row({io::format_number(row.sigma), io::format_number(row.best_lambda), row.method,
                       io::format_number(row.error_mean), io::format_number(row.error_std), "nan", "nan"});
            auto& ps = by_method[row.method];
            ps.name = row.method;
            ps.x.push_back(row.sigma);
            ps.y.push_back(row.error_mean);
        }
        for (auto& [k, v] : by_method) series.push_back(std::move(v));
    } else {
        throw usage_error("unknown experiment " + experiment);
    }
    auto out = open_outputs(s);
    out.add("recover.csv", [&](std::ostream& o) { io::write_csv(o, t); });
    if (s.flag("plot"))
        out.add("recover.svg", [&](std::ostream& o) { io::write_svg(o, series, {experiment, x_label, y_label, false}); });
    write_manifest(out, "recover", s, json{{"rows", t.rows.size()}});
    out.commit();
    os << "recover: " << t.rows.size() << " rows written to " << (out.dir() / "recover.csv").string() << '\n';
}

inline void cmd_bench(const Settings& s, std::ostream& os)
{
    BenchConfig cfg;
    cfg.p = s.integer("p", cfg.p);
    cfg.n = s.integer("n", cfg.n);
    cfg.lambda = s.scalar("lambda", cfg.lambda);
    cfg.correlation = s.number("correlation", cfg.correlation);
    cfg.noise = s.number("noise", cfg.noise);
    cfg.budget_ms = s.number("time-budget-ms", cfg.budget_ms);
    cfg.seed = s.integer("seed", cfg.seed);
    const auto results = run_bench(cfg);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : results) best = std::min(best, r.result.objective);

    io::CsvTable t{{"method", "iter", "wall_time_ms", "objective", "gap"}, {}};
    std::vector<io::PlotSeries> series;
    for (const auto& r : results) {
        io::PlotSeries ps{r.method, {}, {}};
        for (const auto& row : r.result.trace) {
            t.add_row({r.method, std::to_string(row.iter), io::format_number(row.wall_time_ms),
                       io::format_number(row.objective), io::format_number(row.objective - best)});
            ps.x.push_back(row.wall_time_ms / 1000.0);
            ps.y.push_back(row.objective - best);
        }
        series.push_back(std::move(ps));
    }
    auto out = open_outputs(s);
    out.add("bench.csv", [&](std::ostream& o) { io::write_csv(o, t); });
    out.add("bench.svg", [&](std::ostream& o) {
        io::write_svg(o, series, {"objective gap vs time", "wall time (s)", "objective - best", true});
    });
    json extra;
    for (const auto& r : results)
        extra[r.method] = {{"iterations", r.result.iterations}, {"objective", r.result.objective}};
    write_manifest(out, "bench", s, extra);
    out.commit();
    for (const auto& r : results)
        os << r.method << ": " << r.result.iterations << " iterations, objective "
           << io::format_number(r.result.objective) << '\n';
}

// --- entry point ---------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app{"Proximal methods and recovery experiments for Lovasz-extension regularizers", "subreg"};
    app.require_subcommand(1);
    std::string config_path;
    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, std::map<std::string, bool>> flags;
    std::map<std::string, CLI::App*> subs;
    static const std::map<std::string, std::string> descriptions{
        {"eval", "print f(w) and the greedy dual"},
        {"prox", "solve the proximal problem; writes w.csv, lattice.csv"},
        {"solve", "FISTA / ISTA / subgradient on a least-squares or denoising loss; writes w.csv, trace.csv"},
        {"path", "agglomerative regularization path; writes breakpoints.csv, merges.csv"},
        {"recover", "level-set recovery experiments; writes recover.csv"},
        {"bench", "objective vs wall time per method; writes bench.csv, bench.svg"},
    };
    for (const auto& [cmd, names] : subcommand_options()) {
        auto* sub = app.add_subcommand(cmd, descriptions.at(cmd));
        sub->add_option("--config", config_path, "JSON config; flags override its fields")->check(CLI::ExistingFile);
        for (const auto& n : names) {
            const auto* spec = find_spec(n);
            if (spec->kind == Kind::flag) sub->add_flag("--" + n, flags[cmd][n], spec->help);
            else sub->add_option("--" + n, values[cmd][n], spec->help);
        }
        subs[cmd] = sub;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : 1;
    }

    std::string cmd;
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) cmd = name;
    try {
        json cfg = json::object();
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            try {
                cfg = json::parse(in);
            } catch (const json::exception& e) {
                throw usage_error(config_path + ": " + e.what());
            }
            if (!cfg.is_object()) throw usage_error(config_path + ": config must be a JSON object");
            const auto& allowed = subcommand_options().at(cmd);
            for (const auto& [k, v] : cfg.items())
                if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
                    throw usage_error(config_path + ": `" + k + "` is not a setting of " + cmd);
        }
        auto* sub = subs.at(cmd);
        for (const auto& n : subcommand_options().at(cmd)) {
            if (sub->count("--" + n) == 0) continue;
            const auto* spec = find_spec(n);
            cfg[n] = spec->kind == Kind::flag ? json(true) : flag_value(*spec, values[cmd][n]);
        }
        const Settings s(cfg);
        if (cmd == "eval") cmd_eval(s, out);
        else if (cmd == "prox") cmd_prox(s, out);
        else if (cmd == "solve") cmd_solve(s, out);
        else if (cmd == "path") cmd_path(s, out);
        else if (cmd == "recover") cmd_recover(s, out);
        else if (cmd == "bench") cmd_bench(s, out);
        return 0;
    } catch (const numerical_error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

} // namespace subreg::cli
