// fracsr command-line driver: solve, validate, trajectory.
#include <CLI11.hpp>
#include <json.hpp>
#include <omp.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "fracsr/csv.hpp"
#include "fracsr/errors.hpp"
#include "fracsr/mc_solver.hpp"
#include "fracsr/paths.hpp"
#include "fracsr/scenario_io.hpp"
#include "fracsr/spectral.hpp"
#include "fracsr/validation.hpp"

#ifndef FRACSR_VERSION
#define FRACSR_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fracsr;

namespace {

// Exit codes.
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kRunError = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    double a = 0.0, b = 0.0;
    int n = 0;
    std::string text;
    std::vector<double> points() const {
        std::vector<double> v(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
        return v;
    }
};

GridSpec parse_grid(const std::string& text, const char* flag) {
    GridSpec g;
    g.text = text;
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError(std::string(flag) + " expects a:b:n, got '" + text + "'");
    try {
        std::size_t used = 0;
        g.a = std::stod(parts[0], &used);
        if (used != parts[0].size()) throw std::invalid_argument("a");
        g.b = std::stod(parts[1], &used);
        if (used != parts[1].size()) throw std::invalid_argument("b");
        const long n = std::stol(parts[2], &used);
        if (used != parts[2].size()) throw std::invalid_argument("n");
        g.n = static_cast<int>(n);
    } catch (const std::logic_error&) {
        throw UsageError(std::string(flag) + ": cannot parse '" + text + "' as a:b:n");
    }
    if (g.n < 1) throw UsageError(std::string(flag) + ": empty grid (n = " + std::to_string(g.n) + ")");
    if (!std::isfinite(g.a) || !std::isfinite(g.b)) throw UsageError(std::string(flag) + ": bounds must be finite");
    if (g.n > 1 && !(g.b > g.a)) throw UsageError(std::string(flag) + ": need a < b when n > 1");
    return g;
}

std::string utc_now() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

// Written on every exit path, success or not.
class Manifest {
public:
    Manifest(std::string command, int argc, char** argv) : start_(std::chrono::steady_clock::now()) {
        j_["command"] = std::move(command);
        json args = json::array();
        for (int i = 0; i < argc; ++i) args.push_back(argv[i]);
        j_["argv"] = args;
        j_["code_version"] = FRACSR_VERSION;
        j_["outputs"] = json::array();
        j_["started_utc"] = utc_now();
    }
    json& operator[](const char* k) { return j_[k]; }
    void output(const std::string& path) { j_["outputs"].push_back(path); }
    void fail(const std::string& msg) { j_["errors"].push_back(msg); }

    void write(const std::string& path, int exit_code) {
        j_["exit_code"] = exit_code;
        j_["status"] = exit_code == kOk ? "ok" : "failed";
        j_["wall_clock_s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::ofstream out(path);
        if (!out) {
            std::cerr << "error: cannot write manifest '" << path << "'\n";
            return;
        }
        out << j_.dump(2) << '\n';
    }

private:
    json j_;
    std::chrono::steady_clock::time_point start_;
};

// x-grid points: first coordinate swept, the rest at the domain center.
std::vector<Point> grid_points(const DomainShape& d, const std::vector<double>& xs) {
    const Point center = domain_center(d);
    std::vector<Point> out;
    for (double x : xs) {
        Point p = center;
        p[0] = x;
        out.push_back(p);
    }
    return out;
}

json mc_echo(const McConfig& c) {
    return json{{"n_samples", c.n_samples}, {"seed", c.seed},     {"h", c.path.h},
                {"max_steps", c.path.max_steps}, {"mode", mc::mode_name(c.mode)}, {"workers", c.workers}};
}

json spectral_echo(const SpectralConfig& c) {
    return json{{"n_modes", c.n_modes},
                {"time_quad_nodes", c.time_quad_nodes},
                {"space_quad_nodes", c.space_quad_nodes},
                {"tail_tol", c.tail_tol}};
}

struct SolveArgs {
    std::string scenario, backend = "mc", t_grid, x_grid, out = "out";
    int workers = 1;
    std::int64_t seed = -1;
    std::int64_t samples = -1;
};

int cmd_solve(const SolveArgs& a, Manifest& m) {
    fs::create_directories(a.out);
    Scenario s = load_scenario(a.scenario);
    if (a.seed >= 0) s.mc.seed = static_cast<std::uint64_t>(a.seed);
    if (a.samples > 0) s.mc.n_samples = a.samples;
    s.mc.workers = a.workers;
    const GridSpec tg = parse_grid(a.t_grid, "--t-grid");
    const GridSpec xg = parse_grid(a.x_grid, "--x-grid");
    const bool pre = s.phi_past.has_value();

    m["scenario_file"] = a.scenario;
    m["scenario_hash"] = scenario_hash(s);
    m["seed"] = s.mc.seed;
    m["config"] = json{{"backend", a.backend},
                       {"t_grid", tg.text},
                       {"x_grid", xg.text},
                       {"workers", a.workers},
                       {"problem", pre ? "pre" : "post"},
                       {"scenario", scenario_to_json(s)},
                       {"mc", mc_echo(s.mc)},
                       {"spectral", spectral_echo(s.spectral)}};

    const auto diags = validate_scenario(s);
    if (!diags.empty()) {
        for (const auto& d : diags) m.fail("scenario: " + d);
        throw PreconditionError("scenario failed validation (" + std::to_string(diags.size()) + " problems)");
    }

    const auto ts = tg.points();
    const auto xs = xg.points();
    const int dim = domain_dim(s.domain);
    const bool want_mc = a.backend == "mc" || a.backend == "both";
    const bool want_sp = a.backend == "spectral" || a.backend == "both";
    int rc = kOk;

    spectral::SolutionTable table;
    if (want_sp) {
        table = spectral::solve_spectral(s, ts, xs, s.spectral, pre ? spectral::Problem::Pre : spectral::Problem::Post);
        const std::string path = (fs::path(a.out) / "spectral.csv").string();
        spectral::write_solution_csv(path, table);
        m.output(path);
        m["spectral_max_tail"] = table.max_tail;
        if (!table.tail_within_tol) {
            m.fail("spectral tail bound " + csv::num(table.max_tail) + " exceeds tail_tol");
            rc = kCheckFailed;
        }
    }
    std::vector<mc::NodeResult> nodes;
    if (want_mc) {
        nodes = mc::sweep_grid(s, ts, grid_points(s.domain, xs), s.mc, pre ? mc::Estimator::Pre : mc::Estimator::Post);
        const std::string path = (fs::path(a.out) / "mc.csv").string();
        mc::write_results_csv(path, nodes, dim);
        m.output(path);
        json bias = json::array();
        for (const auto& n : nodes) {
            if (!n.error.empty()) {
                m.fail("node t=" + csv::num(n.t) + " x=" + csv::num(n.x[0]) + ": " + n.error);
                rc = kCheckFailed;
            }
            bias.push_back(json{{"t", n.t}, {"x", n.x[0]}, {"note", n.result.bias_note}});
        }
        m["mc_bias_notes"] = bias;
    }
    if (want_mc && want_sp) {
        const std::string path = (fs::path(a.out) / "comparison.csv").string();
        csv::Writer w(path);
        w.row({"t", "x", "mc_mean", "mc_std_error", "bias_margin", "spectral_u", "tail_bound", "difference",
               "tolerance", "verdict"});
        int failed = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const auto& n = nodes[i];
            const auto& row = table.rows[i];
            const double diff = n.result.mean - row.u;
            const double tol = n.result.tolerance() + row.tail_bound;
            const bool ok = n.error.empty() && std::fabs(diff) <= tol;
            failed += ok ? 0 : 1;
            w.row({csv::num(row.t), csv::num(row.x), csv::num(n.result.mean), csv::num(n.result.std_error),
                   csv::num(n.result.bias_margin), csv::num(row.u), csv::num(row.tail_bound), csv::num(diff),
                   csv::num(tol), ok ? "PASS" : "FAIL"});
        }
        m.output(path);
        m["comparison_verdict"] = failed == 0 ? "PASS" : "FAIL";
        std::cout << "comparison: " << (failed == 0 ? "PASS" : "FAIL") << " (" << nodes.size() - failed << "/"
                  << nodes.size() << " nodes within 3 SE + bias + tail)\n";
        if (failed) rc = kCheckFailed;
    }
    return rc;
}

struct ValidateArgs {
    std::string suite, out = "out";
    std::int64_t samples = 100'000;
    int workers = 1;
    std::uint64_t seed = 20240531;
    double h = 1e-3;
};

int cmd_validate(const ValidateArgs& a, Manifest& m) {
    fs::create_directories(a.out);
    validation::Budget b;
    b.samples = a.samples;
    b.seed = a.seed;
    b.workers = a.workers;
    b.h = a.h;
    m["seed"] = a.seed;
    m["config"] = json{{"suite", a.suite}, {"samples", a.samples}, {"workers", a.workers}, {"h", a.h}};
    std::vector<std::string> suites;
    if (a.suite == "all") {
        suites = validation::suite_names();
    } else {
        validation::suite_criteria(a.suite);   // throws on an unknown name
        suites = {a.suite};
    }
    int rc = kOk;
    json verdicts;
    for (const auto& name : suites) {
        const auto r = validation::run_suite(name, b);
        const std::string path = (fs::path(a.out) / ("validate_" + name + ".csv")).string();
        validation::write_suite_csv(path, r);
        m.output(path);
        for (const auto& c : r.checks) {
            std::cout << (c.pass ? "PASS " : "FAIL ") << c.criterion << "  " << c.name << "  measured=" << c.measured
                      << " expected=" << c.expected << " tol=" << c.tolerance << '\n';
        }
        std::cout << "suite " << name << ": " << (r.passed() ? "PASS" : "FAIL") << '\n';
        verdicts[name] = r.passed() ? "PASS" : "FAIL";
        if (!r.passed()) rc = kCheckFailed;
    }
    m["verdicts"] = verdicts;
    return rc;
}

struct TrajectoryArgs {
    std::string scenario, t_grid, out = "trajectory.csv";
    std::int64_t seed = -1;
    double x = std::nan("");
};

int cmd_trajectory(const TrajectoryArgs& a, Manifest& m) {
    Scenario s = load_scenario(a.scenario);
    if (a.seed >= 0) s.mc.seed = static_cast<std::uint64_t>(a.seed);
    const GridSpec tg = parse_grid(a.t_grid, "--t-grid");
    const auto ts = tg.points();
    PathSpec p;
    p.alpha = s.alpha;
    p.beta = s.beta;
    p.domain = s.domain;
    p.t = ts.back();
    p.x = domain_center(s.domain);
    if (!std::isnan(a.x)) p.x[0] = a.x;
    m["scenario_file"] = a.scenario;
    m["scenario_hash"] = scenario_hash(s);
    m["seed"] = s.mc.seed;
    m["config"] = json{{"t_grid", tg.text}, {"x", p.x[0]}, {"scenario", scenario_to_json(s)}, {"mc", mc_echo(s.mc)}};
    PathConfig pc = s.mc.path;
    pc.record_trajectory = true;
    RngStream rng(s.mc.seed, mc::node_stream_id(s.mc.seed, p.t, p.x, 0x7452414a));
    const auto rows = record_trajectory(p, ts, pc, rng);
    fs::path out(a.out);
    if (out.has_parent_path()) fs::create_directories(out.parent_path());
    write_trajectory_csv(a.out, rows, domain_dim(s.domain));
    m.output(a.out);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fracsr: time-nonlocal fractional evolution solvers"};
    app.require_subcommand(1);
    app.set_version_flag("--version", FRACSR_VERSION);

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "solve a scenario on a (t, x) grid");
    solve->add_option("--scenario", sa.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    solve->add_option("--backend", sa.backend, "mc | spectral | both")
        ->check(CLI::IsMember({"mc", "spectral", "both"}))
        ->capture_default_str();
    solve->add_option("--t-grid", sa.t_grid, "a:b:n")->required();
    solve->add_option("--x-grid", sa.x_grid, "a:b:n (first coordinate)")->required();
    solve->add_option("--out", sa.out, "output directory")->capture_default_str();
    solve->add_option("--workers", sa.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    solve->add_option("--seed", sa.seed, "overrides the scenario seed")->check(CLI::NonNegativeNumber);
    solve->add_option("--samples", sa.samples, "overrides the scenario sample count")->check(CLI::PositiveNumber);

    ValidateArgs va;
    auto* validate = app.add_subcommand("validate", "run an acceptance suite");
    validate->add_option("--suite", va.suite, "identities | overshoot | specfun | residuals | representation | all")
        ->required();
    validate->add_option("--samples", va.samples, "Monte Carlo samples per estimate")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    validate->add_option("--out", va.out, "output directory")->capture_default_str();
    validate->add_option("--workers", va.workers, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    validate->add_option("--seed", va.seed, "seed")->capture_default_str();
    validate->add_option("--step", va.h, "operational-time step")->check(CLI::PositiveNumber)->capture_default_str();

    TrajectoryArgs ta;
    auto* traj = app.add_subcommand("trajectory", "record one path at increasing observation times");
    traj->add_option("--scenario", ta.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    traj->add_option("--t-grid", ta.t_grid, "a:b:n observation times")->required();
    traj->add_option("--out", ta.out, "trajectory CSV")->capture_default_str();
    traj->add_option("--seed", ta.seed, "overrides the scenario seed")->check(CLI::NonNegativeNumber);
    traj->add_option("--x", ta.x, "starting point (first coordinate; default domain center)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kOk : kUsage;
    }

    std::string manifest_path;
    std::string name;
    if (*solve) {
        name = "solve";
        manifest_path = (fs::path(sa.out) / "manifest.json").string();
    } else if (*validate) {
        name = "validate";
        manifest_path = (fs::path(va.out) / "manifest.json").string();
    } else {
        name = "trajectory";
        manifest_path = ta.out + ".manifest.json";
    }
    // Threads for the spectral grid loop; Monte Carlo takes its count from McConfig::workers.
    omp_set_num_threads(*solve ? sa.workers : *validate ? va.workers : 1);
    Manifest m(name, argc, argv);
    int rc = kOk;
    try {
        if (*solve) rc = cmd_solve(sa, m);
        else if (*validate) rc = cmd_validate(va, m);
        else rc = cmd_trajectory(ta, m);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        m.fail(e.what());
        rc = kUsage;
    } catch (const CapabilityError& e) {
        std::cerr << "capability error: " << e.what() << '\n';
        m.fail(e.what());
        rc = kRunError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        m.fail(e.what());
        rc = kRunError;
    }
    try {
        const fs::path mp(manifest_path);
        if (mp.has_parent_path()) fs::create_directories(mp.parent_path());
    } catch (const std::exception&) {
    }
    m.write(manifest_path, rc);
    return rc;
}
