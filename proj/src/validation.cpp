#include "fracsr/validation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "fracsr/csv.hpp"
#include "fracsr/errors.hpp"
#include "fracsr/fracops.hpp"
#include "fracsr/mc_solver.hpp"
#include "fracsr/specfun.hpp"
#include "fracsr/spectral.hpp"
#include "fracsr/stats.hpp"

namespace fracsr::validation {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kBetas[] = {0.3, 0.5, 0.8};

bool verdict(Relation rel, double m, double e, double tol) {
    if (!std::isfinite(m)) return false;
    switch (rel) {
        case Relation::AbsDiff: return std::fabs(m - e) <= tol;
        case Relation::AtMost: return m <= tol;
        case Relation::AtLeast: return m >= e - tol;
        case Relation::True: return m != 0.0;
    }
    return false;
}

class Collector {
public:
    explicit Collector(SuiteResult& r) : r_(r) {}
    void add(const std::string& crit, std::string name, double measured, double expected, double tol,
             Relation rel = Relation::AbsDiff, std::string note = {}) {
        Check c;
        c.criterion = crit;
        c.name = std::move(name);
        c.measured = measured;
        c.expected = expected;
        c.tolerance = tol;
        c.relation = rel;
        c.pass = verdict(rel, measured, expected, tol);
        c.note = std::move(note);
        r_.checks.push_back(std::move(c));
    }

private:
    SuiteResult& r_;
};

std::string g4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

McConfig mc_config(const Budget& b, McMode mode = McMode::PathMode) {
    if (b.samples < 1) throw ParameterError("validation: samples must be >= 1");
    McConfig c;
    c.n_samples = b.samples;
    c.seed = b.seed;
    c.workers = b.workers;
    c.exec = ExecPolicy::OpenMP;
    c.mode = mode;
    c.path.h = b.h;
    return c;
}

std::uint64_t tag(const Budget& b, const std::string& what) {
    std::uint64_t h = 1469598103934665603ULL;   // FNV-1a
    for (unsigned char ch : what) h = (h ^ ch) * 1099511628211ULL;
    return mix_stream_id(b.seed, h);
}

Scenario interval_scenario(double beta) {
    Scenario s;
    s.alpha = 2.0;
    s.beta = beta;
    s.domain = Interval{0.0, kPi};
    s.T = 1.0;
    return s;
}

Field sine() { return Field(form::SineMode{1, 0.0, kPi}); }

// phi(r, x) = e^r sin x in the past, g = sin x.
Scenario memory_scenario() {
    Scenario s = interval_scenario(0.5);
    s.phi_past = Field(Product{timeform::Exp{1.0}, form::SineMode{1, 0.0, kPi}});
    s.phi0 = sine();
    s.g = sine();
    return s;
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1);
    return v;
}

// -------------------------------------------------------------------- identities

void c1_c2(Collector& out, const Budget& b) {
    const McConfig mc = mc_config(b, McMode::MarginalMode);
    for (double beta : kBetas) {
        const auto stream = tag(b, "tau0:" + g4(beta));
        const auto r = mc::estimate_tau0_functional(beta, 1.0, [](double s) { return s; }, mc, stream);
        out.add("C1", "E tau0(1), beta=" + g4(beta), r.mean, 1.0 / std::tgamma(1.0 + beta), 3.0 * r.std_error);
        for (double lambda : {0.5, 1.0, 5.0}) {
            const auto l = mc::estimate_tau0_functional(
                beta, 1.0, [lambda](double s) { return std::exp(-lambda * s); }, mc, stream);
            out.add("C2", "E exp(-" + g4(lambda) + " tau0(1)), beta=" + g4(beta), l.mean,
                    specfun::mittag_leffler(beta, -lambda), 3.0 * l.std_error);
        }
    }
}

void c5(Collector& out, const Budget& b) {
    const McConfig mc = mc_config(b);
    struct Named {
        const char* name;
        double (*f)(double);
    };
    const Named fs[] = {{"1", [](double) { return 1.0; }},
                        {"r", [](double r) { return r; }},
                        {"r^2", [](double r) { return r * r; }},
                        {"e^r", [](double r) { return std::exp(r); }}};
    const double lambdas[] = {1.0, 10.0};
    for (double beta : kBetas) {
        PathSpec p;
        p.alpha = 2.0;
        p.beta = beta;
        p.domain = FullSpace{1};
        p.t = 1.0;
        p.x = Point(0.0);
        p.track_space = false;
        std::vector<PathIntegrand> gs;
        for (const auto& f : fs) {
            for (double lambda : lambdas) {
                auto fn = f.f;
                gs.emplace_back([fn, lambda](double s, double r, const Point&) { return std::exp(-lambda * s) * fn(r); });
            }
        }
        const auto res = mc::estimate_path_functionals(p, gs, mc, tag(b, "phi:" + g4(beta)));
        std::size_t k = 0;
        for (const auto& f : fs) {
            for (double lambda : lambdas) {
                const auto& r = res[k++];
                const double exact = spectral::phi_kernel(beta, lambda, f.f, 1.0);
                out.add("C5", std::string("Phi f=") + f.name + " lambda=" + g4(lambda) + " beta=" + g4(beta), r.mean,
                        exact, r.tolerance(), Relation::AbsDiff, r.bias_note);
            }
        }
    }
}

// -------------------------------------------------------------------- overshoot

void c3(Collector& out, const Budget& b) {
    const McConfig marg = mc_config(b, McMode::MarginalMode);
    const McConfig path = mc_config(b);
    for (double beta : kBetas) {
        auto cdf = [beta](double w) { return overshoot_cdf(beta, 1.0, w); };
        const auto wm = mc::sample_overshoots(beta, 1.0, marg, tag(b, "W:" + g4(beta)));
        out.add("C3", "KS marginal W(1), beta=" + g4(beta), stats::ks_statistic(wm, cdf), 0.0, 0.01,
                Relation::AtMost);
        // Path-mode overshoots resolve W only down to h^{1/beta}; near beta = 1 the law still has
        // O(1) mass below that scale (KS about 0.09 at beta = 0.8, h = 1e-3), so the path check runs
        // at beta <= 0.5.
        if (beta > 0.5) continue;
        const auto wp = mc::sample_overshoots(beta, 1.0, path, tag(b, "Wpath:" + g4(beta)));
        out.add("C3", "KS path-mode W(1), beta=" + g4(beta), stats::ks_statistic(wp, cdf), 0.0, 0.03,
                Relation::AtMost, "h=" + g4(b.h));
    }
    const auto spot = mc::estimate_overshoot_functional(
        0.5, 1.0, [](double w) { return w <= 1.0 ? 1.0 : 0.0; }, marg, tag(b, "W:0.5"));
    out.add("C3", "P[W(1)<=1], beta=0.5", spot.mean, 2.0 / kPi * std::atan(1.0), 3.0 * spot.std_error);
}

void c4(Collector& out, const Budget& b) {
    const McConfig marg = mc_config(b, McMode::MarginalMode);
    for (double beta : kBetas) {
        for (double eps : {0.1, 0.2}) {
            for (double p : {0.04, 0.25}) {
                const double t = eps * std::pow(p, 1.0 / beta);
                const auto r = mc::estimate_overshoot_functional(
                    beta, t, [eps](double w) { return w <= eps ? 1.0 : 0.0; }, marg,
                    tag(b, "small-W:" + g4(beta) + ":" + g4(eps) + ":" + g4(p)));
                out.add("C4", "P[W(t)<=" + g4(eps) + "], p=" + g4(p) + " beta=" + g4(beta), r.mean, 1.0 - p,
                        3.0 * r.std_error, Relation::AtLeast, "t=" + g4(t));
            }
        }
    }
}

void c12(Collector& out, const Budget& b) {
    const Scenario s = memory_scenario();
    const McConfig mc = mc_config(b);
    const double x = kPi / 2;
    const double phi0 = s.phi_past->value(0.0, Point(x));
    double prev = std::numeric_limits<double>::infinity();
    bool decreasing = true;
    std::string trail;
    for (double t : {1e-1, 1e-2, 1e-3}) {
        const auto r = mc::estimate_u_pre(s, t, Point(x), mc);
        const double dev = std::fabs(r.mean - phi0);
        decreasing = decreasing && dev < prev;
        prev = dev;
        trail += (trail.empty() ? "" : " > ") + g4(dev);
        if (t == 1e-3) out.add("C12", "|u_pre(1e-3, pi/2) - phi(0, pi/2)|", dev, 0.0, 0.05, Relation::AtMost, r.bias_note);
    }
    out.add("C12", "deviation decreasing over t = 1e-1, 1e-2, 1e-3", decreasing ? 1.0 : 0.0, 1.0, 0.0, Relation::True,
            trail);
}

// -------------------------------------------------------------------- specfun

void c11(Collector& out, const Budget&) {
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = 0.05 * i;
        worst = std::max(worst, std::fabs(specfun::mittag_leffler(0.5, -x) - std::exp(x * x) * std::erfc(x)));
    }
    out.add("C11", "max |E_1/2(-x) - exp(x^2) erfc(x)|, x in [0,10]", worst, 0.0, 1e-10, Relation::AtMost);

    worst = 0.0;
    for (int i = 0; i <= 400; ++i) {
        const double x = 0.1 * i;
        worst = std::max(worst, std::fabs(specfun::mittag_leffler(1.0, -x) - std::exp(-x)));
    }
    out.add("C11", "max |E_1(-x) - exp(-x)|, x in [0,40]", worst, 0.0, 1e-12, Relation::AtMost);

    worst = 0.0;
    for (double w : {0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
        const double exact = std::exp(-1.0 / (4.0 * w)) / (2.0 * std::sqrt(kPi) * std::pow(w, 1.5));
        worst = std::max(worst, std::fabs(specfun::stable_density(0.5, 1.0, w) - exact));
    }
    out.add("C11", "max |p_1^{1/2}(w) - closed form|", worst, 0.0, 1e-8, Relation::AtMost);

    worst = 0.0;
    for (int i = 1; i < 100; ++i) {
        const double x = 0.01 * i - 0.5 + 0.003;   // avoids the integers
        const double lhs = specfun::gamma_fn(x) * specfun::gamma_fn(1.0 - x);
        const double rhs = kPi / std::sin(kPi * x);
        worst = std::max(worst, std::fabs(lhs / rhs - 1.0));
    }
    out.add("C11", "max relative error of Gamma(x)Gamma(1-x) = pi/sin(pi x)", worst, 0.0, 1e-12, Relation::AtMost);
}

// -------------------------------------------------------------------- residuals

void c10(Collector& out, const Budget&) {
    Scenario s = interval_scenario(0.5);
    s.phi0 = sine();
    SpectralConfig cfg = s.spectral;
    const spectral::SpectralSolution sol(spectral::post_problem(s, cfg, cfg.n_modes), cfg);
    const auto view = sol.view();
    const double wr = fracops::weak_residual(view, s, fracops::default_battery(s.T, 0.0, kPi));
    out.add("C10", "weak residual, 5 bumps", wr, 0.0, 1e-4, Relation::AtMost);

    std::vector<std::pair<double, double>> probes;
    for (double t : {0.2, 0.4, 0.6, 0.8, 1.0}) {
        for (double x : {0.5, 1.2, 2.0, 2.7}) probes.emplace_back(t, x);
    }
    const double cr = fracops::classical_residual(view, s, probes, 10000);
    out.add("C10", "classical residual, 20 probes, 1e4 intervals", cr, 0.0, 1e-3, Relation::AtMost);

    const std::vector<std::pair<double, double>> one{{0.7, 1.3}};
    const double r1 = fracops::classical_residual(view, s, one, 250);
    const double r2 = fracops::classical_residual(view, s, one, 500);
    const double need = 0.8 * std::pow(2.0, 2.0 - s.beta);
    out.add("C10", "refinement ratio r(250)/r(500)", r1 / r2, need, 0.0, Relation::AtLeast,
            "r(250)=" + g4(r1) + " r(500)=" + g4(r2));
}

// -------------------------------------------------------------------- representation

void c6(Collector& out, const Budget& b) {
    const auto ts = linspace(0.2, 1.0, 5);
    const auto xs = linspace(kPi / 6, 5 * kPi / 6, 5);
    for (double beta : kBetas) {
        Scenario s = interval_scenario(beta);
        s.phi0 = sine();
        const auto table = spectral::solve_spectral(s, ts, xs, s.spectral);
        double worst = 0.0;
        for (const auto& row : table.rows) {
            const double exact = specfun::mittag_leffler(beta, -std::pow(row.t, beta)) * std::sin(row.x);
            worst = std::max(worst, std::fabs(row.u - exact));
        }
        out.add("C6", "spectral max error, 5x5 grid, beta=" + g4(beta), worst, 0.0, 1e-8, Relation::AtMost);
    }

    Scenario s = interval_scenario(0.5);
    s.phi0 = sine();
    std::vector<Point> pts;
    for (double x : xs) pts.emplace_back(x);
    const auto nodes = mc::sweep_grid(s, ts, pts, mc_config(b), mc::Estimator::Post);
    int bad = 0;
    double worst_ratio = 0.0;
    for (const auto& n : nodes) {
        const double exact = specfun::mittag_leffler(0.5, -std::sqrt(n.t)) * std::sin(n.x[0]);
        const double dev = std::fabs(n.result.mean - exact);
        const double tol = n.result.tolerance();
        if (!n.error.empty() || !(dev <= tol)) ++bad;
        worst_ratio = std::max(worst_ratio, dev / tol);
    }
    out.add("C6", "MC nodes outside 3 SE + bias, 5x5 grid, beta=0.5", bad, 0.0, 0.0, Relation::AbsDiff,
            "worst deviation / tolerance = " + g4(worst_ratio));
}

void c7(Collector& out, const Budget& b) {
    Scenario s = interval_scenario(0.5);
    s.f = sine();
    const double t = 1.0;
    const std::vector<double> xs{kPi / 4, kPi / 2};
    const auto table = spectral::solve_spectral(s, {t}, xs, s.spectral);
    const McConfig mc = mc_config(b);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double x = xs[i];
        const std::string at = " at x=" + g4(x);
        const double series = table.rows[i].u;
        const double kernel = spectral::kernel_route_forcing(s, s.f, t, x, s.spectral);
        const auto m = mc::estimate_u_post(s, t, Point(x), mc);
        const double exact = std::sin(x) * (1.0 - specfun::mittag_leffler(0.5, -1.0));
        out.add("C7", "series vs closed form" + at, series, exact, 1e-8);
        out.add("C7", "series vs kernel quadrature" + at, kernel, series, 0.01 * std::fabs(series));
        out.add("C7", "series vs MC" + at, m.mean, series, std::max(0.01 * std::fabs(series), m.tolerance()),
                Relation::AbsDiff, m.bias_note);
        out.add("C7", "kernel quadrature vs MC" + at, m.mean, kernel, std::max(0.01 * std::fabs(kernel), m.tolerance()),
                Relation::AbsDiff, m.bias_note);
    }
}

void c8(Collector& out, const Budget& b) {
    Scenario s = interval_scenario(0.5);
    s.phi_past = Field(Product{timeform::Exp{1.0}, form::SineMode{1, 0.0, kPi}});
    s.phi0 = sine();
    const auto r = mc::estimate_representation_gap(s, 1.0, Point(kPi / 2), mc_config(b));
    out.add("C8", "representation gap, t=1 x=pi/2", r.mean, 0.0, r.tolerance(), Relation::AbsDiff, r.bias_note);
}

void c9(Collector& out, const Budget& b) {
    const Scenario s = memory_scenario();
    const auto ts = linspace(0.25, 1.0, 4);
    const auto xs = linspace(kPi / 5, 4 * kPi / 5, 4);
    const auto table = spectral::solve_spectral(s, ts, xs, s.spectral, spectral::Problem::Pre);
    std::vector<Point> pts;
    for (double x : xs) pts.emplace_back(x);
    const auto nodes = mc::sweep_grid(s, ts, pts, mc_config(b), mc::Estimator::Pre);
    int bad = 0;
    double worst_ratio = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        const double ref = table.rows[i].u;
        const double tol = n.result.tolerance() + 0.01 * std::fabs(ref);
        const double dev = std::fabs(n.result.mean - ref);
        if (!n.error.empty() || !(dev <= tol)) ++bad;
        worst_ratio = std::max(worst_ratio, dev / tol);
    }
    out.add("C9", "MC pre vs spectral post-with-memory-forcing, nodes outside tolerance, 4x4 grid", bad, 0.0, 0.0,
            Relation::AbsDiff, "3 SE + bias + 1%; worst deviation / tolerance = " + g4(worst_ratio));
}

using Runner = void (*)(Collector&, const Budget&);

const std::map<std::string, std::vector<std::pair<std::string, Runner>>>& registry() {
    static const std::map<std::string, std::vector<std::pair<std::string, Runner>>> r{
        {"identities", {{"C1", c1_c2}, {"C5", c5}}},
        {"overshoot", {{"C3", c3}, {"C4", c4}, {"C12", c12}}},
        {"specfun", {{"C11", c11}}},
        {"residuals", {{"C10", c10}}},
        {"representation", {{"C6", c6}, {"C7", c7}, {"C8", c8}, {"C9", c9}}},
    };
    return r;
}

}  // namespace

bool SuiteResult::passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool SuiteResult::passed(const std::string& criterion) const {
    bool any = false;
    for (const auto& c : checks) {
        if (c.criterion != criterion) continue;
        any = true;
        if (!c.pass) return false;
    }
    return any;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"identities", "overshoot", "specfun", "residuals", "representation"};
    return names;
}

const std::vector<std::string>& suite_criteria(const std::string& suite) {
    static const std::map<std::string, std::vector<std::string>> m{
        {"identities", {"C1", "C2", "C5"}},
        {"overshoot", {"C3", "C4", "C12"}},
        {"specfun", {"C11"}},
        {"residuals", {"C10"}},
        {"representation", {"C6", "C7", "C8", "C9"}},
    };
    const auto it = m.find(suite);
    if (it == m.end()) throw ParameterError("unknown suite '" + suite + "'");
    return it->second;
}

SuiteResult run_suite(const std::string& suite, const Budget& budget) {
    const auto it = registry().find(suite);
    if (it == registry().end()) {
        std::string known;
        for (const auto& n : suite_names()) known += " " + n;
        throw ParameterError("unknown suite '" + suite + "'; known:" + known);
    }
    SuiteResult r;
    r.suite = suite;
    Collector out(r);
    for (const auto& [_, run] : it->second) run(out, budget);
    return r;
}

SuiteResult run_criterion(const std::string& criterion, const Budget& budget) {
    const std::string key = criterion == "C2" ? "C1" : criterion;   // C1 and C2 share their samples
    for (const auto& [suite, runners] : registry()) {
        for (const auto& [id, run] : runners) {
            if (id != key) continue;
            SuiteResult r;
            r.suite = suite;
            Collector out(r);
            run(out, budget);
            return r;
        }
    }
    throw ParameterError("unknown criterion '" + criterion + "'");
}

std::string relation_name(Relation r) {
    switch (r) {
        case Relation::AbsDiff: return "abs_diff_le_tol";
        case Relation::AtMost: return "measured_le_tol";
        case Relation::AtLeast: return "measured_ge_expected_minus_tol";
        case Relation::True: return "holds";
    }
    return "?";
}

namespace {

std::string quoted(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace

void write_suite_csv(const std::string& path, const SuiteResult& r) {
    csv::Writer w(path);
    w.row({"criterion", "check", "measured", "expected", "tolerance", "relation", "verdict", "note"});
    for (const auto& c : r.checks) {
        w.row({c.criterion, quoted(c.name), csv::num(c.measured), csv::num(c.expected), csv::num(c.tolerance),
               relation_name(c.relation), c.pass ? "PASS" : "FAIL", quoted(c.note)});
    }
}

}  // namespace fracsr::validation
