#include "fracsr/fracops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "fracsr/csv.hpp"
#include "fracsr/errors.hpp"
#include "fracsr/quadrature.hpp"
#include "fracsr/specfun.hpp"

namespace fracsr::fracops {

namespace {

void check_beta(double beta, const char* who) {
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError(std::string(who) + ": beta must lie in (0, 1)");
}

// a^p - b^p for a > b >= 0 without cancellation.
double pow_diff(double a, double b, double p) {
    if (b <= 0.0) return std::pow(a, p);
    return std::pow(b, p) * std::expm1(p * std::log1p((a - b) / b));
}

template <class F>
double gk(F&& f, double a, double b) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 10, 1e-12);
}

double interp(const GridFunction1D& u, double t) {
    const auto it = std::upper_bound(u.nodes.begin(), u.nodes.end(), t);
    std::size_t j = static_cast<std::size_t>(it - u.nodes.begin());
    if (j == 0) j = 1;
    if (j >= u.nodes.size()) j = u.nodes.size() - 1;
    const double t0 = u.nodes[j - 1], t1 = u.nodes[j];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * u.values[j - 1] + w * u.values[j];
}

void check_alpha2_interval(const Scenario& s, const char* who) {
    if (s.alpha != 2.0) throw CapabilityError(std::string(who) + ": residual checks are implemented for alpha = 2 only");
    if (!std::holds_alternative<Interval>(s.domain))
        throw CapabilityError(std::string(who) + ": residual checks need an interval domain");
}

}  // namespace

void check_grid(const GridFunction1D& u, std::size_t min_nodes) {
    if (u.nodes.size() != u.values.size()) throw GridError("grid function: nodes/values size mismatch");
    if (u.nodes.size() < min_nodes)
        throw GridError("grid function: need at least " + std::to_string(min_nodes) + " nodes, got " +
                        std::to_string(u.nodes.size()));
    for (std::size_t i = 1; i < u.nodes.size(); ++i) {
        if (!(u.nodes[i] > u.nodes[i - 1])) throw GridError("grid function: nodes must be strictly increasing");
    }
}

GridFunction1D sample_graded(const std::function<double(double)>& u, double t, int n, double grading) {
    if (n < 2) throw GridError("sample_graded: need at least 2 intervals");
    if (!(t > 0.0)) throw ParameterError("sample_graded: t must be > 0");
    GridFunction1D g;
    g.nodes.resize(static_cast<std::size_t>(n) + 1);
    g.values.resize(g.nodes.size());
    for (int j = 0; j <= n; ++j) {
        const double tj = j == n ? t : t * std::pow(static_cast<double>(j) / n, grading);
        g.nodes[static_cast<std::size_t>(j)] = tj;
        g.values[static_cast<std::size_t>(j)] = u(tj);
    }
    return g;
}

double caputo_derivative(const GridFunction1D& u, std::size_t n, double beta) {
    check_beta(beta, "caputo_derivative");
    check_grid(u, 3);
    if (n == 0 || n >= u.nodes.size()) throw RangeError("caputo_derivative: node index must be interior or last");
    const double tn = u.nodes[n];
    const double p = 1.0 - beta;
    std::vector<double> terms(n);
    for (std::size_t j = 1; j <= n; ++j) {
        const double dt = u.nodes[j] - u.nodes[j - 1];
        const double slope = (u.values[j] - u.values[j - 1]) / dt;
        terms[j - 1] = slope * pow_diff(tn - u.nodes[j - 1], tn - u.nodes[j], p);
    }
    return quad::pairwise_sum(terms) / specfun::gamma_fn(2.0 - beta);
}

double caputo_derivative_at(const GridFunction1D& u, double t, double beta) {
    const auto it = std::lower_bound(u.nodes.begin(), u.nodes.end(), t);
    if (it == u.nodes.end() || *it != t) throw RangeError("caputo_derivative: t is not a grid node");
    return caputo_derivative(u, static_cast<std::size_t>(it - u.nodes.begin()), beta);
}

// ---------------------------------------------------------------------------

FPhiResult f_phi_time_factor(const TimePart& p, double beta, double t, double K) {
    check_beta(beta, "compute_f_phi");
    if (!(t > 0.0)) throw ParameterError("compute_f_phi: t must be > 0 (the memory forcing may blow up at 0)");
    if (!(K > 0.0)) throw ParameterError("compute_f_phi: tail cut K must be > 0");
    const double inf = std::numeric_limits<double>::infinity();
    if (sup_abs_time_part_past(p) == inf) throw ParameterError("compute_f_phi: phi must be bounded on the past");

    FPhiResult res;
    const double p0 = eval_time_part(p, 0.0);
    double p_inf = p0;        // limit of p(-v), v -> inf
    double tail_sup = 0.0;    // sup_{v >= K} |p(-v) - p_inf|
    std::vector<double> breaks;

    if (const auto* e = std::get_if<timeform::Exp>(&p)) {
        if (e->rate == 0.0) return res;
        p_inf = 0.0;
        tail_sup = std::exp(-e->rate * K);
        res.tail_kind = TailKind::Bounded;
    } else if (const auto* ind = std::get_if<timeform::IndicatorPast>(&p)) {
        if (ind->threshold > 0.0) return res;   // equal to 1 on the whole past
        p_inf = 1.0;
        if (-ind->threshold < K) breaks.push_back(-ind->threshold);
        res.tail_kind = TailKind::Analytic;
    } else {
        return res;   // constant in time (bounded polynomials are constants)
    }

    const double c = beta / specfun::gamma_fn(1.0 - beta);
    auto integrand = [&](double v) { return (eval_time_part(p, -v) - p0) * std::pow(t + v, -1.0 - beta); };
    // geometric breakpoints on the scale of t resolve the kernel peak at v = 0
    for (double b = t; b < K; b *= 2.0) breaks.push_back(b);
    breaks.push_back(0.0);
    breaks.push_back(K);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    std::vector<double> pieces;
    for (std::size_t i = 1; i < breaks.size(); ++i) pieces.push_back(gk(integrand, breaks[i - 1], breaks[i]));
    const double body = c * quad::pairwise_sum(pieces);

    // int_K^inf (p(-v) - p0)(t+v)^{-1-beta} dv with p(-v) replaced by its limit;
    // exact for the indicator, whose jump may also sit beyond K
    double tail = (p_inf - p0) * std::pow(t + K, -beta) / specfun::gamma_fn(1.0 - beta);
    if (const auto* ind = std::get_if<timeform::IndicatorPast>(&p); ind && -ind->threshold >= K) {
        const double v0 = -ind->threshold;
        tail = (std::pow(t + v0, -beta) - p0 * std::pow(t + K, -beta)) / specfun::gamma_fn(1.0 - beta);
    }
    res.tail = tail;
    res.tail_bound = tail_sup * std::pow(t + K, -beta) / specfun::gamma_fn(1.0 - beta);
    res.value = body + tail;
    return res;
}

FPhiResult compute_f_phi(const Field& phi, double beta, double t, const Point& x, double K) {
    if (phi.range() == TimeRange::Forcing) throw PreconditionError("compute_f_phi: phi must be a past field");
    if (phi.is_time_constant()) {
        check_beta(beta, "compute_f_phi");
        if (!(t > 0.0)) throw ParameterError("compute_f_phi: t must be > 0");
        return {};
    }
    FPhiResult r = f_phi_time_factor(phi.time_part(), beta, t, K);
    const double q = eval_space_form(phi.space_part(), x);
    r.value *= q;
    r.tail *= q;
    r.tail_bound *= std::fabs(q);
    return r;
}

MemoryForcing::MemoryForcing(const Field& phi, double beta, double t_max, int intervals, double K)
    : q_(phi.space_part()), beta_(beta), t_max_(t_max) {
    check_beta(beta, "MemoryForcing");
    if (!(t_max > 0.0)) throw ParameterError("MemoryForcing: t_max must be > 0");
    if (intervals < 4) throw GridError("MemoryForcing: need at least 4 intervals");
    zero_ = phi.is_time_constant() || phi.is_zero();
    const double s_max = std::pow(t_max, 1.0 - beta);
    ds_ = s_max / intervals;
    table_.assign(static_cast<std::size_t>(intervals) + 1, 0.0);
    if (zero_) return;
    const TimePart p = phi.time_part();
    for (int j = 1; j <= intervals; ++j) {
        const double r = j == intervals ? t_max : std::pow(j * ds_, 1.0 / (1.0 - beta));
        table_[static_cast<std::size_t>(j)] = f_phi_time_factor(p, beta, r, K).value;
    }
    // quadratic extrapolation to s = 0 (F is smooth in s there)
    table_[0] = 3.0 * table_[1] - 3.0 * table_[2] + table_[3];
}

double MemoryForcing::time_factor(double r) const {
    if (zero_) return 0.0;
    if (!(r >= 0.0 && r <= t_max_)) throw RangeError("MemoryForcing: r outside [0, t_max]");
    const double s = std::pow(r, 1.0 - beta_) / ds_;
    std::size_t j = static_cast<std::size_t>(s);
    if (j >= table_.size() - 1) j = table_.size() - 2;
    const double w = s - static_cast<double>(j);
    return (1.0 - w) * table_[j] + w * table_[j + 1];
}

double MemoryForcing::operator()(double r, const Point& y) const {
    if (zero_) return 0.0;
    return time_factor(r) * eval_space_form(q_, y);
}

// ---------------------------------------------------------------------------

double rl_integral(const GridFunction1D& phi, double s, double beta) {
    check_beta(beta, "rl_integral");
    check_grid(phi, 2);
    const double T = phi.nodes.back();
    if (!(s < T)) throw RangeError("rl_integral: s must be < T");
    if (s < phi.nodes.front()) throw RangeError("rl_integral: s before the first node");
    const double p1 = 1.0 - beta, p2 = 2.0 - beta;
    std::vector<double> terms;
    double r0 = s, v0 = interp(phi, s);
    auto j = static_cast<std::size_t>(std::upper_bound(phi.nodes.begin(), phi.nodes.end(), s) - phi.nodes.begin());
    for (; j < phi.nodes.size(); ++j) {
        const double r1 = phi.nodes[j], v1 = phi.values[j];
        const double m = (v1 - v0) / (r1 - r0);
        const double a = r0 - s, b = r1 - s;
        // int_a^b w^{-beta} (v0 + m (w - a)) dw
        terms.push_back((v0 - m * a) * pow_diff(b, a, p1) / p1 + m * pow_diff(b, a, p2) / p2);
        r0 = r1;
        v0 = v1;
    }
    return quad::pairwise_sum(terms) / specfun::gamma_fn(1.0 - beta);
}

namespace {

// (1/Gamma(2-beta)) int_{u_lo}^{u_hi} f(s + u^{1/(1-beta)}) du
double rl_substituted(const std::function<double(double)>& f, double lo, double hi, double s, double beta,
                      int panels) {
    const double p = 1.0 - beta;
    const double u_lo = std::pow(std::max(lo - s, 0.0), p);
    const double u_hi = std::pow(hi - s, p);
    if (!(u_hi > u_lo)) return 0.0;
    auto g = [&](double u) { return f(s + std::pow(u, 1.0 / p)); };
    return quad::integrate_gl_composite(g, u_lo, u_hi, 32, panels) / specfun::gamma_fn(2.0 - beta);
}

}  // namespace

double rl_integral(const std::function<double(double)>& phi, double T, double s, double beta, int panels) {
    check_beta(beta, "rl_integral");
    if (!(s < T)) throw RangeError("rl_integral: s must be < T");
    return rl_substituted(phi, s, T, s, beta, panels);
}

double rl_integral_derivative(const std::function<double(double)>& phi, const std::function<double(double)>& dphi,
                              double T, double s, double beta, int panels) {
    check_beta(beta, "rl_integral_derivative");
    if (!(s < T)) throw RangeError("rl_integral_derivative: s must be < T");
    return rl_substituted(dphi, s, T, s, beta, panels) -
           phi(T) * std::pow(T - s, -beta) / specfun::gamma_fn(1.0 - beta);
}

// ---------------------------------------------------------------------------

double Bump1D::operator()(double t) const {
    const double xi = (2.0 * t - lo - hi) / (hi - lo);
    if (!(std::fabs(xi) < 1.0)) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - xi * xi));
}

double Bump1D::d1(double t) const {
    const double xi = (2.0 * t - lo - hi) / (hi - lo);
    if (!(std::fabs(xi) < 1.0)) return 0.0;
    const double q = 1.0 - xi * xi;
    const double k = 2.0 / (hi - lo);
    return (*this)(t) * (-2.0 * xi / (q * q)) * k;
}

double Bump1D::d2(double t) const {
    const double xi = (2.0 * t - lo - hi) / (hi - lo);
    if (!(std::fabs(xi) < 1.0)) return 0.0;
    const double q = 1.0 - xi * xi;
    const double k = 2.0 / (hi - lo);
    const double g1 = -2.0 * xi / (q * q);
    const double g2 = -2.0 / (q * q) - 8.0 * xi * xi / (q * q * q);
    return (*this)(t) * (g1 * g1 + g2) * k * k;
}

std::vector<TestBump> default_battery(double T, double a, double b) {
    const double L = b - a;
    auto tb = [&](double l, double h) { return Bump1D{l * T, h * T}; };
    auto xb = [&](double l, double h) { return Bump1D{a + l * L, a + h * L}; };
    return {{tb(0.1, 0.9), xb(0.1, 0.9)},
            {tb(0.05, 0.4), xb(0.3, 0.7)},
            {tb(0.5, 0.95), xb(0.05, 0.5)},
            {tb(0.2, 0.6), xb(0.5, 0.95)},
            {tb(0.3, 0.8), xb(0.2, 0.45)}};
}

std::vector<double> weak_residuals(const SolutionView& u, const Scenario& s, const std::vector<TestBump>& battery,
                                   const WeakResidualConfig& cfg) {
    check_alpha2_interval(s, "weak_residual");
    check_beta(s.beta, "weak_residual");
    std::vector<double> out;
    for (const TestBump& bump : battery) {
        const Bump1D& B = bump.time;
        const Bump1D& C = bump.space;
        const auto xr = quad::gauss_legendre_on(cfg.space_nodes, C.lo, C.hi);
        // B vanishes near T, so d/ds I B = I B' restricted to the support of B
        std::function<double(double)> Bf = [&](double r) { return B(r); };
        std::function<double(double)> dB = [&](double r) { return B.d1(r); };

        // time nodes: graded panels on [0, lo] (u is singular at t = 0), one panel on [lo, hi]
        std::vector<double> tn, tw;
        auto add_panel = [&](double a, double b, int n) {
            const auto r = quad::gauss_legendre_on(n, a, b);
            tn.insert(tn.end(), r.x.begin(), r.x.end());
            tw.insert(tw.end(), r.w.begin(), r.w.end());
        };
        constexpr int kGraded = 30;
        add_panel(0.0, B.lo * std::ldexp(1.0, -kGraded), 8);
        for (int k = kGraded; k >= 1; --k) {
            add_panel(B.lo * std::ldexp(1.0, -k), B.lo * std::ldexp(1.0, -k + 1), 8);
        }
        add_panel(B.lo, B.hi, cfg.time_nodes);

        std::vector<double> terms;
        terms.reserve(tn.size() + 1);
        std::vector<double> row(xr.x.size());
        for (std::size_t i = 0; i < tn.size(); ++i) {
            const double t = tn[i];
            const double dI = t < B.hi ? rl_substituted(dB, B.lo, B.hi, t, s.beta, cfg.rl_panels) : 0.0;
            const double bt = B(t);
            for (std::size_t j = 0; j < xr.x.size(); ++j) {
                const double x = xr.x[j];
                const Point px(x);
                const double uv = u.u(t, x);
                row[j] = xr.w[j] * (uv * (dI * C(x) + bt * C.d2(x)) + s.f.value(t, px) * bt * C(x));
            }
            terms.push_back(tw[i] * quad::pairwise_sum(row));
        }
        // contribution of the delta at s = 0 in the dual operator
        const double I0 = rl_substituted(Bf, B.lo, B.hi, 0.0, s.beta, cfg.rl_panels);
        for (std::size_t j = 0; j < xr.x.size(); ++j) row[j] = xr.w[j] * u.u(0.0, xr.x[j]) * C(xr.x[j]);
        terms.push_back(I0 * quad::pairwise_sum(row));
        out.push_back(quad::pairwise_sum(terms));
    }
    return out;
}

double weak_residual(const SolutionView& u, const Scenario& s, const std::vector<TestBump>& battery,
                     const WeakResidualConfig& cfg) {
    double m = 0.0;
    for (double r : weak_residuals(u, s, battery, cfg)) m = std::max(m, std::fabs(r));
    return m;
}

double default_grading(double beta) { return (2.0 - beta) / beta; }

std::vector<ProbeResidual> classical_residuals(const SolutionView& u, const Scenario& s,
                                               const std::vector<std::pair<double, double>>& probes, int grid_size) {
    check_alpha2_interval(s, "classical_residual");
    check_beta(s.beta, "classical_residual");
    std::vector<ProbeResidual> out;
    const double grading = default_grading(s.beta);
    for (const auto& [t, x] : probes) {
        const GridFunction1D g = sample_graded([&](double r) { return u.u(r, x); }, t, grid_size, grading);
        const double d = caputo_derivative(g, g.nodes.size() - 1, s.beta);
        out.push_back({t, x, d - u.u_xx(t, x) - s.f.value(t, Point(x)), grid_size});
    }
    return out;
}

double classical_residual(const SolutionView& u, const Scenario& s,
                          const std::vector<std::pair<double, double>>& probes, int grid_size) {
    double m = 0.0;
    for (const auto& r : classical_residuals(u, s, probes, grid_size)) m = std::max(m, std::fabs(r.residual));
    return m;
}

void write_residual_csv(const std::string& path, const std::vector<ProbeResidual>& rows) {
    csv::Writer w(path);
    w.row({"probe_t", "probe_x", "residual", "grid_size"});
    for (const auto& r : rows) w.row({csv::num(r.t), csv::num(r.x), csv::num(r.residual), std::to_string(r.grid_size)});
}

}  // namespace fracsr::fracops
