#include "fracsr/spectral.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "fracsr/csv.hpp"
#include "fracsr/errors.hpp"
#include "fracsr/specfun.hpp"

namespace fracsr::spectral {

namespace {

constexpr double kPi = std::numbers::pi;

void check_beta(double beta, const char* who) {
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError(std::string(who) + ": beta must lie in (0, 1)");
}

const Interval& require_interval(const Scenario& s, const char* who) {
    if (s.alpha != 2.0) {
        throw CapabilityError(std::string(who) + ": the spectral backend handles alpha = 2 only (alpha = " +
                              std::to_string(s.alpha) + "); use the Monte-Carlo backend");
    }
    const auto* iv = std::get_if<Interval>(&s.domain);
    if (iv == nullptr) {
        throw CapabilityError(std::string(who) +
                              ": the spectral backend handles interval domains only; use the Monte-Carlo backend");
    }
    return *iv;
}

// E_beta'(-lambda u) at the nodes of a rule; cached per thread because the h-kernel and
// the solver revisit the same (lambda, U) many times.
using KernelKey = std::tuple<double, double, double, double, int>;

const std::vector<double>& kernel_values(double beta, double lambda, double U, double lambda_max, int nodes,
                                         const quad::MappedRule& rule) {
    thread_local std::map<KernelKey, std::vector<double>> cache;
    const KernelKey key{beta, lambda, U, lambda_max, nodes};
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (cache.size() > 4096) cache.clear();
    std::vector<double> k(rule.x.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = specfun::ml_derivative(beta, -lambda * rule.x[i]);
    return cache.emplace(key, std::move(k)).first->second;
}

const quad::MappedRule& cached_rule(double U, double lambda_max, int nodes) {
    thread_local std::map<std::tuple<double, double, int>, quad::MappedRule> cache;
    const auto key = std::make_tuple(U, lambda_max, nodes);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    if (cache.size() > 256) cache.clear();
    return cache.emplace(key, kernel_rule(U, lambda_max, nodes)).first->second;
}

}  // namespace

SpectralBasis SpectralBasis::on(const Interval& iv, int n_modes) {
    if (n_modes < 1) throw ParameterError("spectral basis: n_modes must be >= 1");
    if (!(iv.b > iv.a)) throw ParameterError("spectral basis: empty interval");
    return SpectralBasis{iv.a, iv.b, n_modes};
}

double SpectralBasis::lambda(int n) const {
    const double k = n * kPi / length();
    return k * k;
}

double SpectralBasis::psi(int n, double x) const {
    return std::sqrt(2.0 / length()) * std::sin(n * kPi * (x - a) / length());
}

std::vector<double> project(const SpectralBasis& basis, const SpaceForm& q, int nodes) {
    std::vector<double> c(static_cast<std::size_t>(basis.n_modes), 0.0);
    if (std::holds_alternative<form::Zero>(q)) return c;
    const auto r = quad::gauss_legendre_on(nodes, basis.a, basis.b);
    std::vector<double> qv(r.x.size()), terms(r.x.size());
    for (std::size_t i = 0; i < r.x.size(); ++i) qv[i] = eval_space_form(q, Point(r.x[i]));
    for (int n = 1; n <= basis.n_modes; ++n) {
        for (std::size_t i = 0; i < r.x.size(); ++i) terms[i] = r.w[i] * qv[i] * basis.psi(n, r.x[i]);
        c[static_cast<std::size_t>(n - 1)] = quad::pairwise_sum(terms);
    }
    return c;
}

std::vector<double> project(const SpectralBasis& basis, const Field& field, int nodes) {
    if (!field.is_time_constant()) throw ParameterError("project: field must be space-only");
    std::vector<double> c = project(basis, field.space_part(), nodes);
    const double k = eval_time_part(field.time_part(), 0.0);
    for (double& v : c) v *= k;
    return c;
}

quad::MappedRule kernel_rule(double U, double lambda_max, int total_nodes) {
    if (!(U > 0.0)) throw ParameterError("kernel_rule: U must be > 0");
    std::vector<double> edges{0.0};
    const int k_left = std::clamp(static_cast<int>(std::ceil(std::log2(std::max(U * lambda_max, 1.0)))) + 2, 1, 60);
    for (int k = k_left; k >= 1; --k) edges.push_back(std::ldexp(U, -k));
    constexpr int k_right = 10;
    for (int k = 2; k <= k_right; ++k) edges.push_back(U - std::ldexp(U, -k));
    edges.push_back(U);
    const int panels = static_cast<int>(edges.size()) - 1;
    const int m = std::max(8, (total_nodes + panels - 1) / panels);
    quad::MappedRule out;
    for (int p = 0; p < panels; ++p) {
        const auto r = quad::gauss_legendre_on(m, edges[static_cast<std::size_t>(p)], edges[static_cast<std::size_t>(p) + 1]);
        out.x.insert(out.x.end(), r.x.begin(), r.x.end());
        out.w.insert(out.w.end(), r.w.begin(), r.w.end());
    }
    return out;
}

double phi_kernel(double beta, double lambda, const std::function<double(double)>& f, double t,
                  const SpectralConfig& cfg) {
    check_beta(beta, "phi_kernel");
    if (!(lambda > 0.0)) throw ParameterError("phi_kernel: lambda must be > 0");
    if (!(t >= 0.0)) throw ParameterError("phi_kernel: t must be >= 0");
    if (t == 0.0) return 0.0;
    const double U = std::pow(t, beta);
    const auto& rule = cached_rule(U, lambda, cfg.time_quad_nodes);
    const auto& k = kernel_values(beta, lambda, U, lambda, cfg.time_quad_nodes, rule);
    std::vector<double> terms(rule.x.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        terms[i] = rule.w[i] * f(t - std::pow(rule.x[i], 1.0 / beta)) * k[i];
    }
    return quad::pairwise_sum(terms);
}

// ---------------------------------------------------------------------------

namespace {

ForcingTerm field_term(const SpectralBasis& basis, const Field& f, int nodes, std::string label) {
    ForcingTerm term;
    const TimePart tp = f.time_part();
    term.time = [tp](double r) { return eval_time_part(tp, r); };
    term.coeffs = project(basis, f.space_part(), nodes);
    term.label = std::move(label);
    return term;
}

}  // namespace

ModalProblem post_problem(const Scenario& s, const SpectralConfig& cfg, int n_modes) {
    const Interval& iv = require_interval(s, "solve_spectral");
    check_beta(s.beta, "solve_spectral");
    ModalProblem p;
    p.beta = s.beta;
    p.basis = SpectralBasis::on(iv, n_modes);
    p.initial = project(p.basis, s.phi0, cfg.space_quad_nodes);
    if (!s.f.is_zero()) p.forcing.push_back(field_term(p.basis, s.f, cfg.space_quad_nodes, "f"));
    return p;
}

ModalProblem pre_problem(const Scenario& s, const SpectralConfig& cfg, int n_modes) {
    const Interval& iv = require_interval(s, "solve_spectral");
    check_beta(s.beta, "solve_spectral");
    if (!s.phi_past) throw PreconditionError("solve_spectral: the pre problem needs a past field phi");
    const Field& phi = *s.phi_past;
    ModalProblem p;
    p.beta = s.beta;
    p.basis = SpectralBasis::on(iv, n_modes);
    p.initial = project(p.basis, phi.space_part(), cfg.space_quad_nodes);
    const double p0 = eval_time_part(phi.time_part(), 0.0);
    for (double& c : p.initial) c *= p0;
    if (!phi.is_time_constant()) {
        ForcingTerm term;
        const TimePart tp = phi.time_part();
        const double beta = s.beta;
        term.time = [tp, beta](double r) { return fracops::f_phi_time_factor(tp, beta, r).value; };
        term.coeffs = project(p.basis, phi.space_part(), cfg.space_quad_nodes);
        term.label = "f_phi";
        p.forcing.push_back(std::move(term));
    }
    if (!s.g.is_zero()) p.forcing.push_back(field_term(p.basis, s.g, cfg.space_quad_nodes, "g"));
    return p;
}

SpectralSolution::SpectralSolution(ModalProblem problem, const SpectralConfig& cfg, int n_use)
    : p_(std::move(problem)), cfg_(cfg), n_use_(n_use > 0 ? std::min(n_use, p_.basis.n_modes) : p_.basis.n_modes) {}

std::vector<double> SpectralSolution::coefficients(double t) const {
    if (!(t >= 0.0)) throw ParameterError("spectral solution: t must be >= 0");
    const int N = p_.basis.n_modes;
    std::vector<double> c(static_cast<std::size_t>(N), 0.0);
    const double beta = p_.beta;
    const double tb = std::pow(t, beta);
    for (int n = 1; n <= N; ++n) {
        const double a = p_.initial[static_cast<std::size_t>(n - 1)];
        if (a != 0.0) c[static_cast<std::size_t>(n - 1)] = a * specfun::mittag_leffler(beta, -p_.basis.lambda(n) * tb);
    }
    if (t == 0.0 || p_.forcing.empty()) return c;

    // one node layout for all modes, so each time function is sampled once
    const double lmax = p_.basis.lambda(N);
    const auto& rule = cached_rule(tb, lmax, cfg_.time_quad_nodes);
    std::vector<std::vector<double>> fv(p_.forcing.size());
    for (std::size_t k = 0; k < p_.forcing.size(); ++k) {
        fv[k].resize(rule.x.size());
        for (std::size_t i = 0; i < rule.x.size(); ++i) fv[k][i] = p_.forcing[k].time(t - std::pow(rule.x[i], 1.0 / beta));
    }
    std::vector<double> terms(rule.x.size());
    for (int n = 1; n <= N; ++n) {
        bool any = false;
        for (const auto& term : p_.forcing) any = any || term.coeffs[static_cast<std::size_t>(n - 1)] != 0.0;
        if (!any) continue;
        const auto& kern = kernel_values(beta, p_.basis.lambda(n), tb, lmax, cfg_.time_quad_nodes, rule);
        for (std::size_t k = 0; k < p_.forcing.size(); ++k) {
            const double b = p_.forcing[k].coeffs[static_cast<std::size_t>(n - 1)];
            if (b == 0.0) continue;
            for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = rule.w[i] * fv[k][i] * kern[i];
            c[static_cast<std::size_t>(n - 1)] += b * quad::pairwise_sum(terms);
        }
    }
    return c;
}

const std::vector<double>& SpectralSolution::cached(double t) const {
    if (t != cache_t_ || cache_c_.empty()) {
        cache_c_ = coefficients(t);
        cache_t_ = t;
    }
    return cache_c_;
}

double SpectralSolution::value(double t, double x) const {
    if (x <= p_.basis.a || x >= p_.basis.b) return 0.0;
    const auto& c = cached(t);
    double s = 0.0;
    for (int n = n_use_; n >= 1; --n) s += c[static_cast<std::size_t>(n - 1)] * p_.basis.psi(n, x);
    return s;
}

double SpectralSolution::value_xx(double t, double x) const {
    if (x <= p_.basis.a || x >= p_.basis.b) return 0.0;
    const auto& c = cached(t);
    double s = 0.0;
    for (int n = n_use_; n >= 1; --n) s -= p_.basis.lambda(n) * c[static_cast<std::size_t>(n - 1)] * p_.basis.psi(n, x);
    return s;
}

double SpectralSolution::tail(double t, double x) const {
    const auto& c = cached(t);
    double s = 0.0;
    for (int n = p_.basis.n_modes; n > n_use_; --n) s += std::fabs(c[static_cast<std::size_t>(n - 1)] * p_.basis.psi(n, x));
    return s;
}

fracops::SolutionView SpectralSolution::view() const {
    return {[this](double t, double x) { return value(t, x); }, [this](double t, double x) { return value_xx(t, x); }};
}

SolutionTable solve_spectral(const Scenario& s, const std::vector<double>& t_grid, const std::vector<double>& x_grid,
                             const SpectralConfig& cfg, Problem which) {
    if (cfg.n_modes < 1) throw ParameterError("solve_spectral: n_modes must be >= 1");
    if (t_grid.empty() || x_grid.empty()) throw GridError("solve_spectral: empty grid");
    for (double t : t_grid) {
        if (!(t >= 0.0)) throw ParameterError("solve_spectral: grid times must be >= 0");
    }
    const int N = cfg.n_modes;
    ModalProblem p = which == Problem::Post ? post_problem(s, cfg, 2 * N) : pre_problem(s, cfg, 2 * N);
    SolutionTable table;
    table.n_modes = N;
    table.rows.resize(t_grid.size() * x_grid.size());
    const SpectralSolution proto(std::move(p), cfg, N);
    std::vector<std::vector<double>> coeff(t_grid.size());
#pragma omp parallel for schedule(static) if (cfg.exec == ExecPolicy::OpenMP)
    for (std::size_t i = 0; i < t_grid.size(); ++i) coeff[i] = proto.coefficients(t_grid[i]);

    const SpectralBasis& basis = proto.problem().basis;
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        for (std::size_t j = 0; j < x_grid.size(); ++j) {
            const double x = x_grid[j];
            SolutionRow& row = table.rows[i * x_grid.size() + j];
            row.t = t_grid[i];
            row.x = x;
            if (x <= basis.a || x >= basis.b) continue;
            double u = 0.0, tail = 0.0;
            for (int n = N; n >= 1; --n) u += coeff[i][static_cast<std::size_t>(n - 1)] * basis.psi(n, x);
            for (int n = 2 * N; n > N; --n) tail += std::fabs(coeff[i][static_cast<std::size_t>(n - 1)] * basis.psi(n, x));
            row.u = u;
            row.tail_bound = tail;
            table.max_tail = std::max(table.max_tail, tail);
        }
    }
    table.tail_within_tol = table.max_tail <= cfg.tail_tol;
    return table;
}

void write_solution_csv(const std::string& path, const SolutionTable& table) {
    csv::Writer w(path);
    w.row({"t", "x", "u", "tail_bound"});
    for (const auto& r : table.rows) w.row({csv::num(r.t), csv::num(r.x), csv::num(r.u), csv::num(r.tail_bound)});
}

// ---------------------------------------------------------------------------

double heat_kernel(const SpectralBasis& basis, double s, double x, double y, const SpectralConfig& cfg) {
    if (!(s > 0.0)) throw ParameterError("heat_kernel: s must be > 0");
    const double k1 = kPi / basis.length();
    double sum = 0.0;
    for (int n = 1; n < 10'000'000; ++n) {
        const double lam = basis.lambda(n);
        const double e = std::exp(-lam * s);
        sum += e * basis.psi(n, x) * basis.psi(n, y);
        // remaining terms: sum_{m>n} e^{-lambda_m s} <= e^{-lambda_{n+1} s} / (1 - e^{-(2n+3) k1^2 s})
        const double next = std::exp(-basis.lambda(n + 1) * s);
        const double rest = 2.0 / basis.length() * next / -std::expm1(-(2.0 * n + 3.0) * k1 * k1 * s);
        if (rest <= cfg.tail_tol) break;
    }
    return sum;
}

std::vector<double> subordinate_kernel_row(const SpectralBasis& basis, double beta, double w, double x,
                                           const std::vector<double>& ys, const SpectralConfig& cfg) {
    check_beta(beta, "subordinate_kernel");
    if (!(w > 0.0)) throw ParameterError("subordinate_kernel: w must be > 0");
    const int N = std::max(cfg.n_modes, basis.n_modes);
    const double wb = std::pow(w, beta);
    const double pre = std::pow(w, beta - 1.0);
    std::vector<double> amp(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) {
        amp[static_cast<std::size_t>(n - 1)] =
            pre * specfun::mittag_leffler2(beta, beta, -basis.lambda(n) * wb) * basis.psi(n, x);
    }
    std::vector<double> out(ys.size());
    for (std::size_t j = 0; j < ys.size(); ++j) {
        double s = 0.0;
        for (int n = N; n >= 1; --n) s += amp[static_cast<std::size_t>(n - 1)] * basis.psi(n, ys[j]);
        out[j] = s;
    }
    return out;
}

double subordinate_kernel(const SpectralBasis& basis, double beta, double w, double x, double y,
                          const SpectralConfig& cfg) {
    return subordinate_kernel_row(basis, beta, w, x, {y}, cfg)[0];
}

double h_kernel(const SpectralBasis& basis, double beta, double t, double x, double r, double y,
                const SpectralConfig& cfg) {
    check_beta(beta, "h_kernel");
    if (!(r < 0.0)) throw ParameterError("h_kernel: r must be < 0");
    if (!(t > 0.0)) throw ParameterError("h_kernel: t must be > 0");
    const double c = -1.0 / specfun::gamma_fn(-beta);
    const double U = std::pow(t, beta);
    const int N = basis.n_modes;
    const double lmax = basis.lambda(N);
    const auto& rule = cached_rule(U, lmax, cfg.time_quad_nodes);
    std::vector<double> nu(rule.x.size());
    for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = c * std::pow(t - std::pow(rule.x[i], 1.0 / beta) - r, -1.0 - beta);
    std::vector<double> terms(nu.size());
    double sum = 0.0;
    for (int n = N; n >= 1; --n) {
        const auto& k = kernel_values(beta, basis.lambda(n), U, lmax, cfg.time_quad_nodes, rule);
        for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = rule.w[i] * nu[i] * k[i];
        sum += basis.psi(n, x) * basis.psi(n, y) * quad::pairwise_sum(terms);
    }
    return sum;
}

double kernel_route_forcing(const Scenario& s, const Field& g, double t, double x, const SpectralConfig& cfg) {
    const Interval& iv = require_interval(s, "kernel_route_forcing");
    check_beta(s.beta, "kernel_route_forcing");
    if (!(t > 0.0)) return 0.0;
    const double beta = s.beta;
    const SpectralBasis basis = SpectralBasis::on(iv, cfg.n_modes);
    const double U = std::pow(t, beta);
    const auto rule = kernel_rule(U, basis.lambda(basis.n_modes), cfg.time_quad_nodes);
    const auto yr = quad::gauss_legendre_on(cfg.space_quad_nodes, iv.a, iv.b);
    std::vector<double> outer(rule.x.size()), inner(yr.x.size());
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
        const double u = rule.x[i];
        const double w = std::pow(u, 1.0 / beta);
        const double z = t - w;
        // dz = (1/beta) u^{1/beta - 1} du
        const double jac = std::pow(u, 1.0 / beta - 1.0) / beta;
        const auto q = subordinate_kernel_row(basis, beta, w, x, yr.x, cfg);
        for (std::size_t j = 0; j < yr.x.size(); ++j) inner[j] = yr.w[j] * g.value(z, Point(yr.x[j])) * q[j];
        outer[i] = rule.w[i] * jac * quad::pairwise_sum(inner);
    }
    return quad::pairwise_sum(outer);
}

}  // namespace fracsr::spectral
