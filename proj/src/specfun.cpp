#include "fracsr/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/sin_pi.hpp>

#include "fracsr/errors.hpp"
#include "fracsr/quadrature.hpp"

namespace fracsr::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMaxSeriesTerms = 2000;

bool is_pole(double x) { return x <= 0.0 && x == std::floor(x); }

void check_beta(double beta, const char* who) {
    if (!(beta > 0.0 && beta <= 1.0)) {
        throw ParameterError(std::string(who) + ": beta must lie in (0, 1], got " + std::to_string(beta));
    }
}

void check_z(double z, const char* who) {
    if (std::isnan(z) || z > 0.0) {
        throw ParameterError(std::string(who) + ": argument must satisfy z <= 0, got " + std::to_string(z));
    }
}

boost::math::quadrature::tanh_sinh<double>& ts_integrator() {
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    return ts;
}

double ts_integrate(const auto& f, double a, double b) {
    if (!(b > a)) return 0.0;
    double err = 0.0;
    return ts_integrator().integrate(f, a, b, 1e-14, &err);
}

}  // namespace

double gamma_fn(double x) {
    if (std::isnan(x)) throw ParameterError("gamma_fn: NaN argument");
    if (is_pole(x)) throw PoleError("gamma_fn: pole at x = " + std::to_string(x));
    if (x >= 0.5) return std::tgamma(x);
    // Gamma(x) Gamma(1-x) = pi / sin(pi x)
    return kPi / (boost::math::sin_pi(x) * std::tgamma(1.0 - x));
}

double rgamma(double x) {
    if (is_pole(x)) return 0.0;
    if (x > 171.0) return 0.0;
    if (x >= 0.5) return 1.0 / std::tgamma(x);
    return boost::math::sin_pi(x) * std::tgamma(1.0 - x) / kPi;
}

// ---------------------------------------------------------------------------

MittagLeffler::MittagLeffler(double beta, double gamma, const SpecFunConfig& cfg)
    : beta_(beta), gamma_(gamma), cfg_(cfg) {
    check_beta(beta, "mittag_leffler");
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("mittag_leffler2: gamma must be > 0");
    if (!(cfg.abs_tol > 0.0)) throw ParameterError("SpecFunConfig: abs_tol must be > 0");
    if (cfg.asymptotic_terms < 1) throw ParameterError("SpecFunConfig: asymptotic_terms must be >= 1");
    const int n = cfg.asymptotic_terms;
    asym_coeff_.resize(static_cast<std::size_t>(n));
    for (int k = 1; k <= n; ++k) asym_coeff_[static_cast<std::size_t>(k - 1)] = rgamma(gamma - beta * k);
    const double y = gamma - beta * (n + 1);
    // |1/Gamma(y)| <= Gamma(1-y)/pi for y < 0
    asym_next_bound_ = y > 0.0 ? std::fabs(rgamma(y)) : std::tgamma(1.0 - y) / kPi;
    coeff_.reserve(64);
}

long double MittagLeffler::series_coeff(int k) const {
    while (static_cast<int>(coeff_.size()) <= k) {
        const long double arg = static_cast<long double>(beta_) * coeff_.size() + gamma_;
        coeff_.push_back(1.0L / std::tgamma(arg));
    }
    return coeff_[static_cast<std::size_t>(k)];
}

bool MittagLeffler::series(double z, double& out) const {
    const double az = std::fabs(z);
    if (az > 0.0 && std::pow(az, 1.0 / beta_) > 16.0) return false;
    const double peak = az > 0.0 ? std::pow(az, 1.0 / beta_) / beta_ : 0.0;
    long double sum = 0.0L, abs_sum = 0.0L, zk = 1.0L;
    int k = 0;
    for (; k < kMaxSeriesTerms; ++k) {
        const long double term = zk * series_coeff(k);
        sum += term;
        abs_sum += std::fabs(term);
        if (k > peak + 2 && std::fabs(term) <= 1e-22L * abs_sum) break;
        zk *= z;
    }
    if (k == kMaxSeriesTerms) return false;
    const long double rounding = 4.0L * std::numeric_limits<long double>::epsilon() * abs_sum;
    if (rounding > cfg_.abs_tol) return false;
    out = static_cast<double>(sum);
    return true;
}

bool MittagLeffler::asymptotic(double z, double& out) const {
    const double az = std::fabs(z);
    if (az < 1.0 || beta_ >= 1.0) return false;
    const int n = cfg_.asymptotic_terms;
    if (10.0 * std::pow(az, -(n + 1.0)) * asym_next_bound_ > 0.1 * cfg_.abs_tol) return false;
    if (beta_ > 2.0 / 3.0) {
        // exponentially small oscillating pair, invisible to the algebraic expansion
        const double stokes = 2.0 / beta_ * std::pow(az, (1.0 - gamma_) / beta_) *
                              std::exp(std::pow(az, 1.0 / beta_) * std::cos(kPi / beta_));
        if (stokes > 0.1 * cfg_.abs_tol) return false;
    }
    const double w = 1.0 / z;
    double s = 0.0;
    for (int k = n; k >= 1; --k) s = w * (asym_coeff_[static_cast<std::size_t>(k - 1)] + s);
    out = -s;
    return true;
}

double MittagLeffler::closed_beta_one(double z) const {
    if (gamma_ == 1.0) return std::exp(z);
    if (gamma_ < 1.0) {
        MittagLeffler up(1.0, gamma_ + 1.0, cfg_);
        return z * up(z) + rgamma(gamma_);
    }
    // E_{1,g}(z) = (1/Gamma(g-1)) int_0^1 e^{zs} (1-s)^{g-2} ds
    const double e = gamma_ - 2.0;
    const double v = ts_integrate([&](double s) { return std::exp(z * s) * std::pow(1.0 - s, e); }, 0.0, 1.0);
    return v * rgamma(gamma_ - 1.0);
}

double MittagLeffler::integral(double z) const {
    if (z == 0.0) return rgamma(gamma_);
    if (beta_ >= 1.0) return closed_beta_one(z);
    if (gamma_ >= 1.0 + beta_) {
        MittagLeffler lower(beta_, gamma_ - beta_, cfg_);
        return (lower.integral(z) - rgamma(gamma_ - beta_)) / z;
    }
    const double x = -z;
    const double b = beta_;
    const double s1 = std::sin(kPi * (1.0 - gamma_));
    const double s2 = std::sin(kPi * (1.0 - gamma_ + b));
    const double cb = std::cos(b * kPi);
    const double pw = (1.0 - gamma_) / b;
    const double pref = 1.0 / (b * kPi);
    auto kernel = [&](double chi) {
        const double num = chi * s1 + x * s2;
        const double den = chi * chi + 2.0 * chi * x * cb + x * x;
        return pref * std::pow(chi, pw) * std::exp(-std::pow(chi, 1.0 / b)) * num / den;
    };
    const double chi_max = std::pow(75.0, b);
    // denominator is smallest near chi = -x cos(beta pi); sharp when beta -> 1
    std::vector<double> cuts{0.0};
    if (cb < 0.0) {
        const double c = -x * cb;
        const double w = x * std::sin(b * kPi);
        for (double p : {c - 4.0 * w, c - w, c, c + w, c + 4.0 * w}) {
            if (p > cuts.back() && p < chi_max) cuts.push_back(p);
        }
    }
    cuts.push_back(chi_max);
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) acc += ts_integrate(kernel, cuts[i], cuts[i + 1]);
    return acc;
}

MlRegime MittagLeffler::regime(double z) const {
    check_z(z, "mittag_leffler");
    if (z == 0.0) return MlRegime::Closed;
    if (beta_ == 1.0 && gamma_ == 1.0) return MlRegime::Closed;
    double v = 0.0;
    if (std::fabs(z) <= cfg_.series_cutoff_radius && series(z, v)) return MlRegime::Series;
    if (asymptotic(z, v)) return MlRegime::Asymptotic;
    return beta_ == 1.0 ? MlRegime::Closed : MlRegime::Integral;
}

double MittagLeffler::operator()(double z) const {
    check_z(z, "mittag_leffler");
    if (z == 0.0) return rgamma(gamma_);
    if (beta_ == 1.0 && gamma_ == 1.0) return std::exp(z);
    double v = 0.0;
    if (std::fabs(z) <= cfg_.series_cutoff_radius && series(z, v)) return v;
    if (std::isinf(z)) return 0.0;
    if (asymptotic(z, v)) return v;
    return integral(z);
}

// ---------------------------------------------------------------------------

namespace {

const MittagLeffler& cached_evaluator(double beta, double gamma, const SpecFunConfig& cfg) {
    struct Entry {
        double beta, gamma, cutoff, tol;
        int terms;
        std::unique_ptr<MittagLeffler> ml;
    };
    thread_local std::vector<Entry> cache;
    for (const auto& e : cache) {
        if (e.beta == beta && e.gamma == gamma && e.cutoff == cfg.series_cutoff_radius && e.tol == cfg.abs_tol &&
            e.terms == cfg.asymptotic_terms) {
            return *e.ml;
        }
    }
    if (cache.size() >= 32) cache.clear();
    cache.push_back({beta, gamma, cfg.series_cutoff_radius, cfg.abs_tol, cfg.asymptotic_terms,
                     std::make_unique<MittagLeffler>(beta, gamma, cfg)});
    return *cache.back().ml;
}

}  // namespace

double mittag_leffler(double beta, double z, const SpecFunConfig& cfg) {
    check_beta(beta, "mittag_leffler");
    return cached_evaluator(beta, 1.0, cfg)(z);
}

double mittag_leffler2(double beta, double gamma, double z, const SpecFunConfig& cfg) {
    check_beta(beta, "mittag_leffler2");
    if (!(gamma > 0.0)) throw ParameterError("mittag_leffler2: gamma must be > 0");
    return cached_evaluator(beta, gamma, cfg)(z);
}

double ml_derivative(double beta, double z, const SpecFunConfig& cfg) {
    check_beta(beta, "ml_derivative");
    return cached_evaluator(beta, beta, cfg)(z) / beta;
}

// ---------------------------------------------------------------------------
// One-sided stable density, Zolotarev representation. The u-integral over (0, pi) is
// rewritten with u = pi - exp(-y): near u = pi the Kanter function blows up like
// (pi-u)^{-1/(1-beta)}, which becomes linear growth of log A in y.

namespace {

struct Zolotarev {
    double beta;
    double c;   // beta / (1-beta)

    double log_a(double y) const {
        const double d = std::exp(-y);
        const double u = kPi - d;
        return c * std::log(std::sin(beta * u)) + std::log(std::sin((1.0 - beta) * u)) -
               std::log(std::sin(d)) / (1.0 - beta);
    }

    // smallest y with log_a(y) >= level, on [lo, inf)
    double solve(double level, double lo) const {
        if (log_a(lo) >= level) return lo;
        double hi = lo + 1.0;
        while (log_a(hi) < level) hi += 2.0 * (hi - lo);
        for (int it = 0; it < 200 && hi - lo > 1e-12 * (1.0 + std::fabs(hi)); ++it) {
            const double mid = 0.5 * (lo + hi);
            (log_a(mid) < level ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
};

double p1_stable(double beta, double x, int nodes) {
    if (!(x > 0.0)) return 0.0;
    if (std::isinf(x)) return 0.0;
    const Zolotarev z{beta, beta / (1.0 - beta)};
    const double lx = std::log(x);
    const double level = z.c * lx;
    const double y_lo = -std::log(kPi);
    const double cut = std::log(110.0);
    if (z.log_a(y_lo + 1e-9) - level > cut) return 0.0;   // below exp(-110) everywhere
    const double y_peak = z.solve(level, y_lo);
    const double y_end = z.solve(level + cut, y_peak);
    const double log_pref = std::log(z.c / kPi) - lx / (1.0 - beta);
    auto integrand = [&](double y) {
        const double la = z.log_a(y);
        return std::exp(log_pref - y + la - std::exp(la - level));
    };
    const int n_left = std::max(1, (nodes + 1) / 2);
    const int n_right = std::max(1, nodes - n_left);
    double acc = 0.0;
    if (y_peak > y_lo) acc += quad::integrate_gl(integrand, y_lo, y_peak, n_left);
    acc += quad::integrate_gl(integrand, y_peak, y_end, n_right);
    return acc;
}

}  // namespace

double stable_density(double beta, double s, double w, const SpecFunConfig& cfg) {
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("stable_density: beta must lie in (0, 1)");
    if (!(s > 0.0)) throw ParameterError("stable_density: s must be > 0");
    if (cfg.quad_nodes < 2) throw ParameterError("stable_density: quad_nodes must be >= 2");
    if (!(w > 0.0)) return 0.0;
    const double scale = std::pow(s, -1.0 / beta);
    if (!std::isfinite(scale * w)) return 0.0;   // s -> 0: mass has not reached w yet
    return scale * p1_stable(beta, scale * w, cfg.quad_nodes);
}

}  // namespace fracsr::specfun
