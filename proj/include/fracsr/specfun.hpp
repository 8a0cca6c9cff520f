#pragma once

#include <vector>

#include "fracsr/config.hpp"

namespace fracsr::specfun {

// Gamma function. Reflection formula for x < 1/2. Throws PoleError at 0, -1, -2, ...
double gamma_fn(double x);

// 1/Gamma(x), equal to 0 at the poles.
double rgamma(double x);

// One-parameter Mittag-Leffler E_beta(z), beta in (0,1], z <= 0.
double mittag_leffler(double beta, double z, const SpecFunConfig& cfg = {});

// Two-parameter Mittag-Leffler E_{beta,gamma}(z) = sum_k z^k / Gamma(beta k + gamma), z <= 0.
double mittag_leffler2(double beta, double gamma, double z, const SpecFunConfig& cfg = {});

// E_beta'(z) = E_{beta,beta}(z) / beta.
double ml_derivative(double beta, double z, const SpecFunConfig& cfg = {});

// Density of the standard one-sided beta-stable variable X^beta(s) (Laplace transform
// exp(-s k^beta)) at w. Zero for w <= 0.
double stable_density(double beta, double s, double w, const SpecFunConfig& cfg = {});

enum class MlRegime { Closed, Series, Asymptotic, Integral };

// Evaluator for fixed (beta, gamma). Series coefficients are cached, so repeated
// evaluation in inner loops is cheap. Not thread-safe; use one per thread.
class MittagLeffler {
public:
    MittagLeffler(double beta, double gamma, const SpecFunConfig& cfg = {});

    double operator()(double z) const;
    MlRegime regime(double z) const;

    // Individual routes, exposed so the regimes can be cross-checked.
    // `series` returns false when cancellation would exceed the tolerance.
    bool series(double z, double& out) const;
    bool asymptotic(double z, double& out) const;
    double integral(double z) const;

    double beta() const { return beta_; }
    double gamma() const { return gamma_; }

private:
    double closed_beta_one(double z) const;
    long double series_coeff(int k) const;

    double beta_;
    double gamma_;
    SpecFunConfig cfg_;
    mutable std::vector<long double> coeff_;   // 1/Gamma(beta k + gamma)
    std::vector<double> asym_coeff_;           // 1/Gamma(gamma - beta k), k = 1..N+1
    double asym_next_bound_;                   // bound on |1/Gamma(gamma - beta (N+1))|
};

}  // namespace fracsr::specfun
