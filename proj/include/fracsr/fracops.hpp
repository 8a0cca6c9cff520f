#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracsr/model.hpp"

namespace fracsr::fracops {

struct GridFunction1D {
    std::vector<double> nodes;   // strictly increasing
    std::vector<double> values;
};

// Throws GridError unless nodes are strictly increasing, sizes agree and size >= min_nodes.
void check_grid(const GridFunction1D& u, std::size_t min_nodes = 3);

// Nodes t_j = t (j/n)^grading, j = 0..n, with values u(t_j).
GridFunction1D sample_graded(const std::function<double(double)>& u, double t, int n, double grading = 1.0);

// L1 Caputo derivative at node index n >= 1 (piecewise-linear u, exact kernel moments).
double caputo_derivative(const GridFunction1D& u, std::size_t n, double beta);
// Same at a node given by value; RangeError if t is not a node.
double caputo_derivative_at(const GridFunction1D& u, double t, double beta);

enum class TailKind { None, Analytic, Bounded };

struct FPhiResult {
    double value = 0.0;
    double tail = 0.0;                    // contribution of v > K included in value
    TailKind tail_kind = TailKind::None;
    double tail_bound = 0.0;              // |error| of the tail term (0 when analytic)
};

constexpr double kDefaultTailCut = 64.0;

// Memory forcing (beta/Gamma(1-beta)) int_0^inf (phi(-v,x) - phi(0,x)) (t+v)^{-1-beta} dv.
FPhiResult compute_f_phi(const Field& phi, double beta, double t, const Point& x, double K = kDefaultTailCut);

// Time factor F_p(t) for a separable phi = p(t) q(x): f_phi(t, x) = F_p(t) q(x).
FPhiResult f_phi_time_factor(const TimePart& p, double beta, double t, double K = kDefaultTailCut);

// Tabulated f_phi for inner loops: F_p on a uniform grid in s = r^{1-beta}, r in [0, t_max],
// linear interpolation. Separable catalog fields only.
class MemoryForcing {
public:
    MemoryForcing(const Field& phi, double beta, double t_max, int intervals = 2048,
                  double K = kDefaultTailCut);
    double time_factor(double r) const;
    double operator()(double r, const Point& y) const;
    double t_max() const { return t_max_; }
    bool is_zero() const { return zero_; }

private:
    SpaceForm q_;
    double beta_, t_max_, ds_;
    bool zero_ = false;
    std::vector<double> table_;
};

// I^{1-beta}_T phi(s) = int_s^T phi(r) (r-s)^{-beta} / Gamma(1-beta) dr.
// Grid version: exact for the piecewise-linear interpolant; T = last node.
double rl_integral(const GridFunction1D& phi, double s, double beta);
// Callable version via u = (r-s)^{1-beta}; composite Gauss-Legendre with `panels` x 32 nodes.
double rl_integral(const std::function<double(double)>& phi, double T, double s, double beta, int panels = 8);
// d/ds I^{1-beta}_T phi(s) = I^{1-beta}_T[phi'](s) - phi(T)(T-s)^{-beta}/Gamma(1-beta).
double rl_integral_derivative(const std::function<double(double)>& phi, const std::function<double(double)>& dphi,
                              double T, double s, double beta, int panels = 8);

// Smooth bump exp(1 - 1/(1 - xi^2)) on (lo, hi), xi the affine image in (-1, 1); peak value 1.
struct Bump1D {
    double lo = 0.0, hi = 1.0;
    double operator()(double t) const;
    double d1(double t) const;
    double d2(double t) const;
};

// Test function phi(t, x) = b_t(t) b_x(x).
struct TestBump {
    Bump1D time, space;
};

// Default battery of 5 bumps inside (0, T) x (a, b).
std::vector<TestBump> default_battery(double T, double a, double b);

// u(t, x) together with its second space derivative, for alpha = 2 on an interval.
struct SolutionView {
    std::function<double(double, double)> u;
    std::function<double(double, double)> u_xx;
};

struct WeakResidualConfig {
    int time_nodes = 256;
    int space_nodes = 256;
    int rl_panels = 8;
};

// max over the battery of |<u, d_s I phi + phi_xx> + <f, phi> + int u(0,x) I phi(0,x) dx|.
double weak_residual(const SolutionView& u, const Scenario& s, const std::vector<TestBump>& battery,
                     const WeakResidualConfig& cfg = {});
// Per-bump signed residuals.
std::vector<double> weak_residuals(const SolutionView& u, const Scenario& s, const std::vector<TestBump>& battery,
                                   const WeakResidualConfig& cfg = {});

struct ProbeResidual {
    double t = 0.0, x = 0.0;
    double residual = 0.0;   // D^beta u - u_xx - f
    int grid_size = 0;
};

// Caputo by L1 on a graded grid of `grid_size` intervals on [0, t] per probe.
std::vector<ProbeResidual> classical_residuals(const SolutionView& u, const Scenario& s,
                                               const std::vector<std::pair<double, double>>& probes, int grid_size);
double classical_residual(const SolutionView& u, const Scenario& s,
                          const std::vector<std::pair<double, double>>& probes, int grid_size);

// Grading exponent that restores order 2 - beta for u ~ c0 + c1 t^beta.
double default_grading(double beta);

void write_residual_csv(const std::string& path, const std::vector<ProbeResidual>& rows);

}  // namespace fracsr::fracops
