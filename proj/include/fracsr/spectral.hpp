#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracsr/config.hpp"
#include "fracsr/fracops.hpp"
#include "fracsr/model.hpp"
#include "fracsr/quadrature.hpp"

namespace fracsr::spectral {

// Dirichlet eigenpairs of the Laplacian on (a, b), modes n = 1..n_modes.
struct SpectralBasis {
    double a = 0.0, b = 1.0;
    int n_modes = 64;

    static SpectralBasis on(const Interval& iv, int n_modes);
    double length() const { return b - a; }
    double lambda(int n) const;
    double psi(int n, double x) const;
};

// <field(t0, .), psi_n>, n = 1..basis.n_modes, by Gauss-Legendre with `nodes` points.
// Space-only fields are projected as they are; other fields throw ParameterError.
std::vector<double> project(const SpectralBasis& basis, const Field& field, int nodes = 512);
std::vector<double> project(const SpectralBasis& basis, const SpaceForm& q, int nodes = 512);

// Quadrature on [0, U] graded geometrically toward 0 (kernel scale 1/lambda_max) and toward U.
quad::MappedRule kernel_rule(double U, double lambda_max, int total_nodes);

// Phi_{f,lambda}(t) = int_0^{t^beta} f(t - u^{1/beta}) E_beta'(-lambda u) du.
double phi_kernel(double beta, double lambda, const std::function<double(double)>& f, double t,
                  const SpectralConfig& cfg = {});

// Separable forcing term time(r) * space(x); coeffs are the projections of space.
struct ForcingTerm {
    std::function<double(double)> time;
    std::vector<double> coeffs;
    std::string label;
};

// Caputo problem on an interval in modal form.
struct ModalProblem {
    double beta = 0.5;
    SpectralBasis basis;
    std::vector<double> initial;          // projections of phi_0
    std::vector<ForcingTerm> forcing;
};

// (postRL): phi_0 and f of the scenario. CapabilityError unless alpha = 2 on an interval.
ModalProblem post_problem(const Scenario& s, const SpectralConfig& cfg, int n_modes);
// (preRL) reduced to a Caputo problem: phi_0 = phi(0, .), forcing f_phi + g.
ModalProblem pre_problem(const Scenario& s, const SpectralConfig& cfg, int n_modes);

// Series evaluator. Only the first n_use modes enter value(); the rest feed tail().
class SpectralSolution {
public:
    SpectralSolution(ModalProblem problem, const SpectralConfig& cfg, int n_use = 0);

    const ModalProblem& problem() const { return p_; }
    // c_n(t), n = 1..n_modes.
    std::vector<double> coefficients(double t) const;
    double value(double t, double x) const;
    double value_xx(double t, double x) const;
    // sum over the unused modes of |c_n(t) psi_n(x)|.
    double tail(double t, double x) const;
    int n_use() const { return n_use_; }
    fracops::SolutionView view() const;

private:
    const std::vector<double>& cached(double t) const;

    ModalProblem p_;
    SpectralConfig cfg_;
    int n_use_;
    mutable double cache_t_ = -1.0;
    mutable std::vector<double> cache_c_;
};

struct SolutionRow {
    double t = 0.0, x = 0.0, u = 0.0, tail_bound = 0.0;
};

struct SolutionTable {
    std::vector<SolutionRow> rows;   // t-major order
    double max_tail = 0.0;
    bool tail_within_tol = true;     // max_tail <= cfg.tail_tol
    int n_modes = 0;
};

enum class Problem { Post, Pre };

// Truncated series on the grid. The tail bound at each node is sum_{n_modes < n <= 2 n_modes}
// |c_n(t) psi_n(x)|, the next block of modes computed the same way.
SolutionTable solve_spectral(const Scenario& s, const std::vector<double>& t_grid, const std::vector<double>& x_grid,
                             const SpectralConfig& cfg, Problem which = Problem::Post);

void write_solution_csv(const std::string& path, const SolutionTable& table);

// Dirichlet heat kernel sum_n exp(-lambda_n s) psi_n(x) psi_n(y), truncated once the
// remaining sum is below cfg.tail_tol.
double heat_kernel(const SpectralBasis& basis, double s, double x, double y, const SpectralConfig& cfg = {});

// q(w; x, y) = sum_n psi_n(x) psi_n(y) w^{beta-1} E_{beta,beta}(-lambda_n w^beta).
double subordinate_kernel(const SpectralBasis& basis, double beta, double w, double x, double y,
                          const SpectralConfig& cfg = {});
// Same for many y at once (the Mittag-Leffler factors are shared).
std::vector<double> subordinate_kernel_row(const SpectralBasis& basis, double beta, double w, double x,
                                           const std::vector<double>& ys, const SpectralConfig& cfg = {});

// H(r, y) = int_0^t nu(z - r) q(t - z; x, y) dz with nu(v) = -v^{-1-beta}/Gamma(-beta), r < 0.
double h_kernel(const SpectralBasis& basis, double beta, double t, double x, double r, double y,
                const SpectralConfig& cfg = {});

// Forcing contribution int_0^t int_Omega g(z, y) q(t - z; x, y) dy dz by double quadrature
// with the pointwise subordinate kernel.
double kernel_route_forcing(const Scenario& s, const Field& g, double t, double x, const SpectralConfig& cfg = {});

}  // namespace fracsr::spectral
