#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fracsr/config.hpp"
#include "fracsr/model.hpp"
#include "fracsr/paths.hpp"
#include "fracsr/stable_rng.hpp"

namespace fracsr::mc {

struct EstimatorResult {
    double mean = 0.0;
    double std_error = 0.0;
    std::int64_t n = 0;
    double h = 0.0;                 // operational step; 0 for exact marginal sampling
    double bias_margin = 0.0;       // Richardson margin |mean(fine - coarse)| / (sqrt 2 - 1)
    double fine_minus_coarse = 0.0;
    double fmc_std_error = 0.0;
    std::int64_t zero_overshoots = 0;
    McMode mode = McMode::PathMode;
    std::string bias_note;

    // 3 SE plus the bias margin, the tolerance every comparison uses.
    double tolerance(double k = 3.0) const { return k * std_error + bias_margin; }
};

// Per-sample fine values and (optionally, same length) coupled coarse values.
EstimatorResult summarize(std::span<const double> fine, std::span<const double> coarse, double h, McMode mode,
                          std::int64_t zero_overshoots = 0);

// Stream id of a grid node: a hash of seed and the bit patterns of (t, x), so results do
// not depend on where the node sits in a grid.
std::uint64_t node_stream_id(std::uint64_t seed, double t, const Point& x, std::uint64_t tag = 0);

// body(i, rng) for i in [0, n) with rng = RngStream(seed, stream_id, i). Serial and OpenMP
// runs produce identical per-index work; the first failing index's exception is rethrown.
template <class Body>
void for_each_sample(std::int64_t n, const McConfig& cfg, std::uint64_t stream_id, Body&& body) {
    const RngStream root(cfg.seed, stream_id);
    if (cfg.exec == ExecPolicy::Serial) {
        for (std::int64_t i = 0; i < n; ++i) {
            RngStream r = root.split(static_cast<std::uint64_t>(i));
            body(i, r);
        }
        return;
    }
    std::int64_t first_bad = std::numeric_limits<std::int64_t>::max();
    std::exception_ptr err;
    const int workers = cfg.workers < 1 ? 1 : cfg.workers;
#pragma omp parallel for schedule(static) num_threads(workers)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            RngStream r = root.split(static_cast<std::uint64_t>(i));
            body(i, r);
        } catch (...) {
#pragma omp critical(fracsr_mc_error)
            {
                if (i < first_bad) {
                    first_bad = i;
                    err = std::current_exception();
                }
            }
        }
    }
    if (err) std::rethrow_exception(err);
}

EstimatorResult estimate_u_post(const Scenario& s, double t, const Point& x, const McConfig& cfg);
EstimatorResult estimate_u_pre(const Scenario& s, double t, const Point& x, const McConfig& cfg);
// Paired per-path lhs - rhs of the representation identity; uses tabulated f_phi.
EstimatorResult estimate_representation_gap(const Scenario& s, double t, const Point& x, const McConfig& cfg);

enum class Estimator { Post, Pre };

struct NodeResult {
    double t = 0.0;
    Point x;
    EstimatorResult result;
    std::string error;   // empty on success
};

std::vector<NodeResult> sweep_grid(const Scenario& s, const std::vector<double>& t_grid,
                                   const std::vector<Point>& x_grid, const McConfig& cfg, Estimator which);

void write_results_csv(const std::string& path, const std::vector<NodeResult>& nodes, int dim);

// Several path functionals E int_0^{tau} g_k ds along the same paths (common random numbers).
std::vector<EstimatorResult> estimate_path_functionals(const PathSpec& p, const std::vector<PathIntegrand>& gs,
                                                       const McConfig& cfg, std::uint64_t stream_id);

// E f(tau0(t)) and E f(W(t)); MarginalMode samples the exact laws, PathMode runs free paths.
EstimatorResult estimate_tau0_functional(double beta, double t, const std::function<double(double)>& f,
                                         const McConfig& cfg, std::uint64_t stream_id);
EstimatorResult estimate_overshoot_functional(double beta, double t, const std::function<double(double)>& f,
                                              const McConfig& cfg, std::uint64_t stream_id);
// Raw samples of W(t) (for distribution tests).
std::vector<double> sample_overshoots(double beta, double t, const McConfig& cfg, std::uint64_t stream_id);

std::string mode_name(McMode m);

}  // namespace fracsr::mc
