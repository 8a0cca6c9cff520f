#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <type_traits>
#include <vector>

#include "fracsr/batch_kernels.hpp"
#include "fracsr/config.hpp"
#include "fracsr/errors.hpp"
#include "fracsr/model.hpp"
#include "fracsr/stable_rng.hpp"

namespace fracsr {

enum class Winner { TimeFirst, SpaceFirst };

struct ExitSample {
    double tau0 = std::numeric_limits<double>::infinity();       // operational time, +inf if space won
    double tauOmega = std::numeric_limits<double>::infinity();   // +inf if time won
    Winner time_won = Winner::TimeFirst;
    double overshoot = 0.0;                                       // W = sum - t, TimeFirst only
    Point exit_position;
    double integral_value = 0.0;
    std::int64_t steps_used = 0;
};

class TruncationError : public Error {
public:
    TruncationError(const std::string& what, ExitSample partial) : Error(what), partial_(partial) {}
    const ExitSample& partial() const { return partial_; }

private:
    ExitSample partial_;
};

// Everything a path needs besides the integrand and the stream.
struct PathSpec {
    double alpha = 2.0;
    double beta = 0.5;
    DomainShape domain = FullSpace{1};
    double t = 1.0;
    Point x;
    // false: skip spatial increments (FullSpace with position-independent data).
    bool track_space = true;
};

// Path integrand g(s, r, y): operational time s, remaining time r = t - X^beta(s), position y.
using PathIntegrand = std::function<double(double s, double r, const Point& y)>;

struct NoIntegrand {
    static constexpr bool active = false;
    double operator()(double, double, const Point&) const { return 0.0; }
};

template <class G>
struct ActiveIntegrand {
    static constexpr bool active = true;
    const G& g;
    double operator()(double s, double r, const Point& y) const { return g(s, r, y); }
};

void check_path_inputs(const PathSpec& p, const PathConfig& cfg);

// Increments for blocks of kBlock steps: subordinator h^{1/beta} S_k and spatial
// sqrt(2 A_k) Z_k (A_k = h for alpha = 2). The draw layout per block is fixed, so a path
// is a pure function of its stream.
class StepSource {
public:
    static constexpr int kBlock = 64;

    StepSource(const PathSpec& p, double h)
        : beta_(p.beta), alpha_(p.alpha), d_(domain_dim(p.domain)), track_(p.track_space),
          hb_(std::pow(h, 1.0 / p.beta)), log_h_alpha_(2.0 / p.alpha * std::log(h)), sd2_(std::sqrt(2.0 * h)) {}

    // Advance one step; returns the subordinator increment and writes the spatial one.
    double next(RngStream& rng, double* dx) {
        if (idx_ == kBlock) refill(rng);
        if (track_) {
            for (int i = 0; i < d_; ++i) dx[i] = dx_[i][idx_];
        }
        return dsub_[idx_++];
    }

private:
    void refill(RngStream& rng) {
        constexpr int B = kBlock;
        rng.fill_uniform(u_, 2 * B);
        batch::one_sided_stable(beta_, hb_, u_, u_ + B, dsub_, B);
        if (track_) {
            if (alpha_ < 2.0) {
                rng.fill_uniform(u_, 2 * B);
                batch::log_one_sided_stable(alpha_ / 2.0, log_h_alpha_, u_, u_ + B, tmp_, B);
                batch::sqrt_two_exp(tmp_, sd_, B);
            } else {
                for (int b = 0; b < B; ++b) sd_[b] = sd2_;
            }
            const int pairs = d_ * B / 2;
            rng.fill_uniform(u_, static_cast<std::size_t>(2 * pairs));
            batch::box_muller(u_, u_ + pairs, z_, z_ + pairs, pairs);
            for (int i = 0; i < d_; ++i) {
                for (int b = 0; b < B; ++b) dx_[i][b] = sd_[b] * z_[i * B + b];
            }
        }
        idx_ = 0;
    }

    double beta_, alpha_;
    int d_;
    bool track_;
    double hb_, log_h_alpha_, sd2_;
    int idx_ = kBlock;
    double u_[kMaxDim * kBlock];
    double z_[kMaxDim * kBlock];
    double tmp_[kBlock];
    double sd_[kBlock];
    double dsub_[kBlock];
    double dx_[kMaxDim][kBlock];
};

// Fine path on the grid s_k = k h and, optionally, the coarse path on s_k = 2k h built from
// the same increments (pairs summed). The coarse sample is only used for bias estimation.
// G is either a scalar integrand (NoIntegrand, ActiveIntegrand) or an accumulator with
// add(level, weight, s, r, y), level 0 = fine, 1 = coarse, which keeps its own sums.
template <class G>
ExitSample simulate_path(const PathSpec& p, G&& g, const PathConfig& cfg, RngStream& rng,
                         ExitSample* coarse = nullptr) {
    using GT = std::remove_cvref_t<G>;
    constexpr bool accumulates = requires(GT& a, const Point& y) { a.add(0, 0.0, 0.0, 0.0, y); };
    const double h = cfg.h;
    const int d = domain_dim(p.domain);
    const bool bounded = is_bounded(p.domain);
    StepSource steps(p, h);

    ExitSample fine;
    fine.exit_position = p.x;
    bool fine_done = false, coarse_done = coarse == nullptr;
    if (coarse) {
        *coarse = ExitSample{};
        coarse->exit_position = p.x;
    }

    double sum = 0.0;
    Point x = p.x;
    double c_prev_sum = 0.0;   // coarse left endpoint
    Point c_prev_x = p.x;
    double dx[kMaxDim] = {0.0, 0.0, 0.0};

    std::int64_t k = 0;
    while (!(fine_done && coarse_done)) {
        if (k >= cfg.max_steps) {
            fine.steps_used = k;
            throw TruncationError("path exceeded max_steps = " + std::to_string(cfg.max_steps) +
                                      " (h*max_steps bounds the operational time)",
                                  fine);
        }
        ++k;
        const double prev_sum = sum;
        const Point prev_x = x;
        sum += steps.next(rng, dx);
        if (p.track_space) {
            for (int i = 0; i < d; ++i) x[i] += dx[i];
        }
        if (!fine_done) {
            if constexpr (accumulates) {
                g.add(0, h, (k - 1) * h, p.t - prev_sum, prev_x);
            } else if constexpr (GT::active) {
                fine.integral_value += h * g((k - 1) * h, p.t - prev_sum, prev_x);
            }
            if (bounded && !contains_unchecked(p.domain, x)) {
                fine.time_won = Winner::SpaceFirst;
                fine.tauOmega = k * h;
                fine.exit_position = x;
                fine.steps_used = k;
                fine_done = true;
            } else if (sum >= p.t) {
                fine.time_won = Winner::TimeFirst;
                fine.tau0 = k * h;
                fine.overshoot = sum - p.t;
                fine.exit_position = x;
                fine.steps_used = k;
                fine_done = true;
            }
        }
        if (!coarse_done && k % 2 == 0) {
            if constexpr (accumulates) {
                g.add(1, 2.0 * h, (k - 2) * h, p.t - c_prev_sum, c_prev_x);
            } else if constexpr (GT::active) {
                coarse->integral_value += 2.0 * h * g((k - 2) * h, p.t - c_prev_sum, c_prev_x);
            }
            if (bounded && !contains_unchecked(p.domain, x)) {
                coarse->time_won = Winner::SpaceFirst;
                coarse->tauOmega = k * h;
                coarse->exit_position = x;
                coarse->steps_used = k / 2;
                coarse_done = true;
            } else if (sum >= p.t) {
                coarse->time_won = Winner::TimeFirst;
                coarse->tau0 = k * h;
                coarse->overshoot = sum - p.t;
                coarse->exit_position = x;
                coarse->steps_used = k / 2;
                coarse_done = true;
            }
            c_prev_sum = sum;
            c_prev_x = x;
        }
    }
    return fine;
}

// Single path for the point (t, x). Throws PreconditionError if x is not in the domain.
ExitSample run_exit_sample(const PathSpec& p, const PathIntegrand& integrand, const PathConfig& cfg,
                           RngStream& rng);

// Same with a field integrand g(t - X^beta(s), X(s)).
ExitSample run_exit_sample(const PathSpec& p, const Field* integrand, const PathConfig& cfg, RngStream& rng);

struct TrajectoryRow {
    double t = 0.0;
    double tau0 = 0.0;
    double overshoot = 0.0;
    Point y;   // X(tau0(t)); NaN coordinates once the path has left the domain
};

// One subordinator/position path observed at increasing barriers obs_times.
std::vector<TrajectoryRow> record_trajectory(const PathSpec& p, const std::vector<double>& obs_times,
                                             const PathConfig& cfg, RngStream& rng);

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows, int dim);

}  // namespace fracsr
