#include "fracsr/paths.hpp"

#include <string>

#include "fracsr/csv.hpp"

namespace fracsr {

void check_path_inputs(const PathSpec& p, const PathConfig& cfg) {
    if (!(p.alpha > 0.0 && p.alpha <= 2.0)) throw ParameterError("paths: alpha must lie in (0, 2]");
    if (!(p.beta > 0.0 && p.beta < 1.0)) throw ParameterError("paths: beta must lie in (0, 1)");
    if (!(p.t > 0.0) || !std::isfinite(p.t)) throw ParameterError("paths: t must be a finite positive number");
    if (!(cfg.h > 0.0)) throw ParameterError("paths: step h must be > 0");
    if (cfg.max_steps < 1) throw ParameterError("paths: max_steps must be >= 1");
    if (p.x.dim() != domain_dim(p.domain)) throw ShapeError("paths: starting point dimension does not match the domain");
    if (!domain_contains(p.domain, p.x)) throw PreconditionError("paths: starting point x is not in the open domain");
}

ExitSample run_exit_sample(const PathSpec& p, const PathIntegrand& integrand, const PathConfig& cfg,
                           RngStream& rng) {
    check_path_inputs(p, cfg);
    if (!integrand) return simulate_path(p, NoIntegrand{}, cfg, rng);
    return simulate_path(p, ActiveIntegrand<PathIntegrand>{integrand}, cfg, rng);
}

ExitSample run_exit_sample(const PathSpec& p, const Field* integrand, const PathConfig& cfg, RngStream& rng) {
    check_path_inputs(p, cfg);
    if (integrand == nullptr || integrand->is_zero()) return simulate_path(p, NoIntegrand{}, cfg, rng);
    auto g = [integrand](double, double r, const Point& y) { return integrand->value(r, y); };
    return simulate_path(p, ActiveIntegrand<decltype(g)>{g}, cfg, rng);
}

std::vector<TrajectoryRow> record_trajectory(const PathSpec& p, const std::vector<double>& obs_times,
                                             const PathConfig& cfg, RngStream& rng) {
    for (std::size_t i = 0; i < obs_times.size(); ++i) {
        if (!(obs_times[i] > 0.0)) throw ParameterError("record_trajectory: observation times must be > 0");
        if (i > 0 && !(obs_times[i] > obs_times[i - 1])) {
            throw ParameterError("record_trajectory: observation times must be strictly increasing");
        }
    }
    PathSpec spec = p;
    if (!obs_times.empty()) spec.t = obs_times.back();
    check_path_inputs(spec, cfg);
    const double h = cfg.h;
    const int d = domain_dim(p.domain);
    const bool bounded = is_bounded(p.domain);
    StepSource steps(spec, h);
    double dx[kMaxDim] = {0.0, 0.0, 0.0};

    std::vector<TrajectoryRow> rows;
    rows.reserve(obs_times.size());
    double sum = 0.0;
    Point x = p.x;
    bool killed = false;
    std::int64_t k = 0;
    std::size_t i = 0;
    while (i < obs_times.size()) {
        if (k >= cfg.max_steps) {
            ExitSample partial;
            partial.steps_used = k;
            partial.exit_position = x;
            throw TruncationError("record_trajectory exceeded max_steps", partial);
        }
        ++k;
        sum += steps.next(rng, dx);
        if (p.track_space) {
            for (int j = 0; j < d; ++j) x[j] += dx[j];
        }
        if (bounded && !killed && !contains_unchecked(p.domain, x)) killed = true;
        // all barriers crossed by this jump share tau0 and the frozen position
        while (i < obs_times.size() && sum >= obs_times[i]) {
            TrajectoryRow r;
            r.t = obs_times[i];
            r.tau0 = k * h;
            r.overshoot = sum - obs_times[i];
            r.y = x;
            if (killed) {
                for (int j = 0; j < d; ++j) r.y[j] = std::numeric_limits<double>::quiet_NaN();
            }
            rows.push_back(r);
            ++i;
        }
    }
    return rows;
}

void write_trajectory_csv(const std::string& path, const std::vector<TrajectoryRow>& rows, int dim) {
    csv::Writer w(path);
    std::vector<std::string> head{"t", "tau0", "overshoot"};
    for (int j = 1; j <= dim; ++j) head.push_back("y_" + std::to_string(j));
    w.row(head);
    for (const auto& r : rows) {
        std::vector<std::string> cells{csv::num(r.t), csv::num(r.tau0), csv::num(r.overshoot)};
        for (int j = 0; j < dim; ++j) cells.push_back(csv::num(r.y[j]));
        w.row(cells);
    }
}

}  // namespace fracsr
