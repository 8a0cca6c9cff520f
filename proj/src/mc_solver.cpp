#include "fracsr/mc_solver.hpp"

#include <bit>
#include <cmath>
#include <cstdio>

#include "fracsr/csv.hpp"
#include "fracsr/errors.hpp"
#include "fracsr/fracops.hpp"
#include "fracsr/stats.hpp"

namespace fracsr::mc {

namespace {

constexpr double kRichardson = 1.0 / (1.4142135623730951 - 1.0);   // order-1/2 worst case

struct FieldIntegrand {
    static constexpr bool active = true;
    const Field& f;
    double operator()(double, double r, const Point& y) const { return f.value(r, y); }
};

struct ForcingIntegrand {
    static constexpr bool active = true;
    const fracops::MemoryForcing& m;
    double operator()(double, double r, const Point& y) const { return m(r, y); }
};

struct MultiAccumulator {
    static constexpr bool active = true;
    const std::vector<PathIntegrand>& gs;
    std::vector<double> sum[2];
    explicit MultiAccumulator(const std::vector<PathIntegrand>& g) : gs(g) {
        sum[0].assign(g.size(), 0.0);
        sum[1].assign(g.size(), 0.0);
    }
    void add(int level, double w, double s, double r, const Point& y) {
        auto& acc = sum[level];
        for (std::size_t k = 0; k < gs.size(); ++k) acc[k] += w * gs[k](s, r, y);
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

void check_scenario(const Scenario& s) {
    const auto errs = validate_scenario(s);
    if (!errs.empty()) {
        std::string msg = "scenario invalid:";
        for (const auto& e : errs) msg += " " + e + ";";
        throw PreconditionError(msg);
    }
}

void check_point(const Scenario& s, double t, const Point& x, const McConfig& cfg, const char* who) {
    if (cfg.n_samples < 1) throw ParameterError(std::string(who) + ": n_samples must be >= 1");
    if (!(t > 0.0)) throw ParameterError(std::string(who) + ": t must be > 0");
    if (t > s.T) throw RangeError(std::string(who) + ": t = " + fmt(t) + " exceeds the horizon T = " + fmt(s.T));
    if (x.dim() != domain_dim(s.domain)) throw ShapeError(std::string(who) + ": point dimension does not match the domain");
}

PathSpec spec_for(const Scenario& s, double t, const Point& x, bool track_space) {
    PathSpec p;
    p.alpha = s.alpha;
    p.beta = s.beta;
    p.domain = s.domain;
    p.t = t;
    p.x = x;
    p.track_space = track_space;
    return p;
}

bool full_space(const Scenario& s) { return std::holds_alternative<FullSpace>(s.domain); }

bool constant_field(const Field& f) { return f.is_time_constant() && f.is_space_constant(); }

// Path-mode driver: value(sample, is_coarse) maps an exit sample to the estimator's summand.
template <class G, class Value>
EstimatorResult run_paths(const PathSpec& p, const G& g, const McConfig& cfg, std::uint64_t stream, Value&& value,
                          std::int64_t* zero_w_out = nullptr) {
    const auto n = static_cast<std::size_t>(cfg.n_samples);
    std::vector<double> fine(n), coarse(n);
    std::vector<unsigned char> zero_w(n, 0);
    for_each_sample(cfg.n_samples, cfg, stream, [&](std::int64_t i, RngStream& rng) {
        ExitSample c;
        const ExitSample f = simulate_path(p, g, cfg.path, rng, &c);
        const auto k = static_cast<std::size_t>(i);
        bool zw = false;
        fine[k] = value(f, zw);
        coarse[k] = value(c, zw);
        zero_w[k] = zw ? 1 : 0;
    });
    std::int64_t zw = 0;
    for (unsigned char z : zero_w) zw += z;
    if (zero_w_out) *zero_w_out = zw;
    return summarize(fine, coarse, cfg.path.h, McMode::PathMode, zw);
}

// W rounded to 0 by the float sum: treated as the smallest positive overshoot.
double negated_overshoot(const ExitSample& e, bool& zero_flag) {
    if (e.overshoot > 0.0) return -e.overshoot;
    zero_flag = true;
    return -std::numeric_limits<double>::denorm_min();
}

}  // namespace

std::string mode_name(McMode m) { return m == McMode::PathMode ? "path" : "marginal"; }

EstimatorResult summarize(std::span<const double> fine, std::span<const double> coarse, double h, McMode mode,
                          std::int64_t zero_overshoots) {
    EstimatorResult r;
    const auto m = stats::mean_se(fine);
    r.mean = m.mean;
    r.std_error = m.std_error;
    r.n = static_cast<std::int64_t>(fine.size());
    r.h = h;
    r.mode = mode;
    r.zero_overshoots = zero_overshoots;
    if (!coarse.empty()) {
        if (coarse.size() != fine.size()) throw ParameterError("summarize: fine/coarse size mismatch");
        std::vector<double> d(fine.size());
        for (std::size_t i = 0; i < d.size(); ++i) d[i] = fine[i] - coarse[i];
        const auto md = stats::mean_se(d);
        r.fine_minus_coarse = md.mean;
        r.fmc_std_error = md.std_error;
        r.bias_margin = kRichardson * std::fabs(md.mean);
        r.bias_note = "h=" + fmt(h) + "; Richardson margin=" + fmt(r.bias_margin) + " from mean(fine-coarse)=" +
                      fmt(md.mean) + " +- " + fmt(md.std_error) + " (coarse step 2h, same increments)";
    } else if (mode == McMode::MarginalMode) {
        r.h = 0.0;
        r.bias_note = "exact marginal sampler; no discretization bias";
    } else {
        r.bias_note = "h=" + fmt(h) + "; no coarse path, margin not measured";
    }
    if (zero_overshoots > 0) {
        r.bias_note += "; " + std::to_string(zero_overshoots) +
                       " samples had W rounded to 0 and used the smallest positive overshoot";
    }
    return r;
}

std::uint64_t node_stream_id(std::uint64_t seed, double t, const Point& x, std::uint64_t tag) {
    std::uint64_t h = mix_stream_id(seed, std::bit_cast<std::uint64_t>(t) ^ (tag * 0x9E3779B97F4A7C15ULL));
    h = mix_stream_id(h, static_cast<std::uint64_t>(x.dim()));
    for (int i = 0; i < x.dim(); ++i) h = mix_stream_id(h, std::bit_cast<std::uint64_t>(x[i] + 0.0));
    return h;
}

EstimatorResult estimate_u_post(const Scenario& s, double t, const Point& x, const McConfig& cfg) {
    check_scenario(s);
    check_point(s, t, x, cfg, "estimate_u_post");
    const std::uint64_t stream = node_stream_id(cfg.seed, t, x);
    const bool free_data = full_space(s) && s.phi0.is_space_constant() && s.f.is_space_constant();
    if (cfg.mode == McMode::MarginalMode) {
        if (!(free_data && constant_field(s.f))) {
            throw ParameterError(
                "estimate_u_post: MarginalMode needs a full-space scenario whose phi0 and f are constants "
                "(the estimator must depend on tau0 alone)");
        }
        const double c0 = s.phi0.value(0.0, x), cf = s.f.value(0.0, x);
        std::vector<double> v(static_cast<std::size_t>(cfg.n_samples));
        for_each_sample(cfg.n_samples, cfg, stream, [&](std::int64_t i, RngStream& rng) {
            v[static_cast<std::size_t>(i)] = c0 + cf * sample_tau0_marginal(s.beta, t, rng);
        });
        return summarize(v, {}, 0.0, McMode::MarginalMode);
    }
    if (!domain_contains(s.domain, x)) throw PreconditionError("estimate_u_post: x is not in the domain");
    const PathSpec p = spec_for(s, t, x, !free_data);
    auto value = [&](const ExitSample& e, bool&) {
        return (e.time_won == Winner::TimeFirst ? s.phi0.value(0.0, e.exit_position) : 0.0) + e.integral_value;
    };
    if (s.f.is_zero()) return run_paths(p, NoIntegrand{}, cfg, stream, value);
    return run_paths(p, FieldIntegrand{s.f}, cfg, stream, value);
}

EstimatorResult estimate_u_pre(const Scenario& s, double t, const Point& x, const McConfig& cfg) {
    check_scenario(s);
    check_point(s, t, x, cfg, "estimate_u_pre");
    if (!s.phi_past) throw PreconditionError("estimate_u_pre: scenario has no past field phi");
    const Field& phi = *s.phi_past;
    const std::uint64_t stream = node_stream_id(cfg.seed, t, x);
    const bool free_data = full_space(s) && phi.is_space_constant() && s.g.is_space_constant();
    if (cfg.mode == McMode::MarginalMode) {
        if (!(full_space(s) && phi.is_space_constant() && s.g.is_zero())) {
            throw ParameterError(
                "estimate_u_pre: MarginalMode needs a full-space scenario with space-constant phi and g = 0 "
                "(the estimator must depend on W alone)");
        }
        std::vector<double> v(static_cast<std::size_t>(cfg.n_samples));
        for_each_sample(cfg.n_samples, cfg, stream, [&](std::int64_t i, RngStream& rng) {
            v[static_cast<std::size_t>(i)] = phi.value(-sample_overshoot_marginal(s.beta, t, rng), x);
        });
        return summarize(v, {}, 0.0, McMode::MarginalMode);
    }
    if (!domain_contains(s.domain, x)) throw PreconditionError("estimate_u_pre: x is not in the domain");
    const PathSpec p = spec_for(s, t, x, !free_data);
    auto value = [&](const ExitSample& e, bool& zero_w) {
        double v = e.integral_value;
        if (e.time_won == Winner::TimeFirst) v += phi.value(negated_overshoot(e, zero_w), e.exit_position);
        return v;
    };
    if (s.g.is_zero()) return run_paths(p, NoIntegrand{}, cfg, stream, value);
    return run_paths(p, FieldIntegrand{s.g}, cfg, stream, value);
}

EstimatorResult estimate_representation_gap(const Scenario& s, double t, const Point& x, const McConfig& cfg) {
    check_scenario(s);
    check_point(s, t, x, cfg, "estimate_representation_gap");
    if (!s.phi_past) throw PreconditionError("estimate_representation_gap: scenario has no past field phi");
    if (cfg.mode != McMode::PathMode) throw ParameterError("estimate_representation_gap: needs PathMode");
    if (!domain_contains(s.domain, x)) throw PreconditionError("estimate_representation_gap: x is not in the domain");
    const Field& phi = *s.phi_past;
    const std::uint64_t stream = node_stream_id(cfg.seed, t, x);
    const bool free_data = full_space(s) && phi.is_space_constant();
    const PathSpec p = spec_for(s, t, x, !free_data);
    auto value = [&](const ExitSample& e, bool& zero_w) {
        double v = e.integral_value;
        if (e.time_won == Winner::TimeFirst) {
            v += phi.value(0.0, e.exit_position) - phi.value(negated_overshoot(e, zero_w), e.exit_position);
        }
        return v;
    };
    if (phi.is_time_constant()) return run_paths(p, NoIntegrand{}, cfg, stream, value);
    const fracops::MemoryForcing mf(phi, s.beta, t);
    return run_paths(p, ForcingIntegrand{mf}, cfg, stream, value);
}

std::vector<NodeResult> sweep_grid(const Scenario& s, const std::vector<double>& t_grid,
                                   const std::vector<Point>& x_grid, const McConfig& cfg, Estimator which) {
    std::vector<NodeResult> out;
    out.reserve(t_grid.size() * x_grid.size());
    for (double t : t_grid) {
        for (const Point& x : x_grid) {
            NodeResult node;
            node.t = t;
            node.x = x;
            try {
                node.result = which == Estimator::Post ? estimate_u_post(s, t, x, cfg) : estimate_u_pre(s, t, x, cfg);
            } catch (const std::exception& e) {
                node.error = e.what();
                node.result.mean = std::numeric_limits<double>::quiet_NaN();
                node.result.std_error = std::numeric_limits<double>::quiet_NaN();
                node.result.mode = cfg.mode;
                node.result.h = cfg.mode == McMode::PathMode ? cfg.path.h : 0.0;
            }
            out.push_back(std::move(node));
        }
    }
    return out;
}

void write_results_csv(const std::string& path, const std::vector<NodeResult>& nodes, int dim) {
    csv::Writer w(path);
    std::vector<std::string> head{"t"};
    for (int i = 1; i <= dim; ++i) head.push_back(dim == 1 ? "x" : "x_" + std::to_string(i));
    for (const char* c : {"mean", "std_error", "n", "h", "mode"}) head.emplace_back(c);
    w.row(head);
    for (const auto& nd : nodes) {
        std::vector<std::string> row{csv::num(nd.t)};
        for (int i = 0; i < dim; ++i) row.push_back(csv::num(nd.x[i]));
        row.push_back(csv::num(nd.result.mean));
        row.push_back(csv::num(nd.result.std_error));
        row.push_back(std::to_string(nd.result.n));
        row.push_back(csv::num(nd.result.h));
        row.push_back(mode_name(nd.result.mode));
        w.row(row);
    }
}

std::vector<EstimatorResult> estimate_path_functionals(const PathSpec& p, const std::vector<PathIntegrand>& gs,
                                                       const McConfig& cfg, std::uint64_t stream_id) {
    if (cfg.n_samples < 1) throw ParameterError("estimate_path_functionals: n_samples must be >= 1");
    check_path_inputs(p, cfg.path);
    const auto n = static_cast<std::size_t>(cfg.n_samples);
    const std::size_t K = gs.size();
    std::vector<std::vector<double>> fine(K, std::vector<double>(n)), coarse(K, std::vector<double>(n));
    for_each_sample(cfg.n_samples, cfg, stream_id, [&](std::int64_t i, RngStream& rng) {
        MultiAccumulator acc(gs);
        ExitSample c;
        simulate_path(p, acc, cfg.path, rng, &c);
        for (std::size_t k = 0; k < K; ++k) {
            fine[k][static_cast<std::size_t>(i)] = acc.sum[0][k];
            coarse[k][static_cast<std::size_t>(i)] = acc.sum[1][k];
        }
    });
    std::vector<EstimatorResult> out;
    for (std::size_t k = 0; k < K; ++k) out.push_back(summarize(fine[k], coarse[k], cfg.path.h, McMode::PathMode));
    return out;
}

namespace {

PathSpec free_path(double beta, double t) {
    PathSpec p;
    p.alpha = 2.0;
    p.beta = beta;
    p.domain = FullSpace{1};
    p.t = t;
    p.x = Point(0.0);
    p.track_space = false;
    return p;
}

}  // namespace

EstimatorResult estimate_tau0_functional(double beta, double t, const std::function<double(double)>& f,
                                         const McConfig& cfg, std::uint64_t stream_id) {
    if (cfg.n_samples < 1) throw ParameterError("estimate_tau0_functional: n_samples must be >= 1");
    const auto n = static_cast<std::size_t>(cfg.n_samples);
    if (cfg.mode == McMode::MarginalMode) {
        std::vector<double> v(n);
        for_each_sample(cfg.n_samples, cfg, stream_id, [&](std::int64_t i, RngStream& rng) {
            v[static_cast<std::size_t>(i)] = f(sample_tau0_marginal(beta, t, rng));
        });
        return summarize(v, {}, 0.0, McMode::MarginalMode);
    }
    const PathSpec p = free_path(beta, t);
    check_path_inputs(p, cfg.path);
    return run_paths(p, NoIntegrand{}, cfg, stream_id, [&](const ExitSample& e, bool&) { return f(e.tau0); });
}

EstimatorResult estimate_overshoot_functional(double beta, double t, const std::function<double(double)>& f,
                                              const McConfig& cfg, std::uint64_t stream_id) {
    if (cfg.n_samples < 1) throw ParameterError("estimate_overshoot_functional: n_samples must be >= 1");
    const auto n = static_cast<std::size_t>(cfg.n_samples);
    if (cfg.mode == McMode::MarginalMode) {
        std::vector<double> v(n);
        for_each_sample(cfg.n_samples, cfg, stream_id, [&](std::int64_t i, RngStream& rng) {
            v[static_cast<std::size_t>(i)] = f(sample_overshoot_marginal(beta, t, rng));
        });
        return summarize(v, {}, 0.0, McMode::MarginalMode);
    }
    const PathSpec p = free_path(beta, t);
    check_path_inputs(p, cfg.path);
    return run_paths(p, NoIntegrand{}, cfg, stream_id, [&](const ExitSample& e, bool& zw) {
        return f(-negated_overshoot(e, zw));
    });
}

std::vector<double> sample_overshoots(double beta, double t, const McConfig& cfg, std::uint64_t stream_id) {
    if (cfg.n_samples < 1) throw ParameterError("sample_overshoots: n_samples must be >= 1");
    std::vector<double> v(static_cast<std::size_t>(cfg.n_samples));
    if (cfg.mode == McMode::MarginalMode) {
        for_each_sample(cfg.n_samples, cfg, stream_id, [&](std::int64_t i, RngStream& rng) {
            v[static_cast<std::size_t>(i)] = sample_overshoot_marginal(beta, t, rng);
        });
        return v;
    }
    const PathSpec p = free_path(beta, t);
    check_path_inputs(p, cfg.path);
    for_each_sample(cfg.n_samples, cfg, stream_id, [&](std::int64_t i, RngStream& rng) {
        bool zw = false;
        v[static_cast<std::size_t>(i)] = -negated_overshoot(simulate_path(p, NoIntegrand{}, cfg.path, rng), zw);
    });
    return v;
}

}  // namespace fracsr::mc
