#include "fracsr/stable_rng.hpp"

#include <numbers>
#include <string>

#include <boost/math/special_functions/beta.hpp>

#include "fracsr/errors.hpp"

namespace fracsr {

namespace {

constexpr double kPi = std::numbers::pi;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}

void check_beta_open(double beta, const char* who) {
    if (!(beta > 0.0 && beta < 1.0)) {
        throw ParameterError(std::string(who) + ": beta must lie in (0, 1), got " + std::to_string(beta));
    }
}

}  // namespace

Philox4x64Ctr philox4x64(Philox4x64Ctr x, Philox4x64Key k) {
    constexpr std::uint64_t M0 = 0xD2E7470EE14C6C93ULL;
    constexpr std::uint64_t M1 = 0xCA5A826395121157ULL;
    constexpr std::uint64_t W0 = 0x9E3779B97F4A7C15ULL;
    constexpr std::uint64_t W1 = 0xBB67AE8584CAA73BULL;
    for (int r = 0; r < 10; ++r) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(M0, x[0], hi0, lo0);
        mulhilo(M1, x[2], hi1, lo1);
        x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
        k[0] += W0;
        k[1] += W1;
    }
    return x;
}

std::uint64_t RngStream::next_u64() {
    const std::uint64_t block = pos_ >> 2;
    if (block != cached_block_) {
        cache_ = philox4x64({block, substream_, 0, 0}, {seed_, stream_id_});
        cached_block_ = block;
    }
    return cache_[pos_++ & 3];
}

void RngStream::fill_uniform(double* out, std::size_t n) {
    std::size_t i = 0;
    while (i < n && (pos_ & 3) != 0) out[i++] = uniform();
    while (n - i >= 4) {
        const auto blk = philox4x64({pos_ >> 2, substream_, 0, 0}, {seed_, stream_id_});
        for (int l = 0; l < 4; ++l) out[i++] = (static_cast<double>(blk[static_cast<std::size_t>(l)] >> 11) + 0.5) * 0x1.0p-53;
        pos_ += 4;
    }
    while (i < n) out[i++] = uniform();
}

std::array<double, 2> RngStream::normal_pair() {
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return {r * std::cos(2.0 * kPi * u2), r * std::sin(2.0 * kPi * u2)};
}

std::uint64_t mix_stream_id(std::uint64_t seed, std::uint64_t tag) {
    std::uint64_t z = seed ^ (tag + 0x9E3779B97F4A7C15ULL + (seed << 6) + (seed >> 2));
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double sample_log_one_sided_stable(double beta, RngStream& rng) {
    check_beta_open(beta, "sample_one_sided_stable");
    const double u = kPi * rng.uniform();
    const double e = -std::log(rng.uniform());
    const double log_a = beta / (1.0 - beta) * std::log(std::sin(beta * u)) +
                         std::log(std::sin((1.0 - beta) * u)) - std::log(std::sin(u)) / (1.0 - beta);
    return (1.0 - beta) / beta * (log_a - std::log(e));
}

double sample_one_sided_stable(double beta, RngStream& rng) {
    return std::exp(sample_log_one_sided_stable(beta, rng));
}

Point sample_sym_stable_increment(double alpha, int d, double s, RngStream& rng) {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw ParameterError("sample_sym_stable_increment: alpha must lie in (0, 2]");
    if (d < 1 || d > kMaxDim) throw ParameterError("sample_sym_stable_increment: dimension must be 1..3");
    if (!(s > 0.0)) throw ParameterError("sample_sym_stable_increment: s must be > 0");
    // Gaussian subordination: X = sqrt(2A) Z with A = s^{2/alpha} S_{alpha/2}
    double var2 = 2.0 * s;
    if (alpha < 2.0) var2 = 2.0 * std::exp(2.0 / alpha * std::log(s) + sample_log_one_sided_stable(alpha / 2.0, rng));
    const double sd = std::sqrt(var2);
    Point x = Point::zeros(d);
    for (int i = 0; i < d; i += 2) {
        const auto z = rng.normal_pair();
        x[i] = sd * z[0];
        if (i + 1 < d) x[i + 1] = sd * z[1];
    }
    return x;
}

double sample_tau0_marginal(double beta, double t, RngStream& rng) {
    check_beta_open(beta, "sample_tau0_marginal");
    if (!(t >= 0.0)) throw ParameterError("sample_tau0_marginal: t must be >= 0");
    if (t == 0.0) return 0.0;
    return std::exp(beta * (std::log(t) - sample_log_one_sided_stable(beta, rng)));
}

double overshoot_cdf(double beta, double t, double w) {
    check_beta_open(beta, "overshoot_cdf");
    if (!(t > 0.0)) throw ParameterError("overshoot_cdf: t must be > 0");
    if (!(w > 0.0)) return 0.0;
    if (std::isinf(w)) return 1.0;
    const double v = w / t;
    return boost::math::ibeta(1.0 - beta, beta, v / (1.0 + v));
}

double sample_overshoot_marginal(double beta, double t, RngStream& rng) {
    check_beta_open(beta, "sample_overshoot_marginal");
    if (!(t > 0.0)) throw ParameterError("sample_overshoot_marginal: t must be > 0");
    const double u = rng.uniform();
    // bisection in y = v/(1+v) on (0,1); stop once the bracket is 1e-12 wide in w
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 400; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (boost::math::ibeta(1.0 - beta, beta, mid) < u) {
            lo = mid;
        } else {
            hi = mid;
        }
        const double w_lo = lo / (1.0 - lo);
        const double w_hi = hi < 1.0 ? hi / (1.0 - hi) : INFINITY;
        if (w_hi - w_lo <= 1e-12 * std::max(1.0, w_lo)) break;
    }
    const double y = 0.5 * (lo + hi);
    double v = y / (1.0 - y);
    if (!(v > 0.0)) v = std::numeric_limits<double>::denorm_min();
    return t * v;
}

}  // namespace fracsr
