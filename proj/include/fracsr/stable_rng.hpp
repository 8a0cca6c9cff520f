#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

#include "fracsr/model.hpp"

namespace fracsr {

// Philox4x64-10 block function.
using Philox4x64Ctr = std::array<std::uint64_t, 4>;
using Philox4x64Key = std::array<std::uint64_t, 2>;
Philox4x64Ctr philox4x64(Philox4x64Ctr ctr, Philox4x64Key key);

// Counter-based stream. The k-th 64-bit draw of (seed, stream_id, substream) is
// philox(ctr = {k/4, substream, 0, 0}, key = {seed, stream_id}) lane k%4, so any draw
// can be recomputed without replaying the stream.
class RngStream {
public:
    RngStream() = default;
    RngStream(std::uint64_t seed, std::uint64_t stream_id, std::uint64_t substream = 0)
        : seed_(seed), stream_id_(stream_id), substream_(substream) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    std::uint64_t substream() const { return substream_; }
    std::uint64_t position() const { return pos_; }   // draws consumed so far

    // Fresh stream for a sub-unit of work (e.g. one Monte-Carlo sample).
    RngStream split(std::uint64_t substream) const { return RngStream(seed_, stream_id_, substream); }

    std::uint64_t next_u64();
    // Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }
    // Same values as n successive uniform() calls, generated block-wise.
    void fill_uniform(double* out, std::size_t n);
    // Standard normal by Box-Muller; consumes two draws and returns both variates.
    std::array<double, 2> normal_pair();
    double normal() { return normal_pair()[0]; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_id_ = 0;
    std::uint64_t substream_ = 0;
    std::uint64_t pos_ = 0;
    std::uint64_t cached_block_ = ~std::uint64_t{0};
    Philox4x64Ctr cache_{};
};

// Stream id derived from a seed and a tag by mixing (splitmix64 finalizer).
std::uint64_t mix_stream_id(std::uint64_t seed, std::uint64_t tag);

// Standard one-sided beta-stable variate: E exp(-k S) = exp(-k^beta). Kanter's representation.
double sample_one_sided_stable(double beta, RngStream& rng);

// log S for the same draw; avoids overflow for small beta.
double sample_log_one_sided_stable(double beta, RngStream& rng);

// Increment over operational time s of the rotationally symmetric alpha-stable process
// with E exp(i k.X) = exp(-s |k|^alpha). For alpha = 2: N(0, 2s) per coordinate.
Point sample_sym_stable_increment(double alpha, int d, double s, RngStream& rng);

// tau0(t) = (t/S)^beta in law.
double sample_tau0_marginal(double beta, double t, RngStream& rng);

// W(t)/t has density sin(beta pi)/pi * w^{-beta} (1+w)^{-1}; inverse CDF by bisection.
double sample_overshoot_marginal(double beta, double t, RngStream& rng);

// P[W(t)/t <= w] = I_{w/(1+w)}(1-beta, beta).
double overshoot_cdf(double beta, double t, double w);

}  // namespace fracsr
