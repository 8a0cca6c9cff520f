#include <doctest.h>

#include <cmath>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "fracsr/errors.hpp"
#include "fracsr/specfun.hpp"
#include "fracsr/stable_rng.hpp"
#include "fracsr/stats.hpp"

using namespace fracsr;

namespace {

constexpr int kN = 100000;

template <class F>
stats::MeanSe mc_mean(std::uint64_t stream, F&& draw) {
    RngStream rng(20240531, stream);
    std::vector<double> v(kN);
    for (auto& x : v) x = draw(rng);
    return stats::mean_se(v);
}

void check_within_3se(const stats::MeanSe& m, double expected) {
    CAPTURE(m.mean);
    CAPTURE(m.std_error);
    CAPTURE(expected);
    CHECK(std::fabs(m.mean - expected) <= 3.0 * m.std_error);
}

}  // namespace

TEST_CASE("philox4x64-10 known-answer vectors") {
    const auto z = philox4x64({0, 0, 0, 0}, {0, 0});
    CHECK(z[0] == 0x16554d9eca36314cULL);
    CHECK(z[1] == 0xdb20fe9d672d0fdcULL);
    CHECK(z[2] == 0xd7e772cee186176bULL);
    CHECK(z[3] == 0x7e68b68aec7ba23bULL);
    const std::uint64_t f = ~0ULL;
    const auto o = philox4x64({f, f, f, f}, {f, f});
    CHECK(o[0] == 0x87b092c3013fe90bULL);
    CHECK(o[1] == 0x438c3c67be8d0224ULL);
    CHECK(o[2] == 0x9cc7d7c69cd777b6ULL);
    CHECK(o[3] == 0xa09caebf594f0ba0ULL);
    const auto p = philox4x64({0x243f6a8885a308d3ULL, 0x13198a2e03707344ULL, 0xa4093822299f31d0ULL,
                               0x082efa98ec4e6c89ULL},
                              {0x452821e638d01377ULL, 0xbe5466cf34e90c6cULL});
    CHECK(p[0] == 0xa528f45403e61d95ULL);
    CHECK(p[1] == 0x38c72dbd566e9788ULL);
    CHECK(p[2] == 0xa5a1610e72fd18b5ULL);
    CHECK(p[3] == 0x57bd43b5e52b7fe6ULL);
}

TEST_CASE("streams are pure functions of (seed, id, position)") {
    RngStream a(7, 3), b(7, 3);
    std::vector<std::uint64_t> xs;
    for (int i = 0; i < 37; ++i) xs.push_back(a.next_u64());
    for (int i = 0; i < 37; ++i) CHECK(b.next_u64() == xs[static_cast<std::size_t>(i)]);
    // draw k recomputed from the block function
    const auto blk = philox4x64({9 / 4, 0, 0, 0}, {7, 3});
    CHECK(xs[9] == blk[9 % 4]);
    RngStream c(7, 4);
    CHECK(c.next_u64() != xs[0]);
    RngStream d = a.split(5);
    CHECK(d.position() == 0);
    CHECK(d.next_u64() == philox4x64({0, 5, 0, 0}, {7, 3})[0]);
}

TEST_CASE("uniforms lie in the open unit interval") {
    RngStream r(1, 1);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
}

TEST_CASE("one-sided stable: Laplace transform, Levy CDF, positivity") {
    check_within_3se(mc_mean(1, [](RngStream& r) { return std::exp(-sample_one_sided_stable(0.5, r)); }),
                     std::exp(-1.0));
    check_within_3se(mc_mean(2, [](RngStream& r) { return sample_one_sided_stable(0.5, r) <= 1.0 ? 1.0 : 0.0; }),
                     std::erfc(0.5));
    for (double b : {0.3, 0.7, 0.9}) {
        const double lam = 2.0;
        check_within_3se(mc_mean(3, [&](RngStream& r) { return std::exp(-lam * sample_one_sided_stable(b, r)); }),
                         std::exp(-std::pow(lam, b)));
    }
    RngStream r(5, 5);
    for (int i = 0; i < 100000; ++i) REQUIRE(sample_one_sided_stable(0.2, r) > 0.0);
    CHECK_THROWS_AS(sample_one_sided_stable(1.0, r), ParameterError);
}

TEST_CASE("symmetric stable increments") {
    check_within_3se(mc_mean(10,
                             [](RngStream& r) {
                                 return std::fabs(sample_sym_stable_increment(2.0, 1, 1.0, r)[0]) <= 1.0 ? 1.0 : 0.0;
                             }),
                     std::erf(0.5));
    check_within_3se(
        mc_mean(11, [](RngStream& r) { return std::cos(sample_sym_stable_increment(1.5, 1, 0.5, r)[0]); }),
        std::exp(-0.5));
    // isotropy in d = 2: characteristic function along a diagonal direction
    const double k = 1.0 / std::sqrt(2.0);
    check_within_3se(mc_mean(12,
                             [&](RngStream& r) {
                                 const Point x = sample_sym_stable_increment(1.2, 2, 0.7, r);
                                 return std::cos(k * x[0] + k * x[1]);
                             }),
                     std::exp(-0.7));
}

TEST_CASE("stability: X(s1) + X(s2) has the law of X(s1 + s2)") {
    RngStream r(3, 33);
    std::vector<double> a(10000), b(10000);
    for (auto& x : a) {
        x = sample_sym_stable_increment(1.3, 1, 0.3, r)[0] + sample_sym_stable_increment(1.3, 1, 0.5, r)[0];
    }
    for (auto& x : b) x = sample_sym_stable_increment(1.3, 1, 0.8, r)[0];
    CHECK(stats::ks_statistic_two_sample(a, b) < stats::ks_critical_two_sample(a.size(), b.size(), 0.01));
}

TEST_CASE("tau0 marginal") {
    RngStream r(1, 2);
    CHECK(sample_tau0_marginal(0.5, 0.0, r) == 0.0);
    check_within_3se(mc_mean(20, [](RngStream& r) { return sample_tau0_marginal(0.5, 1.0, r); }),
                     1.0 / std::tgamma(1.5));
    check_within_3se(mc_mean(21, [](RngStream& r) { return std::exp(-sample_tau0_marginal(0.5, 1.0, r)); }),
                     specfun::mittag_leffler(0.5, -1.0));
}

TEST_CASE("overshoot marginal: Lamperti law, positivity, small-overshoot bound") {
    check_within_3se(mc_mean(30, [](RngStream& r) { return sample_overshoot_marginal(0.5, 1.0, r) <= 1.0 ? 1.0 : 0.0; }),
                     0.5);
    for (double b : {0.1, 0.5, 0.95}) {
        RngStream r(2, 31);
        for (int i = 0; i < 2000; ++i) REQUIRE(sample_overshoot_marginal(b, 0.3, r) > 0.0);
    }
    const double eps = 0.2, p = 0.04, t = eps * p * p;
    const auto m =
        mc_mean(32, [&](RngStream& r) { return sample_overshoot_marginal(0.5, t, r) <= eps ? 1.0 : 0.0; });
    CHECK(m.mean >= 1.0 - p - 3.0 * m.std_error);
    CHECK(overshoot_cdf(0.5, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("overshoot CDF equals the double-integral density of the small-overshoot proof") {
    // P[W <= e] = 1 - a_e(t)/(Gamma(b)Gamma(1-b)),  a_e(t) = int_0^t (t-y)^{b-1} (y+e)^{-b} dy
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double b : {0.3, 0.5, 0.8}) {
        for (double t : {0.04, 1.0}) {
            for (double e : {0.01, 0.2, 1.0, 5.0}) {
                // u = (t-y)^b removes the endpoint singularity
                auto f = [&](double u) { return std::pow(t - std::pow(u, 1.0 / b) + e, -b) / b; };
                const double a = ts.integrate(f, 0.0, std::pow(t, b), 1e-13);
                const double ref = 1.0 - a / (std::tgamma(b) * std::tgamma(1.0 - b));
                CHECK(overshoot_cdf(b, t, e) == doctest::Approx(ref).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("overshoot sampler matches its CDF") {
    RngStream r(4, 40);
    std::vector<double> w(20000);
    for (auto& x : w) x = sample_overshoot_marginal(0.6, 1.0, r);
    CHECK(stats::ks_statistic(w, [](double x) { return overshoot_cdf(0.6, 1.0, x); }) < 0.012);
}
