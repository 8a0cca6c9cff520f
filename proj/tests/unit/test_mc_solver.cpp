#include <doctest.h>

#include <cmath>
#include <numbers>

#include "fracsr/errors.hpp"
#include "fracsr/mc_solver.hpp"

using namespace fracsr;
using namespace fracsr::mc;

namespace {

constexpr double kPi = std::numbers::pi;

Scenario on_interval(double beta) {
    Scenario s;
    s.alpha = 2.0;
    s.beta = beta;
    s.domain = Interval{0.0, kPi};
    s.T = 1.0;
    return s;
}

Field sine() { return Field(form::SineMode{1, 0.0, kPi}); }

McConfig small(std::int64_t n, McMode mode = McMode::PathMode) {
    McConfig c;
    c.n_samples = n;
    c.seed = 77;
    c.mode = mode;
    c.path.h = 1e-3;
    return c;
}

// E_{1/2}(-z) = exp(z^2) erfc(z).
double ml_half(double z) { return std::exp(z * z) * std::erfc(z); }

}  // namespace

TEST_CASE("serial and OpenMP loops give identical estimates") {
    Scenario s = on_interval(0.6);
    s.phi0 = sine();
    s.f = Field(Product{timeform::Exp{0.5}, form::GaussBump{Point(1.0), 0.4}});
    McConfig a = small(3000);
    a.exec = ExecPolicy::Serial;
    McConfig b = a;
    b.exec = ExecPolicy::OpenMP;
    b.workers = 4;
    const auto ra = estimate_u_post(s, 0.7, Point(1.1), a);
    const auto rb = estimate_u_post(s, 0.7, Point(1.1), b);
    CHECK(ra.mean == rb.mean);
    CHECK(ra.std_error == rb.std_error);
    CHECK(ra.fine_minus_coarse == rb.fine_minus_coarse);
}

TEST_CASE("linearity in the data") {
    Scenario s = on_interval(0.5);
    s.phi0 = sine();
    Scenario s2 = s;
    s2.phi0 = scaled(s.phi0, 2.0);
    const McConfig c = small(2000);
    const auto r1 = estimate_u_post(s, 0.5, Point(1.0), c);
    const auto r2 = estimate_u_post(s2, 0.5, Point(1.0), c);
    CHECK(r2.mean == 2.0 * r1.mean);

    Scenario forced = on_interval(0.5);
    forced.f = Field(form::Constant{0.3});
    Scenario both = s;
    both.f = forced.f;
    const auto rf = estimate_u_post(forced, 0.5, Point(1.0), c);
    const auto rb = estimate_u_post(both, 0.5, Point(1.0), c);
    CHECK(std::fabs(rb.mean - (r1.mean + rf.mean)) < 1e-12);
}

TEST_CASE("nonnegative data give nonnegative estimates") {
    Scenario s = on_interval(0.7);
    s.phi0 = Field(form::GaussBump{Point(1.6), 0.2});
    s.f = Field(form::Constant{0.1});
    for (double x : {0.2, 1.5, 2.9}) CHECK(estimate_u_post(s, 0.8, Point(x), small(500)).mean >= 0.0);
}

TEST_CASE("small t recovers the initial datum") {
    Scenario s = on_interval(0.5);
    s.phi0 = sine();
    const auto r = estimate_u_post(s, 1e-4, Point(1.3), small(2000));
    CHECK(std::fabs(r.mean - std::sin(1.3)) < 0.02);
}

TEST_CASE("single Dirichlet mode matches the Mittag-Leffler decay") {
    Scenario s = on_interval(0.5);
    s.phi0 = sine();
    const double t = 0.5;
    const auto r = estimate_u_post(s, t, Point(kPi / 2), small(20000));
    const double exact = ml_half(std::sqrt(t));
    CHECK(exact == doctest::Approx(0.523157).epsilon(1e-5));
    CHECK(std::fabs(r.mean - exact) <= r.tolerance() + 0.01);
}

TEST_CASE("time-constant forcing on one mode") {
    Scenario s = on_interval(0.5);
    s.f = sine();
    const double t = 1.0, x = 1.0;
    const auto r = estimate_u_post(s, t, Point(x), small(20000));
    const double exact = std::sin(x) * (1.0 - ml_half(1.0));
    CHECK(std::fabs(r.mean - exact) <= r.tolerance() + 0.01);
}

TEST_CASE("exact marginal laws on the full line") {
    Scenario s;
    s.beta = 0.5;
    s.domain = FullSpace{1};
    s.T = 2.0;
    s.phi0 = Field(form::Constant{1.5});
    s.f = Field(form::Constant{2.0});
    const McConfig mc = small(40000, McMode::MarginalMode);
    const auto r = estimate_u_post(s, 1.0, Point(0.0), mc);
    CHECK(r.h == 0.0);
    // E tau0(1) = 1 / Gamma(1 + beta)
    const double exact = 1.5 + 2.0 / std::tgamma(1.5);
    CHECK(std::fabs(r.mean - exact) <= 3.0 * r.std_error);

    auto ind = [](double w) { return w > 1.0 ? 1.0 : 0.0; };
    for (McMode m : {McMode::MarginalMode, McMode::PathMode}) {
        const auto w = estimate_overshoot_functional(0.5, 1.0, ind, small(20000, m), 5);
        CHECK(std::fabs(w.mean - 0.5) <= w.tolerance() + 0.005);
    }

    Scenario bad = s;
    bad.phi0 = Field(form::GaussBump{Point(0.0), 1.0});
    CHECK_THROWS_AS(estimate_u_post(bad, 1.0, Point(0.0), mc), ParameterError);
}

TEST_CASE("estimates vanish near the boundary") {
    Scenario s = on_interval(0.5);
    s.phi0 = sine();
    const auto r = estimate_u_post(s, 0.5, Point(1e-3), small(4000));
    CHECK(std::fabs(r.mean - ml_half(std::sqrt(0.5)) * std::sin(1e-3)) <= r.tolerance());
}

TEST_CASE("pre and post agree for a time-constant past") {
    Scenario s = on_interval(0.5);
    s.phi0 = sine();
    s.phi_past = sine();
    const McConfig c = small(2000);
    CHECK(estimate_u_pre(s, 0.6, Point(1.0), c).mean == estimate_u_post(s, 0.6, Point(1.0), c).mean);

    const auto gap = estimate_representation_gap(s, 0.6, Point(1.0), c);
    CHECK(gap.mean == 0.0);
}

TEST_CASE("representation gap for an exponential past") {
    Scenario s = on_interval(0.5);
    s.phi_past = Field(Product{timeform::Exp{1.0}, form::SineMode{1, 0.0, kPi}});
    s.phi0 = sine();
    const auto gap = estimate_representation_gap(s, 0.8, Point(1.2), small(10000));
    CHECK(std::fabs(gap.mean) <= gap.tolerance() + 0.005);
}

TEST_CASE("grid sweeps do not depend on node order") {
    Scenario s = on_interval(0.5);
    s.phi0 = sine();
    const McConfig c = small(500);
    const auto single = estimate_u_post(s, 0.4, Point(2.0), c);
    const auto one = sweep_grid(s, {0.4}, {Point(2.0)}, c, Estimator::Post);
    REQUIRE(one.size() == 1);
    CHECK(one[0].result.mean == single.mean);

    const auto fwd = sweep_grid(s, {0.3, 0.6}, {Point(1.0), Point(2.0)}, c, Estimator::Post);
    const auto rev = sweep_grid(s, {0.6, 0.3}, {Point(2.0), Point(1.0)}, c, Estimator::Post);
    for (const auto& a : fwd) {
        for (const auto& b : rev) {
            if (a.t == b.t && a.x == b.x) CHECK(a.result.mean == b.result.mean);
        }
    }

    const auto out = sweep_grid(s, {0.5, 3.0}, {Point(1.0)}, c, Estimator::Post);
    CHECK(out[0].error.empty());
    CHECK(!out[1].error.empty());
    CHECK(std::isnan(out[1].result.mean));
}

TEST_CASE("argument errors") {
    Scenario s = on_interval(0.5);
    s.phi0 = sine();
    CHECK_THROWS_AS(estimate_u_post(s, 2.0, Point(1.0), small(10)), RangeError);
    CHECK_THROWS_AS(estimate_u_post(s, 0.0, Point(1.0), small(10)), ParameterError);
    CHECK_THROWS_AS(estimate_u_post(s, 0.5, Point(1.0), small(0)), ParameterError);
    CHECK_THROWS_AS(estimate_u_pre(s, 0.5, Point(1.0), small(10)), PreconditionError);
    CHECK_THROWS_AS(estimate_u_post(s, 0.5, Point(1.0), small(10, McMode::MarginalMode)), ParameterError);
}
