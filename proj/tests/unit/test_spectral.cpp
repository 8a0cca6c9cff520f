#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracsr/errors.hpp"
#include "fracsr/paths.hpp"
#include "fracsr/specfun.hpp"
#include "fracsr/spectral.hpp"
#include "fracsr/stats.hpp"

using namespace fracsr;
using namespace fracsr::spectral;

namespace {

constexpr double kPi = std::numbers::pi;

Scenario base(double beta) {
    Scenario s;
    s.alpha = 2.0;
    s.beta = beta;
    s.domain = Interval{0.0, kPi};
    s.T = 1.0;
    return s;
}

Field sine() { return Field(form::SineMode{1, 0.0, kPi}); }

}  // namespace

TEST_CASE("basis: eigenvalues increase, modes are orthonormal") {
    const auto b = SpectralBasis::on(Interval{0.0, kPi}, 64);
    for (int n = 1; n < 64; ++n) CHECK(b.lambda(n + 1) > b.lambda(n));
    CHECK(b.lambda(3) == doctest::Approx(9.0).epsilon(1e-15));
    const auto r = quad::gauss_legendre_on(512, 0.0, kPi);
    for (int m : {1, 2, 17, 64}) {
        for (int n : {1, 3, 17, 64}) {
            double s = 0.0;
            for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * b.psi(m, r.x[i]) * b.psi(n, r.x[i]);
            CHECK(std::fabs(s - (m == n ? 1.0 : 0.0)) < 1e-10);
        }
    }
}

TEST_CASE("projections: sine mode, zero, Gaussian bump against a trapezoid oracle") {
    const auto b = SpectralBasis::on(Interval{0.0, kPi}, 16);
    const auto c = project(b, sine());
    CHECK(c[0] == doctest::Approx(std::sqrt(kPi / 2)).epsilon(1e-12));
    for (int n = 2; n <= 16; ++n) CHECK(std::fabs(c[static_cast<std::size_t>(n - 1)]) < 1e-12);
    for (double v : project(b, Field(form::Zero{}))) CHECK(v == 0.0);
    const Field bump(form::GaussBump{Point(1.2), 0.3});
    const auto g = project(b, bump);
    const int M = 1'000'000;
    for (int n : {1, 2, 5, 16}) {
        double s = 0.0;
        for (int i = 0; i <= M; ++i) {
            const double x = kPi * i / M;
            s += (i == 0 || i == M ? 0.5 : 1.0) * bump.value(0.0, Point(x)) * b.psi(n, x);
        }
        s *= kPi / M;
        CHECK(std::fabs(g[static_cast<std::size_t>(n - 1)] - s) < 1e-9);
    }
}

TEST_CASE("phi kernel: closed form for f = 1, zero, singular-form quadrature oracle") {
    const double e = specfun::mittag_leffler(0.5, -1.0);
    CHECK(phi_kernel(0.5, 1.0, [](double) { return 1.0; }, 1.0) == doctest::Approx(1.0 - e).epsilon(1e-12));
    CHECK(phi_kernel(0.5, 1.0, [](double) { return 1.0; }, 1.0) == doctest::Approx(0.5724164238).epsilon(1e-9));
    CHECK(phi_kernel(0.5, 1.0, [](double) { return 0.0; }, 1.0) == 0.0);
    CHECK_THROWS_AS(phi_kernel(0.5, 0.0, [](double) { return 1.0; }, 1.0), ParameterError);
    boost::math::quadrature::tanh_sinh<double> ts;
    for (double b : {0.3, 0.5, 0.8}) {
        for (double lam : {1.0, 10.0, 100.0}) {
            const specfun::MittagLeffler E(b, b);
            const double t = 1.0;
            // beta (t-r)^{beta-1} E_beta'(-lam (t-r)^beta) = (t-r)^{beta-1} E_{beta,beta}(...)
            auto k = [&](double r, double rc) {
                const double w = rc > 0.0 ? rc : t - r;
                return r * r * std::pow(w, b - 1.0) * E(-lam * std::pow(w, b));
            };
            const double ref = ts.integrate(k, 0.0, t, 1e-12);
            const double got = phi_kernel(b, lam, [](double r) { return r * r; }, t);
            CHECK(got == doctest::Approx(ref).epsilon(1e-7));
        }
    }
}

TEST_CASE("phi kernel bound |Phi| <= c sup|f| / lambda with one fitted constant") {
    const std::vector<std::function<double(double)>> fs{
        [](double) { return 1.0; }, [](double r) { return r; }, [](double r) { return r * r; },
        [](double r) { return std::exp(r); }, [](double r) { return std::sin(7 * r); }};
    const std::vector<double> sup{1.0, 1.0, 1.0, std::exp(1.0), 1.0};
    double c_fit = 0.0;
    for (double b : {0.3, 0.5, 0.8})
        for (double lam : {1.0, 10.0, 100.0})
            for (std::size_t k = 0; k < fs.size(); ++k)
                c_fit = std::max(c_fit, std::fabs(phi_kernel(b, lam, fs[k], 1.0)) * lam / sup[k]);
    MESSAGE("fitted c = " << c_fit);
    // Phi_{1,lambda} = (1 - E)/lambda <= 1/lambda, so the constant is at most 1 for f >= 0
    CHECK(c_fit <= 1.0 + 1e-12);
}

TEST_CASE("solve_spectral: single mode closed forms, t = 0, boundary, capability errors") {
    Scenario s = base(0.5);
    s.phi0 = sine();
    s = s.normalized();
    const std::vector<double> ts{0.0, 0.1, 0.5, 1.0};
    const std::vector<double> xs{0.0, 0.3, kPi / 2, 2.9, kPi};
    const auto tab = solve_spectral(s, ts, xs, s.spectral);
    for (const auto& r : tab.rows) {
        const double ref = specfun::mittag_leffler(0.5, -std::sqrt(r.t)) * std::sin(r.x);
        CHECK(std::fabs(r.u - (r.x == 0.0 || r.x == kPi ? 0.0 : ref)) < 1e-8);
        CHECK(r.tail_bound < 1e-12);
    }
    CHECK(tab.tail_within_tol);
    Scenario f = base(0.5);
    f.f = sine();
    f = f.normalized();
    for (const auto& r : solve_spectral(f, ts, xs, f.spectral).rows) {
        const double ref = std::sin(r.x) * (1.0 - specfun::mittag_leffler(0.5, -std::sqrt(r.t)));
        CHECK(std::fabs(r.u - (r.x == 0.0 || r.x == kPi ? 0.0 : ref)) < 1e-8);
    }
    Scenario a15 = s;
    a15.alpha = 1.5;
    CHECK_THROWS_AS(solve_spectral(a15, ts, xs, s.spectral), CapabilityError);
    Scenario ball = s;
    ball.domain = Ball{Point{0.0, 0.0}, 1.0};
    CHECK_THROWS_AS(solve_spectral(ball, ts, xs, s.spectral), CapabilityError);
    CHECK_THROWS_AS(solve_spectral(s, {}, xs, s.spectral), GridError);
}

TEST_CASE("truncation: doubling n_modes moves the solution by less than the recorded tail") {
    Scenario s = base(0.6);
    s.phi0 = Field(form::GaussBump{Point(1.0), 0.15});
    s.f = Field(Product{timeform::Exp{1.0}, form::GaussBump{Point(2.0), 0.2}});
    s = s.normalized();
    SpectralConfig c1;
    c1.n_modes = 8;
    SpectralConfig c2 = c1;
    c2.n_modes = 16;
    const std::vector<double> ts{0.01, 0.2, 1.0};
    const std::vector<double> xs{0.4, 1.0, 2.0, 2.8};
    const auto a = solve_spectral(s, ts, xs, c1);
    const auto b = solve_spectral(s, ts, xs, c2);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CAPTURE(a.rows[i].t);
        CAPTURE(a.rows[i].x);
        CHECK(std::fabs(a.rows[i].u - b.rows[i].u) <= a.rows[i].tail_bound * (1 + 1e-12) + 1e-15);
    }
    CHECK(a.max_tail > b.max_tail);
}

TEST_CASE("heat kernel: symmetry, sub-Markov, small-time Gaussian limit") {
    const auto b = SpectralBasis::on(Interval{0.0, kPi}, 64);
    CHECK(heat_kernel(b, 0.1, 0.7, 2.1) == doctest::Approx(heat_kernel(b, 0.1, 2.1, 0.7)).epsilon(1e-14));
    const auto r = quad::gauss_legendre_on(400, 0.0, kPi);
    for (double s : {0.01, 0.1, 1.0}) {
        double m = 0.0;
        for (std::size_t i = 0; i < r.x.size(); ++i) m += r.w[i] * heat_kernel(b, s, 1.3, r.x[i]);
        CHECK(m <= 1.0 + 1e-10);
        CHECK(m > 0.0);
    }
    const double s = 1e-4;
    const double free = 1.0 / std::sqrt(4.0 * kPi * s);
    CHECK(std::fabs(heat_kernel(b, s, kPi / 2, kPi / 2) / free - 1.0) < 0.01);
    CHECK_THROWS_AS(heat_kernel(b, 0.0, 1.0, 1.0), ParameterError);
}

TEST_CASE("subordinate kernel: potential density, quadrature oracle, nonnegativity") {
    // int_0^inf p^beta_s(w) ds = w^{beta-1}/Gamma(beta); below s = 1e-3 the heat kernel at
    // |x - y| = pi/6 is below e^{-60}
    boost::math::quadrature::exp_sinh<double> es;
    for (double w : {0.3, 1.0}) {
        const double pot = es.integrate([&](double s) { return specfun::stable_density(0.5, s, w); });
        CHECK(pot == doctest::Approx(std::pow(w, -0.5) / std::tgamma(0.5)).epsilon(1e-6));
    }
    const auto b = SpectralBasis::on(Interval{0.0, kPi}, 64);
    const double w = 0.5, x = kPi / 2, y = kPi / 3;
    auto integrand = [&](double s) { return s > 0.0 ? heat_kernel(b, s, x, y) * specfun::stable_density(0.5, s, w) : 0.0; };
    const double ref = es.integrate([&](double v) { return integrand(1e-3 + v); }, 1e-8);
    const double got = subordinate_kernel(b, 0.5, w, x, y);
    CHECK(std::fabs(got / ref - 1.0) < 0.01);
    for (double ww : {0.01, 0.2, 1.0, 5.0})
        for (double yy : {0.1, 1.0, 2.0, 3.0}) CHECK(subordinate_kernel(b, 0.5, ww, 1.4, yy) >= -1e-12);
    CHECK_THROWS_AS(subordinate_kernel(b, 0.5, 0.0, x, y), ParameterError);
}

TEST_CASE("H kernel: nonnegativity, mass and past term against paths") {
    const auto b = SpectralBasis::on(Interval{0.0, kPi}, 32);
    const double beta = 0.5, t = 1.0, x = kPi / 2;
    for (double r : {-0.01, -0.5, -3.0})
        for (double y : {0.2, 1.5, 3.0}) CHECK(h_kernel(b, beta, t, x, r, y) >= 0.0);
    CHECK_THROWS_AS(h_kernel(b, beta, t, x, 0.0, 1.0), ParameterError);

    boost::math::quadrature::exp_sinh<double> es;
    const auto yr = quad::gauss_legendre_on(48, 0.0, kPi);
    double mass = 0.0, past = 0.0;
    for (std::size_t j = 0; j < yr.x.size(); ++j) {
        const double y = yr.x[j];
        mass += yr.w[j] * es.integrate([&](double v) { return v > 0.0 ? h_kernel(b, beta, t, x, -v, y) : 0.0; });
        past += yr.w[j] * std::sin(y) *
                es.integrate([&](double v) { return v > 0.0 ? std::exp(-v) * h_kernel(b, beta, t, x, -v, y) : 0.0; });
    }
    PathSpec p;
    p.alpha = 2.0;
    p.beta = beta;
    p.domain = Interval{0.0, kPi};
    p.t = t;
    p.x = Point(x);
    const int n = 40000;
    std::vector<double> ind(n), phi(n);
    const RngStream root(11, 11);
    for (int i = 0; i < n; ++i) {
        RngStream r = root.split(static_cast<std::uint64_t>(i));
        const ExitSample e = run_exit_sample(p, nullptr, PathConfig{}, r);
        const bool tf = e.time_won == Winner::TimeFirst;
        ind[static_cast<std::size_t>(i)] = tf ? 1.0 : 0.0;
        phi[static_cast<std::size_t>(i)] = tf ? std::exp(-e.overshoot) * std::sin(e.exit_position[0]) : 0.0;
    }
    const auto m1 = stats::mean_se(ind);
    const auto m2 = stats::mean_se(phi);
    CAPTURE(mass);
    CAPTURE(m1.mean);
    CAPTURE(past);
    CAPTURE(m2.mean);
    // discrete monitoring of the exit biases paths toward staying inside; allow the step-size margin
    CHECK(std::fabs(mass - m1.mean) <= 3 * m1.std_error + 0.01);
    CHECK(std::fabs(past - m2.mean) <= 3 * m2.std_error + 0.01 * std::fabs(past));
}

TEST_CASE("serial and OpenMP grid solves agree bit for bit") {
    Scenario s = base(0.6);
    s.phi0 = Field(form::GaussBump{Point(1.5), 0.2});
    s.f = Field(Product{timeform::Exp{0.5}, form::SineMode{2, 0.0, kPi}});
    SpectralConfig a = s.spectral;
    a.n_modes = 16;
    a.exec = ExecPolicy::Serial;
    SpectralConfig b = a;
    b.exec = ExecPolicy::OpenMP;
    const std::vector<double> ts{0.1, 0.4, 0.7, 1.0}, xs{0.5, 1.5, 2.5};
    const auto ra = solve_spectral(s, ts, xs, a);
    const auto rb = solve_spectral(s, ts, xs, b);
    REQUIRE(ra.rows.size() == rb.rows.size());
    for (std::size_t i = 0; i < ra.rows.size(); ++i) {
        CHECK(ra.rows[i].u == rb.rows[i].u);
        CHECK(ra.rows[i].tail_bound == rb.rows[i].tail_bound);
    }
}
