#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fracsr/errors.hpp"
#include "fracsr/model.hpp"
#include "fracsr/scenario_io.hpp"

using namespace fracsr;

namespace {

constexpr double kPi = std::numbers::pi;

bool mentions(const std::vector<std::string>& diags, const std::string& word) {
    for (const auto& d : diags) {
        if (d.find(word) != std::string::npos) return true;
    }
    return false;
}

Scenario single_mode() {
    Scenario s;
    s.alpha = 2.0;
    s.beta = 0.5;
    s.domain = Interval{0.0, kPi};
    s.phi0 = Field(form::SineMode{1, 0.0, kPi});
    return s;
}

}  // namespace

TEST_CASE("field evaluation") {
    CHECK(evaluate_field(Field(form::Zero{}), 3.0, Point(1.0)) == 0.0);
    CHECK(evaluate_field(Field(form::SineMode{1, 0.0, kPi}), 0.0, Point(kPi / 2)) == 1.0);
    const Field past(Product{timeform::Exp{1.0}, form::SineMode{1, 0.0, kPi}}, TimeRange::Past);
    CHECK(evaluate_field(past, -1.0, Point(kPi / 2)) == doctest::Approx(0.3678794).epsilon(1e-7));
    CHECK_THROWS_AS(evaluate_field(past, 0.5, Point(1.0)), RangeError);
    const Field forcing(form::One{}, TimeRange::Forcing, 1.0);
    CHECK_THROWS_AS(forcing.evaluate(1.5, Point(0.2)), RangeError);
    CHECK_THROWS_AS(forcing.evaluate(-0.1, Point(0.2)), RangeError);
    CHECK(forcing.evaluate(1.0, Point(0.2)) == 1.0);

    // referential transparency
    const Field g(form::GaussBump{Point(0.3), 0.7});
    CHECK(g.value(0.0, Point(1.1)) == g.value(0.0, Point(1.1)));
}

TEST_CASE("separable views") {
    const Field p(Product{timeform::Poly{{1.0, 2.0}}, form::Constant{3.0}});
    CHECK(eval_time_part(p.time_part(), 2.0) == 5.0);
    CHECK(eval_space_form(p.space_part(), Point(9.0)) == 3.0);
    CHECK(p.is_space_constant());
    CHECK(!p.is_time_constant());
    CHECK(Field(form::SineMode{2, 0.0, 1.0}).is_space_only());
    CHECK(sup_abs_time_part_past(timeform::Exp{1.0}) == 1.0);
    CHECK(std::isinf(sup_abs_time_part_past(timeform::Poly{{0.0, 1.0}})));
    CHECK(scaled(Field(form::SineMode{1, 0.0, kPi}), 2.0).value(0.0, Point(kPi / 2)) == 2.0);
}

TEST_CASE("domain membership") {
    CHECK(domain_contains(Interval{0.0, kPi}, Point(kPi / 2)));
    CHECK(!domain_contains(Interval{0.0, kPi}, Point(0.0)));
    CHECK(!domain_contains(Interval{0.0, kPi}, Point(kPi)));
    CHECK(!domain_contains(Ball{Point{0.0, 0.0}, 1.0}, Point{2.0, 0.0}));
    CHECK(domain_contains(Ball{Point{0.0, 0.0}, 1.0}, Point{0.5, 0.5}));
    CHECK(domain_contains(FullSpace{2}, Point{1e9, -1e9}));
    CHECK_THROWS_AS(domain_contains(Interval{0.0, 1.0}, Point{0.5, 0.5}), ShapeError);

    // a < x < b on rational probes
    const Interval iv{-1.0, 2.0};
    for (int p = -40; p <= 40; ++p) {
        const double x = p / 8.0;
        CHECK(domain_contains(iv, Point(x)) == (x > -1.0 && x < 2.0));
    }
}

TEST_CASE("scenario validation diagnostics") {
    CHECK(validate_scenario(single_mode()).empty());

    Scenario one = single_mode();
    one.phi0 = Field(form::One{});
    CHECK(mentions(validate_scenario(one), "boundary compatibility"));

    Scenario bad_beta = single_mode();
    bad_beta.beta = 1.5;
    CHECK(mentions(validate_scenario(bad_beta), "beta"));

    Scenario mismatch = single_mode();
    mismatch.phi_past = Field(Product{timeform::Exp{1.0}, form::SineMode{2, 0.0, kPi}});
    CHECK(mentions(validate_scenario(mismatch), "compatibility"));

    Scenario unbounded = single_mode();
    unbounded.phi_past = Field(Product{timeform::Poly{{1.0, 1.0}}, form::SineMode{1, 0.0, kPi}});
    CHECK(mentions(validate_scenario(unbounded), "bounded"));

    Scenario timed = single_mode();
    timed.phi0 = Field(Product{timeform::Exp{1.0}, form::SineMode{1, 0.0, kPi}});
    CHECK(mentions(validate_scenario(timed), "space-only"));
}

TEST_CASE("scenario JSON round trip is bit exact") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 20; ++k) {
        Scenario s = single_mode();
        s.beta = 0.1 + 0.8 * std::fabs(u(gen)) / 3.0;
        s.T = 0.5 + std::fabs(u(gen));
        s.f = Field(Product{timeform::Poly{{u(gen), u(gen), u(gen)}}, form::GaussBump{Point(u(gen)), 0.1 + std::fabs(u(gen))}});
        s.g = Field(form::Constant{u(gen)});
        s.phi_past = Field(Product{timeform::IndicatorPast{-std::fabs(u(gen))}, form::SineMode{1, 0.0, kPi}});
        s.mc.seed = gen();
        s.mc.path.h = 1e-3 * std::fabs(u(gen)) + 1e-6;
        s.spectral.tail_tol = 1e-12 * (1.0 + std::fabs(u(gen)));
        const Scenario n = s.normalized();
        const Scenario back = scenario_from_json(nlohmann::json::parse(scenario_to_json(n).dump()));
        CHECK(scenario_to_json(back) == scenario_to_json(n));
        CHECK(back.beta == n.beta);
        CHECK(back.mc.seed == n.mc.seed);
        CHECK(back.mc.path.h == n.mc.path.h);
        CHECK(back.f == n.f);
        CHECK(*back.phi_past == *n.phi_past);
        CHECK(scenario_hash(back) == scenario_hash(n));
    }
}

TEST_CASE("normalization tags field roles") {
    Scenario s = single_mode();
    s.phi_past = Field(Product{timeform::Exp{1.0}, form::SineMode{1, 0.0, kPi}});
    s.f = Field(form::One{});
    const Scenario n = s.normalized();
    CHECK(n.phi_past->range() == TimeRange::Past);
    CHECK(n.f.range() == TimeRange::Forcing);
    CHECK(scenario_hash(n) != scenario_hash(single_mode().normalized()));
}

TEST_CASE("malformed scenario JSON") {
    CHECK_THROWS(scenario_from_json(nlohmann::json::parse(R"({"beta": 0.5})")));
    CHECK_THROWS(scenario_from_json(nlohmann::json::parse(
        R"({"alpha": 2, "beta": 0.5, "T": 1, "domain": {"kind": "torus"}})")));
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ParameterError);
}
