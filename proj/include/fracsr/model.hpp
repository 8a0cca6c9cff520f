#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fracsr/config.hpp"

namespace fracsr {

inline constexpr int kMaxDim = 3;

// Small fixed-capacity point in R^d, d <= 3. Value type, no allocation.
class Point {
public:
    Point() = default;
    explicit Point(double x) : dim_(1) { c_[0] = x; }
    Point(std::initializer_list<double> xs);
    static Point zeros(int dim);

    int dim() const { return dim_; }
    double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }
    std::span<const double> coords() const { return {c_.data(), static_cast<std::size_t>(dim_)}; }

    friend bool operator==(const Point&, const Point&) = default;

private:
    std::array<double, kMaxDim> c_{};
    int dim_ = 1;
};

double squared_norm(const Point& p);

// ---------------------------------------------------------------------------
// Domains

struct Interval {
    double a = 0.0;
    double b = 1.0;
    friend bool operator==(const Interval&, const Interval&) = default;
};

struct Ball {
    Point center;
    double radius = 1.0;
    friend bool operator==(const Ball&, const Ball&) = default;
};

// tau_Omega = +infinity.
struct FullSpace {
    int dim = 1;
    friend bool operator==(const FullSpace&, const FullSpace&) = default;
};

using DomainShape = std::variant<Interval, Ball, FullSpace>;

int domain_dim(const DomainShape& d);
bool is_bounded(const DomainShape& d);

// True iff x lies in the open set. Throws ShapeError on dimension mismatch.
bool domain_contains(const DomainShape& d, const Point& x);

// Unchecked membership used by the path kernels (dimension already validated).
bool contains_unchecked(const DomainShape& d, const Point& x);

// Deterministic sample of n points on the boundary (both endpoints for an interval,
// equispaced/Fibonacci points for a ball). Empty for FullSpace.
std::vector<Point> boundary_samples(const DomainShape& d, int n);

// Deterministic sample of n interior points.
std::vector<Point> interior_samples(const DomainShape& d, int n);

// Center-ish reference point (ball center, interval midpoint, origin).
Point domain_center(const DomainShape& d);

// ---------------------------------------------------------------------------
// Fields: a closed declarative catalog of separable analytic forms.

namespace form {
struct Zero {
    friend bool operator==(const Zero&, const Zero&) = default;
};
struct One {
    friend bool operator==(const One&, const One&) = default;
};
struct Constant {
    double c = 0.0;
    friend bool operator==(const Constant&, const Constant&) = default;
};
// sin(n*pi*(x-a)/(b-a)), first coordinate.
struct SineMode {
    int n = 1;
    double a = 0.0;
    double b = 3.14159265358979323846;
    friend bool operator==(const SineMode&, const SineMode&) = default;
};
// exp(-|x-center|^2 / (2 width^2)).
struct GaussBump {
    Point center;
    double width = 1.0;
    friend bool operator==(const GaussBump&, const GaussBump&) = default;
};
// sum_k coeffs[k] * x_1^k.
struct Poly {
    std::vector<double> coeffs;
    friend bool operator==(const Poly&, const Poly&) = default;
};
}  // namespace form

namespace timeform {
struct Const {
    double c = 1.0;
    friend bool operator==(const Const&, const Const&) = default;
};
// exp(rate * t).
struct Exp {
    double rate = 1.0;
    friend bool operator==(const Exp&, const Exp&) = default;
};
// sum_k coeffs[k] * t^k.
struct Poly {
    std::vector<double> coeffs;
    friend bool operator==(const Poly&, const Poly&) = default;
};
// 1{t < threshold}.
struct IndicatorPast {
    double threshold = -1.0;
    friend bool operator==(const IndicatorPast&, const IndicatorPast&) = default;
};
}  // namespace timeform

using SpaceForm = std::variant<form::Zero, form::One, form::Constant, form::SineMode,
                               form::GaussBump, form::Poly>;
using TimePart = std::variant<timeform::Const, timeform::Exp, timeform::Poly,
                              timeform::IndicatorPast>;

struct Product {
    TimePart time;
    SpaceForm space;
    friend bool operator==(const Product&, const Product&) = default;
};

using FieldForm = std::variant<form::Zero, form::One, form::Constant, form::SineMode,
                               form::GaussBump, form::Poly, Product>;

// Declared time range: Past = (-inf, 0], Forcing = [0, T], Any = R.
enum class TimeRange { Any, Past, Forcing };

double eval_time_part(const TimePart& p, double t);
double eval_space_form(const SpaceForm& s, const Point& x);
double sup_abs_time_part_past(const TimePart& p);   // sup over (-inf, 0]; +inf if unbounded

class Field {
public:
    Field() = default;
    Field(FieldForm form, TimeRange range = TimeRange::Any,
          double horizon = std::numeric_limits<double>::infinity());

    const FieldForm& form() const { return form_; }
    TimeRange range() const { return range_; }
    double horizon() const { return horizon_; }
    Field with_range(TimeRange range, double horizon = std::numeric_limits<double>::infinity()) const;

    // Range-checked evaluation; throws RangeError naming the coordinate.
    double evaluate(double t, const Point& x) const;
    // Unchecked evaluation for inner loops.
    double value(double t, const Point& x) const;

    // Separable view: field(t,x) = time_part(t) * space_part(x).
    TimePart time_part() const;
    SpaceForm space_part() const;

    bool is_zero() const;
    bool is_space_only() const;
    bool is_space_constant() const;      // does not depend on x
    bool is_time_constant() const;       // does not depend on t

    friend bool operator==(const Field& a, const Field& b) { return a.form_ == b.form_; }

private:
    FieldForm form_ = form::Zero{};
    TimeRange range_ = TimeRange::Any;
    double horizon_ = std::numeric_limits<double>::infinity();
};

double evaluate_field(const Field& field, double t, const Point& x);

// Field scaled by a constant (used for linearity checks); keeps the catalog closed.
Field scaled(const Field& f, double a);

// ---------------------------------------------------------------------------
// Scenario

struct Scenario {
    double alpha = 2.0;
    double beta = 0.5;
    DomainShape domain = Interval{0.0, 3.14159265358979323846};
    double T = 1.0;
    Field phi0;
    Field f;
    Field g;
    std::optional<Field> phi_past;
    McConfig mc;
    SpectralConfig spectral;

    // Returns a copy with the range tags of every field set from its role.
    Scenario normalized() const;
};

// Empty iff every scenario invariant holds.
std::vector<std::string> validate_scenario(const Scenario& s);

}  // namespace fracsr
