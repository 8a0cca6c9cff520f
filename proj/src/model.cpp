#include "fracsr/model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "fracsr/errors.hpp"

namespace fracsr {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

Point::Point(std::initializer_list<double> xs) {
    if (xs.size() == 0 || xs.size() > static_cast<std::size_t>(kMaxDim)) {
        throw ShapeError("Point: dimension must be in 1.." + std::to_string(kMaxDim));
    }
    dim_ = static_cast<int>(xs.size());
    std::size_t i = 0;
    for (double v : xs) c_[i++] = v;
}

Point Point::zeros(int dim) {
    if (dim < 1 || dim > kMaxDim) {
        throw ShapeError("Point: dimension must be in 1.." + std::to_string(kMaxDim));
    }
    Point p;
    p.dim_ = dim;
    return p;
}

double squared_norm(const Point& p) {
    double s = 0.0;
    for (int i = 0; i < p.dim(); ++i) s += p[i] * p[i];
    return s;
}

// ---------------------------------------------------------------------------

int domain_dim(const DomainShape& d) {
    return std::visit(overloaded{[](const Interval&) { return 1; },
                                 [](const Ball& b) { return b.center.dim(); },
                                 [](const FullSpace& f) { return f.dim; }},
                      d);
}

bool is_bounded(const DomainShape& d) { return !std::holds_alternative<FullSpace>(d); }

bool contains_unchecked(const DomainShape& d, const Point& x) {
    switch (d.index()) {
        case 0: {
            const auto& iv = std::get<Interval>(d);
            return x[0] > iv.a && x[0] < iv.b;
        }
        case 1: {
            const auto& b = std::get<Ball>(d);
            double s = 0.0;
            for (int i = 0; i < x.dim(); ++i) {
                const double dx = x[i] - b.center[i];
                s += dx * dx;
            }
            return s < b.radius * b.radius;
        }
        default:
            return true;
    }
}

bool domain_contains(const DomainShape& d, const Point& x) {
    if (x.dim() != domain_dim(d)) {
        throw ShapeError("domain_contains: point has dimension " + std::to_string(x.dim()) +
                         ", domain has dimension " + std::to_string(domain_dim(d)));
    }
    return contains_unchecked(d, x);
}

std::vector<Point> boundary_samples(const DomainShape& d, int n) {
    std::vector<Point> out;
    if (const auto* iv = std::get_if<Interval>(&d)) {
        out.emplace_back(iv->a);
        out.emplace_back(iv->b);
        return out;
    }
    if (const auto* b = std::get_if<Ball>(&d)) {
        const int dim = b->center.dim();
        if (dim == 1) {
            out.emplace_back(b->center[0] - b->radius);
            out.emplace_back(b->center[0] + b->radius);
        } else if (dim == 2) {
            for (int i = 0; i < n; ++i) {
                const double th = 2.0 * std::numbers::pi * i / n;
                out.push_back(
                    {b->center[0] + b->radius * std::cos(th), b->center[1] + b->radius * std::sin(th)});
            }
        } else {
            // Fibonacci sphere
            const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
            for (int i = 0; i < n; ++i) {
                const double z = 1.0 - 2.0 * (i + 0.5) / n;
                const double r = std::sqrt(1.0 - z * z);
                const double th = golden * i;
                out.push_back({b->center[0] + b->radius * r * std::cos(th),
                               b->center[1] + b->radius * r * std::sin(th),
                               b->center[2] + b->radius * z});
            }
        }
    }
    return out;
}

std::vector<Point> interior_samples(const DomainShape& d, int n) {
    std::vector<Point> out;
    out.reserve(static_cast<std::size_t>(n));
    if (const auto* iv = std::get_if<Interval>(&d)) {
        for (int i = 0; i < n; ++i) out.emplace_back(iv->a + (iv->b - iv->a) * (i + 0.5) / n);
        return out;
    }
    const int dim = domain_dim(d);
    Point c = domain_center(d);
    const double scale = std::holds_alternative<Ball>(d) ? std::get<Ball>(d).radius : 2.0;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double rho = scale * std::sqrt((i + 0.5) / n) * 0.999;
        Point p = c;
        if (dim == 1) {
            p[0] += (i % 2 == 0 ? 1.0 : -1.0) * rho;
        } else if (dim == 2) {
            p[0] += rho * std::cos(golden * i);
            p[1] += rho * std::sin(golden * i);
        } else {
            const double z = 1.0 - 2.0 * (i + 0.5) / n;
            const double r = std::sqrt(1.0 - z * z);
            p[0] += rho * r * std::cos(golden * i);
            p[1] += rho * r * std::sin(golden * i);
            p[2] += rho * z;
        }
        out.push_back(p);
    }
    return out;
}

Point domain_center(const DomainShape& d) {
    return std::visit(overloaded{[](const Interval& iv) { return Point(0.5 * (iv.a + iv.b)); },
                                 [](const Ball& b) { return b.center; },
                                 [](const FullSpace& f) { return Point::zeros(f.dim); }},
                      d);
}

// ---------------------------------------------------------------------------

double eval_time_part(const TimePart& p, double t) {
    switch (p.index()) {
        case 0:
            return std::get<timeform::Const>(p).c;
        case 1:
            return std::exp(std::get<timeform::Exp>(p).rate * t);
        case 2: {
            const auto& c = std::get<timeform::Poly>(p).coeffs;
            double acc = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
            return acc;
        }
        default:
            return t < std::get<timeform::IndicatorPast>(p).threshold ? 1.0 : 0.0;
    }
}

double eval_space_form(const SpaceForm& s, const Point& x) {
    switch (s.index()) {
        case 0:
            return 0.0;
        case 1:
            return 1.0;
        case 2:
            return std::get<form::Constant>(s).c;
        case 3: {
            const auto& m = std::get<form::SineMode>(s);
            return std::sin(m.n * std::numbers::pi * (x[0] - m.a) / (m.b - m.a));
        }
        case 4: {
            const auto& g = std::get<form::GaussBump>(s);
            double r2 = 0.0;
            for (int i = 0; i < x.dim(); ++i) {
                const double dx = x[i] - g.center[i];
                r2 += dx * dx;
            }
            return std::exp(-r2 / (2.0 * g.width * g.width));
        }
        default: {
            const auto& c = std::get<form::Poly>(s).coeffs;
            double acc = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x[0] + *it;
            return acc;
        }
    }
}

double sup_abs_time_part_past(const TimePart& p) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(overloaded{[](const timeform::Const& c) { return std::abs(c.c); },
                                 [](const timeform::Exp& e) { return e.rate >= 0.0 ? 1.0 : inf; },
                                 [](const timeform::Poly& q) {
                                     double c0 = q.coeffs.empty() ? 0.0 : q.coeffs[0];
                                     for (std::size_t k = 1; k < q.coeffs.size(); ++k)
                                         if (q.coeffs[k] != 0.0) return inf;
                                     return std::abs(c0);
                                 },
                                 [](const timeform::IndicatorPast&) { return 1.0; }},
                      p);
}

Field::Field(FieldForm form, TimeRange range, double horizon)
    : form_(std::move(form)), range_(range), horizon_(horizon) {}

Field Field::with_range(TimeRange range, double horizon) const {
    return Field(form_, range, horizon);
}

double Field::value(double t, const Point& x) const {
    if (const auto* p = std::get_if<Product>(&form_)) {
        return eval_time_part(p->time, t) * eval_space_form(p->space, x);
    }
    return eval_space_form(space_part(), x);
}

double Field::evaluate(double t, const Point& x) const {
    if (!std::isfinite(t)) throw RangeError("field evaluated at non-finite t=" + fmt_double(t));
    if (range_ == TimeRange::Past && t > 0.0) {
        throw RangeError("field evaluated at t=" + fmt_double(t) + " outside past range (-inf, 0]");
    }
    if (range_ == TimeRange::Forcing && (t < 0.0 || t > horizon_)) {
        throw RangeError("field evaluated at t=" + fmt_double(t) + " outside forcing range [0, " +
                         fmt_double(horizon_) + "]");
    }
    for (int i = 0; i < x.dim(); ++i) {
        if (!std::isfinite(x[i])) {
            throw RangeError("field evaluated at non-finite x_" + std::to_string(i + 1) + "=" +
                             fmt_double(x[i]));
        }
    }
    const SpaceForm sp = space_part();
    if (const auto* g = std::get_if<form::GaussBump>(&sp); g && g->center.dim() != x.dim()) {
        throw ShapeError("gauss_bump of dimension " + std::to_string(g->center.dim()) +
                         " evaluated at a point of dimension " + std::to_string(x.dim()));
    }
    return value(t, x);
}

TimePart Field::time_part() const {
    if (const auto* p = std::get_if<Product>(&form_)) return p->time;
    return timeform::Const{1.0};
}

SpaceForm Field::space_part() const {
    return std::visit(overloaded{[](const Product& p) -> SpaceForm { return p.space; },
                                 [](const auto& s) -> SpaceForm { return s; }},
                      form_);
}

bool Field::is_zero() const {
    if (std::holds_alternative<form::Zero>(form_)) return true;
    if (const auto* c = std::get_if<form::Constant>(&form_)) return c->c == 0.0;
    if (const auto* p = std::get_if<Product>(&form_)) {
        if (std::holds_alternative<form::Zero>(p->space)) return true;
        if (const auto* c = std::get_if<timeform::Const>(&p->time)) return c->c == 0.0;
    }
    return false;
}

bool Field::is_time_constant() const {
    const auto* p = std::get_if<Product>(&form_);
    if (p == nullptr) return true;
    if (std::holds_alternative<timeform::Const>(p->time)) return true;
    if (const auto* e = std::get_if<timeform::Exp>(&p->time)) return e->rate == 0.0;
    if (const auto* q = std::get_if<timeform::Poly>(&p->time)) {
        for (std::size_t k = 1; k < q->coeffs.size(); ++k)
            if (q->coeffs[k] != 0.0) return false;
        return true;
    }
    return is_zero();
}

bool Field::is_space_only() const { return is_time_constant(); }

bool Field::is_space_constant() const {
    const SpaceForm s = space_part();
    if (std::holds_alternative<form::Zero>(s) || std::holds_alternative<form::One>(s) ||
        std::holds_alternative<form::Constant>(s))
        return true;
    if (const auto* q = std::get_if<form::Poly>(&s)) {
        for (std::size_t k = 1; k < q->coeffs.size(); ++k)
            if (q->coeffs[k] != 0.0) return false;
        return true;
    }
    return false;
}

double evaluate_field(const Field& field, double t, const Point& x) { return field.evaluate(t, x); }

Field scaled(const Field& f, double a) {
    const TimePart tp = f.time_part();
    TimePart scaled_tp = std::visit(
        overloaded{[a](const timeform::Const& c) -> TimePart { return timeform::Const{a * c.c}; },
                   [a](const timeform::Poly& q) -> TimePart {
                       timeform::Poly out = q;
                       for (double& c : out.coeffs) c *= a;
                       return out;
                   },
                   [&](const auto&) -> TimePart { return tp; }},
        tp);
    if (std::holds_alternative<timeform::Exp>(tp) || std::holds_alternative<timeform::IndicatorPast>(tp)) {
        // scale the space part instead
        SpaceForm sp = f.space_part();
        SpaceForm out = std::visit(
            overloaded{[](const form::Zero& z) -> SpaceForm { return z; },
                       [a](const form::One&) -> SpaceForm { return form::Constant{a}; },
                       [a](const form::Constant& c) -> SpaceForm { return form::Constant{a * c.c}; },
                       [a](const form::Poly& q) -> SpaceForm {
                           form::Poly o = q;
                           for (double& c : o.coeffs) c *= a;
                           return o;
                       },
                       [](const auto&) -> SpaceForm {
                           throw ParameterError("scaled: cannot scale this product within the catalog");
                       }},
            sp);
        return Field(Product{tp, out}, f.range(), f.horizon());
    }
    return Field(Product{scaled_tp, f.space_part()}, f.range(), f.horizon());
}

// ---------------------------------------------------------------------------

Scenario Scenario::normalized() const {
    Scenario s = *this;
    s.phi0 = phi0.with_range(TimeRange::Any);
    s.f = f.with_range(TimeRange::Forcing, T);
    s.g = g.with_range(TimeRange::Forcing, T);
    if (phi_past) s.phi_past = phi_past->with_range(TimeRange::Past);
    return s;
}

namespace {

void check_field_shape(const Field& fld, const std::string& name, const DomainShape& dom,
                       std::vector<std::string>& out) {
    const SpaceForm sp = fld.space_part();
    const int dim = domain_dim(dom);
    if (const auto* m = std::get_if<form::SineMode>(&sp)) {
        if (dim != 1) out.push_back(name + ": sine_mode requires a 1-D domain");
        if (m->n < 1) out.push_back(name + ": sine_mode index n must be >= 1");
        if (!(m->a < m->b)) out.push_back(name + ": sine_mode interval requires a < b");
    }
    if (const auto* g = std::get_if<form::GaussBump>(&sp)) {
        if (g->center.dim() != dim) {
            out.push_back(name + ": gauss_bump center has dimension " + std::to_string(g->center.dim()) +
                          ", domain has dimension " + std::to_string(dim));
        }
        if (!(g->width > 0.0)) out.push_back(name + ": gauss_bump width must be > 0");
    }
}

}  // namespace

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> out;
    constexpr double tol = 1e-12;
    constexpr int n_boundary = 64;

    if (!(s.alpha > 0.0 && s.alpha <= 2.0)) out.push_back("alpha=" + fmt_double(s.alpha) + " not in (0,2]");
    if (!(s.beta > 0.0 && s.beta < 1.0)) out.push_back("beta=" + fmt_double(s.beta) + " not in (0,1)");
    if (!(s.T > 0.0) || !std::isfinite(s.T)) out.push_back("T=" + fmt_double(s.T) + " must be > 0");

    bool domain_ok = true;
    if (const auto* iv = std::get_if<Interval>(&s.domain)) {
        if (!(iv->a < iv->b)) {
            out.push_back("interval requires a < b");
            domain_ok = false;
        }
    } else if (const auto* b = std::get_if<Ball>(&s.domain)) {
        if (!(b->radius > 0.0)) {
            out.push_back("ball radius must be > 0");
            domain_ok = false;
        }
    } else {
        const int d = std::get<FullSpace>(s.domain).dim;
        if (d < 1 || d > kMaxDim) {
            out.push_back("full_space dimension must be in 1..3");
            domain_ok = false;
        }
    }
    if (!domain_ok) return out;

    check_field_shape(s.phi0, "phi0", s.domain, out);
    check_field_shape(s.f, "f", s.domain, out);
    check_field_shape(s.g, "g", s.domain, out);
    if (s.phi_past) check_field_shape(*s.phi_past, "phi_past", s.domain, out);
    if (!out.empty()) return out;

    if (!s.phi0.is_space_only()) out.push_back("phi0 must be a space-only field");

    for (const Point& p : boundary_samples(s.domain, n_boundary)) {
        const double v = s.phi0.value(0.0, p);
        if (std::abs(v) > tol) {
            out.push_back("boundary compatibility: phi0=" + fmt_double(v) + " at boundary point x_1=" +
                          fmt_double(p[0]) + " (must vanish on the boundary)");
            break;
        }
    }

    if (s.phi_past) {
        const Field& ph = *s.phi_past;
        if (!std::isfinite(sup_abs_time_part_past(ph.time_part()))) {
            out.push_back("phi_past must be bounded on (-inf, 0]");
        }
        for (const Point& p : interior_samples(s.domain, n_boundary)) {
            const double a = ph.value(0.0, p);
            const double b = s.phi0.value(0.0, p);
            if (std::abs(a - b) > tol * std::max(1.0, std::abs(b))) {
                out.push_back("compatibility: phi_past(0,x)=" + fmt_double(a) + " differs from phi0(x)=" +
                              fmt_double(b) + " at x_1=" + fmt_double(p[0]));
                break;
            }
        }
        bool reported = false;
        for (double r : {0.0, -1.0, -10.0}) {
            for (const Point& p : boundary_samples(s.domain, n_boundary)) {
                if (std::abs(ph.value(r, p)) > tol && !reported) {
                    out.push_back("boundary compatibility: phi_past does not vanish on the boundary at t=" +
                                  fmt_double(r));
                    reported = true;
                }
            }
        }
    }

    if (s.mc.n_samples < 1) out.push_back("mc.n_samples must be >= 1");
    if (!(s.mc.path.h > 0.0)) out.push_back("mc.h must be > 0");
    if (s.mc.path.max_steps < 1) out.push_back("mc.max_steps must be >= 1");
    if (s.mc.workers < 1) out.push_back("mc.workers must be >= 1");
    if (s.spectral.n_modes < 1) out.push_back("spectral.n_modes must be >= 1");
    if (s.spectral.time_quad_nodes < 2) out.push_back("spectral.time_quad_nodes must be >= 2");
    if (s.spectral.space_quad_nodes < 2) out.push_back("spectral.space_quad_nodes must be >= 2");
    if (!(s.spectral.tail_tol > 0.0)) out.push_back("spectral.tail_tol must be > 0");
    return out;
}

}  // namespace fracsr
