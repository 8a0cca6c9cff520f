#include "fracsr/scenario_io.hpp"

#include <cstdio>
#include <fstream>

#include "fracsr/errors.hpp"

namespace fracsr {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

json point_to_json(const Point& p) {
    json a = json::array();
    for (double v : p.coords()) a.push_back(v);
    return a;
}

Point point_from_json(const json& j) {
    if (!j.is_array() || j.empty() || j.size() > static_cast<std::size_t>(kMaxDim)) {
        throw ParameterError("point must be an array of 1..3 numbers");
    }
    Point p = Point::zeros(static_cast<int>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) p[static_cast<int>(i)] = j[i].get<double>();
    return p;
}

template <class T>
T require(const json& j, const char* key) {
    if (!j.contains(key)) throw ParameterError(std::string("missing key '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ParameterError(std::string("bad value for '") + key + "': " + e.what());
    }
}

json space_to_json(const SpaceForm& s) {
    return std::visit(
        overloaded{[](const form::Zero&) { return json{{"kind", "zero"}}; },
                   [](const form::One&) { return json{{"kind", "one"}}; },
                   [](const form::Constant& c) { return json{{"kind", "constant"}, {"c", c.c}}; },
                   [](const form::SineMode& m) {
                       return json{{"kind", "sine_mode"}, {"n", m.n}, {"a", m.a}, {"b", m.b}};
                   },
                   [](const form::GaussBump& g) {
                       return json{{"kind", "gauss_bump"}, {"center", point_to_json(g.center)}, {"width", g.width}};
                   },
                   [](const form::Poly& p) { return json{{"kind", "poly"}, {"coeffs", p.coeffs}}; }},
        s);
}

SpaceForm space_from_json(const json& j) {
    const auto kind = require<std::string>(j, "kind");
    if (kind == "zero") return form::Zero{};
    if (kind == "one") return form::One{};
    if (kind == "constant") return form::Constant{require<double>(j, "c")};
    if (kind == "sine_mode") {
        form::SineMode m;
        m.n = require<int>(j, "n");
        if (j.contains("a")) m.a = require<double>(j, "a");
        if (j.contains("b")) m.b = require<double>(j, "b");
        return m;
    }
    if (kind == "gauss_bump") return form::GaussBump{point_from_json(j.at("center")), require<double>(j, "width")};
    if (kind == "poly") return form::Poly{require<std::vector<double>>(j, "coeffs")};
    throw ParameterError("unknown space field kind '" + kind + "'");
}

json time_to_json(const TimePart& t) {
    return std::visit(
        overloaded{[](const timeform::Const& c) { return json{{"kind", "const"}, {"c", c.c}}; },
                   [](const timeform::Exp& e) { return json{{"kind", "exp"}, {"rate", e.rate}}; },
                   [](const timeform::Poly& p) { return json{{"kind", "poly"}, {"coeffs", p.coeffs}}; },
                   [](const timeform::IndicatorPast& i) {
                       return json{{"kind", "indicator_past"}, {"threshold", i.threshold}};
                   }},
        t);
}

TimePart time_from_json(const json& j) {
    const auto kind = require<std::string>(j, "kind");
    if (kind == "const") return timeform::Const{require<double>(j, "c")};
    if (kind == "exp") return timeform::Exp{require<double>(j, "rate")};
    if (kind == "poly") return timeform::Poly{require<std::vector<double>>(j, "coeffs")};
    if (kind == "indicator_past") return timeform::IndicatorPast{require<double>(j, "threshold")};
    throw ParameterError("unknown time part kind '" + kind + "'");
}

}  // namespace

json field_to_json(const Field& f) {
    if (const auto* p = std::get_if<Product>(&f.form())) {
        return json{{"kind", "product"}, {"time", time_to_json(p->time)}, {"space", space_to_json(p->space)}};
    }
    return space_to_json(f.space_part());
}

Field field_from_json(const json& j) {
    if (!j.is_object()) throw ParameterError("field descriptor must be an object");
    if (require<std::string>(j, "kind") == "product") {
        return Field(Product{time_from_json(j.at("time")), space_from_json(j.at("space"))});
    }
    return std::visit([](const auto& s) { return Field(FieldForm{s}); }, space_from_json(j));
}

json domain_to_json(const DomainShape& d) {
    return std::visit(
        overloaded{[](const Interval& iv) { return json{{"kind", "interval"}, {"a", iv.a}, {"b", iv.b}}; },
                   [](const Ball& b) {
                       return json{{"kind", "ball"}, {"center", point_to_json(b.center)}, {"radius", b.radius}};
                   },
                   [](const FullSpace& f) { return json{{"kind", "full_space"}, {"dim", f.dim}}; }},
        d);
}

DomainShape domain_from_json(const json& j) {
    const auto kind = require<std::string>(j, "kind");
    if (kind == "interval") return Interval{require<double>(j, "a"), require<double>(j, "b")};
    if (kind == "ball") return Ball{point_from_json(j.at("center")), require<double>(j, "radius")};
    if (kind == "full_space") return FullSpace{require<int>(j, "dim")};
    throw ParameterError("unknown domain kind '" + kind + "'");
}

json scenario_to_json(const Scenario& s) {
    json j;
    j["alpha"] = s.alpha;
    j["beta"] = s.beta;
    j["domain"] = domain_to_json(s.domain);
    j["T"] = s.T;
    j["phi0"] = field_to_json(s.phi0);
    j["f"] = field_to_json(s.f);
    j["g"] = field_to_json(s.g);
    j["phi_past"] = s.phi_past ? field_to_json(*s.phi_past) : json(nullptr);
    j["mc"] = json{{"n_samples", s.mc.n_samples},
                   {"seed", s.mc.seed},
                   {"h", s.mc.path.h},
                   {"max_steps", s.mc.path.max_steps},
                   {"mode", s.mc.mode == McMode::PathMode ? "path" : "marginal"}};
    j["spectral"] = json{{"n_modes", s.spectral.n_modes},
                         {"time_quad_nodes", s.spectral.time_quad_nodes},
                         {"space_quad_nodes", s.spectral.space_quad_nodes},
                         {"tail_tol", s.spectral.tail_tol}};
    return j;
}

Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw ParameterError("scenario document must be a JSON object");
    Scenario s;
    s.alpha = require<double>(j, "alpha");
    s.beta = require<double>(j, "beta");
    s.domain = domain_from_json(j.at("domain"));
    s.T = require<double>(j, "T");
    s.phi0 = field_from_json(j.at("phi0"));
    if (j.contains("f")) s.f = field_from_json(j.at("f"));
    if (j.contains("g")) s.g = field_from_json(j.at("g"));
    if (j.contains("phi_past") && !j.at("phi_past").is_null()) s.phi_past = field_from_json(j.at("phi_past"));
    if (j.contains("mc")) {
        const json& m = j.at("mc");
        if (m.contains("n_samples")) s.mc.n_samples = require<std::int64_t>(m, "n_samples");
        if (m.contains("seed")) s.mc.seed = require<std::uint64_t>(m, "seed");
        if (m.contains("h")) s.mc.path.h = require<double>(m, "h");
        if (m.contains("max_steps")) s.mc.path.max_steps = require<std::int64_t>(m, "max_steps");
        if (m.contains("mode")) {
            const auto mode = require<std::string>(m, "mode");
            if (mode == "path") {
                s.mc.mode = McMode::PathMode;
            } else if (mode == "marginal") {
                s.mc.mode = McMode::MarginalMode;
            } else {
                throw ParameterError("mc.mode must be 'path' or 'marginal'");
            }
        }
    }
    if (j.contains("spectral")) {
        const json& sp = j.at("spectral");
        if (sp.contains("n_modes")) s.spectral.n_modes = require<int>(sp, "n_modes");
        if (sp.contains("time_quad_nodes")) s.spectral.time_quad_nodes = require<int>(sp, "time_quad_nodes");
        if (sp.contains("space_quad_nodes")) s.spectral.space_quad_nodes = require<int>(sp, "space_quad_nodes");
        if (sp.contains("tail_tol")) s.spectral.tail_tol = require<double>(sp, "tail_tol");
    }
    return s.normalized();
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open scenario file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParameterError("scenario file '" + path + "' is not valid JSON: " + e.what());
    }
    return scenario_from_json(j);
}

std::string scenario_hash(const Scenario& s) {
    const std::string text = scenario_to_json(s).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace fracsr
