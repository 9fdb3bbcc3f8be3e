#include "discflow/json_io.hpp"

#include "discflow/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace discflow {

using nlohmann::json;

namespace {

json pcf_to_json_obj(const PiecewiseConstantFn& f) {
    return json{{"breakpoints", f.breakpoints()}, {"values", f.values()}};
}

PiecewiseConstantFn pcf_from_json_obj(const json& j) {
    return PiecewiseConstantFn(j.at("breakpoints").get<std::vector<double>>(),
                               j.at("values").get<std::vector<double>>());
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidParameter("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nonlocal::VelocityLaw law_from_json(const json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") return nonlocal::VelocityLaw::constant(j.at("c").get<double>());
    if (kind == "affine")
        return nonlocal::VelocityLaw::affine(j.at("a").get<double>(), j.at("b").get<double>());
    throw InvalidParameter("scenario: unknown V kind '" + kind + "'");
}

json law_to_json(const nonlocal::VelocityLaw& V) {
    if (V.kind == nonlocal::VelocityLaw::Kind::Constant)
        return json{{"kind", "constant"}, {"c", V.a}};
    return json{{"kind", "affine"}, {"a", V.a}, {"b", V.b}};
}

}  // namespace

std::string to_json(const PiecewiseConstantFn& f) { return pcf_to_json_obj(f).dump(); }

PiecewiseConstantFn pcf_from_json(const std::string& text) {
    return pcf_from_json_obj(json::parse(text));
}

std::string to_json(const Kernel& k) {
    json j = pcf_to_json_obj(k.shape());
    j["support_right"] = k.support_right();
    j["monotone_decreasing"] = k.monotone_decreasing();
    return j.dump();
}

Kernel kernel_from_json(const std::string& text) {
    const json j = json::parse(text);
    return Kernel(pcf_from_json_obj(j), j.at("support_right").get<double>(),
                  j.at("monotone_decreasing").get<bool>());
}

std::string to_json(const nonlocal::Scenario& s) {
    json j;
    j["q0"] = pcf_to_json_obj(s.q0);
    {
        json g = pcf_to_json_obj(s.gamma.shape());
        g["support_right"] = s.gamma.support_right();
        g["monotone_decreasing"] = s.gamma.monotone_decreasing();
        j["gamma"] = g;
    }
    j["V"] = law_to_json(s.V);
    {
        json v = pcf_to_json_obj(s.v.base());
        v["lower_bound"] = s.v.lower();
        j["v"] = v;
    }
    j["T"] = s.T;
    j["window"] = json::array({s.x_min, s.x_max});
    j["grid"] = json{{"ny", s.grid.ny}, {"nt", s.grid.nt}};
    return j.dump(2);
}

nonlocal::Scenario scenario_from_json(const std::string& text) {
    const json j = json::parse(text);
    nonlocal::Scenario s;
    s.q0 = pcf_from_json_obj(j.at("q0"));
    {
        const json& g = j.at("gamma");
        s.gamma = Kernel(pcf_from_json_obj(g), g.at("support_right").get<double>(),
                         g.at("monotone_decreasing").get<bool>());
    }
    s.V = law_from_json(j.at("V"));
    {
        const json& v = j.at("v");
        s.v = VelocityFn(pcf_from_json_obj(v), v.at("lower_bound").get<double>());
    }
    s.T = j.at("T").get<double>();
    s.x_min = j.at("window").at(0).get<double>();
    s.x_max = j.at("window").at(1).get<double>();
    if (j.contains("grid")) {
        s.grid.ny = j.at("grid").at("ny").get<int>();
        s.grid.nt = j.at("grid").at("nt").get<int>();
    }
    s.validate();
    return s;
}

nonlocal::Scenario scenario_from_file(const std::string& path) {
    return scenario_from_json(read_file(path));
}

OdeScenario ode_scenario_from_json(const std::string& text) {
    const json j = json::parse(text);
    OdeScenario s;
    {
        const json& v = j.at("v");
        if (v.contains("preset")) {
            const std::string preset = v.at("preset").get<std::string>();
            if (preset != "oscillating_sign")
                throw InvalidParameter("ode scenario: unknown velocity preset '" + preset + "'");
            const double cutoff = v.value("cutoff", 1e-3);
            s.v = VelocityFn(oscillating_sign_velocity(cutoff),
                             v.value("lower_bound", 1.0));
        } else {
            s.v = VelocityFn(pcf_from_json_obj(v), v.at("lower_bound").get<double>());
        }
    }
    {
        const json& l = j.at("lambda");
        const std::string kind = l.at("kind").get<std::string>();
        s.lambda_kind = kind;
        if (kind == "constant") {
            s.lambda = LipschitzField::constant(l.at("c").get<double>());
        } else if (kind == "affine") {
            s.lambda = LipschitzField::affine_x(l.at("a").get<double>(), l.at("b").get<double>(),
                                                l.at("sup_bound").get<double>());
        } else if (kind == "cosine") {
            s.lambda = LipschitzField::cosine_t(l.at("omega").get<double>());
        } else {
            throw InvalidParameter("ode scenario: unknown lambda kind '" + kind + "'");
        }
    }
    s.x0 = j.at("x0").get<std::vector<double>>();
    s.T = j.at("T").get<double>();
    if (j.contains("tol")) s.tol = j.at("tol").get<double>();
    if (!(s.T > 0.0) || s.x0.empty()) throw InvalidParameter("ode scenario: need T > 0 and x0");
    return s;
}

OdeScenario ode_scenario_from_file(const std::string& path) {
    return ode_scenario_from_json(read_file(path));
}

} // namespace discflow
