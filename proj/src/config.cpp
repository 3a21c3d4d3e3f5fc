#include "migprop/config.hpp"

#include <fstream>
#include <set>

#include "migprop/errors.hpp"

namespace migprop {

using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
    if (!obj.is_object()) throw argument_error("config: " + where + " must be an object");
    for (const auto& [key, _] : obj.items())
        if (allowed.find(key) == allowed.end())
            throw argument_error("config: unknown key '" + key + "' in " + where);
}

double get_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key))
        throw argument_error("config: missing '" + std::string(key) + "' in " + where);
    const auto& v = obj.at(key);
    if (!v.is_number())
        throw argument_error("config: '" + std::string(key) + "' in " + where +
                             " must be a number");
    return v.get<double>();
}

double get_number_or(const json& obj, const char* key, double fallback,
                     const std::string& where) {
    return obj.contains(key) ? get_number(obj, key, where) : fallback;
}

DomainRect parse_domain(const json& j) {
    reject_unknown(j, {"length_x", "length_y", "origin_x", "origin_y"}, "domain");
    return DomainRect(get_number(j, "length_x", "domain"), get_number(j, "length_y", "domain"));
}

AreaRect parse_area(const json& j) {
    reject_unknown(j, {"name", "x", "y"}, "area");
    if (!j.contains("name") || !j.at("name").is_string())
        throw argument_error("config: area needs a string 'name'");
    const std::string name = j.at("name").get<std::string>();
    auto interval = [&](const char* key) -> std::pair<double, double> {
        if (!j.contains(key) || !j.at(key).is_array() || j.at(key).size() != 2)
            throw argument_error("config: area '" + name + "' needs '" + key + "': [lo, hi]");
        return {j.at(key).at(0).get<double>(), j.at(key).at(1).get<double>()};
    };
    const auto [xlo, xhi] = interval("x");
    const auto [ylo, yhi] = interval("y");
    return AreaRect(name, xlo, xhi, ylo, yhi);
}

DiffusionLaw parse_diffusion(const json& j) {
    if (j.is_number()) return DiffusionLaw::constant(j.get<double>());
    reject_unknown(j, {"breakpoints", "values"}, "diffusion");
    if (!j.contains("breakpoints") || !j.contains("values"))
        throw argument_error("config: piecewise diffusion needs breakpoints and values");
    return DiffusionLaw::piecewise(j.at("breakpoints").get<std::vector<double>>(),
                                   j.at("values").get<std::vector<double>>());
}

IntervalDistribution parse_intervals(const json& j) {
    reject_unknown(j, {"type", "mean", "lo", "hi", "values", "weights"}, "intervals");
    const std::string type = j.value("type", "");
    if (type == "exponential")
        return IntervalDistribution::exponential(get_number(j, "mean", "intervals"));
    if (type == "uniform")
        return IntervalDistribution::uniform_range(get_number(j, "lo", "intervals"),
                                                   get_number(j, "hi", "intervals"));
    if (type == "fixed")
        return IntervalDistribution::fixed(j.at("values").get<std::vector<double>>(),
                                           j.at("weights").get<std::vector<double>>());
    throw argument_error("config: intervals type must be exponential|uniform|fixed");
}

NoiseModel parse_noise(const json& j) {
    reject_unknown(j, {"type", "sigma", "half_width", "scale"}, "noise");
    const std::string type = j.value("type", "");
    if (type == "none") return NoiseModel::none();
    if (type == "gaussian") return NoiseModel::gaussian(get_number(j, "sigma", "noise"));
    if (type == "uniform") return NoiseModel::uniform(get_number(j, "half_width", "noise"));
    if (type == "laplace") return NoiseModel::laplace(get_number(j, "scale", "noise"));
    throw argument_error("config: noise type must be none|gaussian|uniform|laplace");
}

SimulateConfig parse_simulate(const json& j) {
    reject_unknown(j,
                   {"paths", "observations", "beta", "diffusion", "intervals", "noise",
                    "start"},
                   "simulate");
    SimulateConfig s;
    s.paths = static_cast<std::size_t>(get_number_or(j, "paths", 1, "simulate"));
    s.observations =
        static_cast<std::size_t>(get_number_or(j, "observations", 100, "simulate"));
    if (s.paths < 1) throw argument_error("config: simulate.paths must be >= 1");
    if (s.observations < 2)
        throw argument_error("config: simulate.observations must be >= 2");
    if (j.contains("beta")) {
        const auto& b = j.at("beta");
        if (!b.is_array() || b.size() != 2)
            throw argument_error("config: simulate.beta must be [beta_x, beta_y]");
        s.drift = {b.at(0).get<double>(), b.at(1).get<double>()};
    }
    if (j.contains("diffusion")) s.diffusion = parse_diffusion(j.at("diffusion"));
    if (j.contains("intervals")) s.intervals = parse_intervals(j.at("intervals"));
    if (j.contains("noise")) s.noise = parse_noise(j.at("noise"));
    if (j.contains("start")) {
        const auto& p = j.at("start");
        if (!p.is_array() || p.size() != 2)
            throw argument_error("config: simulate.start must be [x0, y0]");
        s.start_x = p.at(0).get<double>();
        s.start_y = p.at(1).get<double>();
    }
    return s;
}

ValidateConfig parse_validate(const json& j) {
    reject_unknown(j, {"quadrature_configs", "mc_paths", "cumulant_sims", "estimator_paths"},
                   "validate");
    ValidateConfig v;
    v.quadrature_configs =
        static_cast<int>(get_number_or(j, "quadrature_configs", 20, "validate"));
    v.mc_paths = static_cast<std::size_t>(get_number_or(j, "mc_paths", 20000, "validate"));
    v.cumulant_sims =
        static_cast<std::size_t>(get_number_or(j, "cumulant_sims", 200000, "validate"));
    v.estimator_paths =
        static_cast<std::size_t>(get_number_or(j, "estimator_paths", 300, "validate"));
    if (v.quadrature_configs < 1 || v.mc_paths < 1000 || v.cumulant_sims < 1000 ||
        v.estimator_paths < 10)
        throw argument_error("config: validate intensities too small");
    return v;
}

PlanarParams parse_params(const json& j) {
    reject_unknown(j, {"beta", "d"}, "params");
    PlanarParams p;
    const auto& b = j.at("beta");
    const auto& d = j.at("d");
    if (!b.is_array() || b.size() != 2 || !d.is_array() || d.size() != 2)
        throw argument_error("config: params needs beta:[x,y] and d:[x,y]");
    p.beta_x = b.at(0).get<double>();
    p.beta_y = b.at(1).get<double>();
    p.d_x = d.at(0).get<double>();
    p.d_y = d.at(1).get<double>();
    if (!(p.d_x > 0.0) || !(p.d_y > 0.0))
        throw argument_error("config: params.d must be positive");
    return p;
}

}  // namespace

RunConfig parse_config(const json& doc) {
    reject_unknown(doc,
                   {"domain", "areas", "horizon_days", "sigma0_sq", "bootstrap", "seed",
                    "tail_tol", "group_rel_tol", "project_lonlat",
                    "standardize_include_error", "params", "simulate", "validate"},
                   "config root");
    RunConfig cfg;
    cfg.echo = doc;

    if (doc.contains("domain")) {
        cfg.domain = parse_domain(doc.at("domain"));
        cfg.origin_x = get_number_or(doc.at("domain"), "origin_x", 0.0, "domain");
        cfg.origin_y = get_number_or(doc.at("domain"), "origin_y", 0.0, "domain");
    }
    if (doc.contains("areas")) {
        if (!doc.at("areas").is_array())
            throw argument_error("config: areas must be an array");
        std::set<std::string> names;
        for (const auto& a : doc.at("areas")) {
            cfg.areas.push_back(parse_area(a));
            if (!names.insert(cfg.areas.back().name).second)
                throw argument_error("config: duplicate area name '" +
                                     cfg.areas.back().name + "'");
            if (cfg.domain) cfg.areas.back().validate_in(*cfg.domain);
        }
    }
    cfg.horizon_days = get_number_or(doc, "horizon_days", 0.0, "config root");
    if (doc.contains("horizon_days") && !(cfg.horizon_days > 0.0))
        throw argument_error("config: horizon_days must be > 0");
    cfg.sigma0_sq = get_number_or(doc, "sigma0_sq", 0.0, "config root");
    if (!(cfg.sigma0_sq >= 0.0)) throw argument_error("config: sigma0_sq must be >= 0");

    if (doc.contains("bootstrap")) {
        const auto& b = doc.at("bootstrap");
        reject_unknown(b, {"replicates", "level"}, "bootstrap");
        cfg.bootstrap_replicates =
            static_cast<std::size_t>(get_number_or(b, "replicates", 500, "bootstrap"));
        cfg.bootstrap_level = get_number_or(b, "level", 0.90, "bootstrap");
        if (cfg.bootstrap_replicates < 100)
            throw argument_error("config: bootstrap.replicates must be >= 100");
        if (!(cfg.bootstrap_level > 0.0) || !(cfg.bootstrap_level < 1.0))
            throw argument_error("config: bootstrap.level must be in (0, 1)");
    }
    if (doc.contains("seed")) {
        if (!doc.at("seed").is_number_unsigned())
            throw argument_error("config: seed must be a non-negative integer");
        cfg.seed = doc.at("seed").get<std::uint64_t>();
    }
    cfg.image_ctrl.tail_tol = get_number_or(doc, "tail_tol", 1e-12, "config root");
    cfg.image_ctrl.validate();
    cfg.group_rel_tol = get_number_or(doc, "group_rel_tol", 0.0, "config root");
    if (!(cfg.group_rel_tol >= 0.0))
        throw argument_error("config: group_rel_tol must be >= 0");
    if (doc.contains("project_lonlat")) {
        if (!doc.at("project_lonlat").is_boolean())
            throw argument_error("config: project_lonlat must be a boolean");
        cfg.project_lonlat = doc.at("project_lonlat").get<bool>();
    }
    if (doc.contains("standardize_include_error")) {
        if (!doc.at("standardize_include_error").is_boolean())
            throw argument_error("config: standardize_include_error must be a boolean");
        cfg.standardize_include_error = doc.at("standardize_include_error").get<bool>();
    }
    if (doc.contains("params")) cfg.explicit_params = parse_params(doc.at("params"));
    if (doc.contains("simulate")) cfg.simulate = parse_simulate(doc.at("simulate"));
    if (doc.contains("validate")) cfg.validate = parse_validate(doc.at("validate"));
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw argument_error("cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw argument_error("config '" + path + "': " + e.what());
    }
    return parse_config(doc);
}

const AreaRect& find_area(const RunConfig& cfg, const std::string& name) {
    for (const auto& a : cfg.areas)
        if (a.name == name) return a;
    throw argument_error("config: no area named '" + name + "'");
}

}  // namespace migprop
