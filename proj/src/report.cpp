#include "migprop/report.hpp"

#include <fstream>

#include "migprop/errors.hpp"

namespace migprop {

using nlohmann::json;

DriftFlag drift_flag(const std::vector<double>& beta_replicates, std::uint64_t seed) {
    DriftFlag f;
    f.ci99 = percentile_interval(beta_replicates, 0.99, seed);
    f.significant = !f.ci99.contains(0.0);
    return f;
}

namespace {

json ci_to_json(const BootstrapCI& ci) {
    return json{{"level", ci.level},
                {"lower", ci.lower},
                {"upper", ci.upper},
                {"replicates", ci.replicates}};
}

json axis_to_json(const AxisEstimate& a, const BootstrapResult& boot, double corrected) {
    json j{{"beta_eff", a.beta_eff},
           {"d_eff", a.d_eff},
           {"d_corrected", corrected},
           {"beta_ci", ci_to_json(boot.beta_ci)},
           {"d_ci", ci_to_json(boot.d_ci)}};
    if (a.d_nonpositive) j["warning"] = "d_eff non-positive (small sample)";
    return j;
}

json comparison_to_json(const ModelComparison& cmp) {
    json rows = json::array();
    for (const auto& r : cmp.rows)
        rows.push_back(json{{"path_id", r.path_id},
                            {"axis", axis_name(r.axis)},
                            {"param", r.param},
                            {"effective", r.effective},
                            {"collective", r.collective},
                            {"se_boot", r.se_boot},
                            {"z", r.z},
                            {"p", r.p_value}});
    auto qq = [](const std::vector<QQPair>& pairs) {
        json arr = json::array();
        for (const auto& q : pairs)
            arr.push_back(json{{"prob", q.prob},
                               {"effective", q.q_effective},
                               {"collective", q.q_collective}});
        return arr;
    };
    return json{{"rows", rows}, {"qq_x", qq(cmp.qq_x)}, {"qq_y", qq(cmp.qq_y)}};
}

json drift_to_json(const DriftFlag& f) {
    return json{{"significant", f.significant},
                {"ci99_lower", f.ci99.lower},
                {"ci99_upper", f.ci99.upper}};
}

}  // namespace

json matrix_to_json(const ProportionMatrix& m) {
    return json{{"initial", m.initial_names},
                {"final", m.final_names},
                {"entries", m.entries},
                {"row_sums", m.row_sums},
                {"horizon_days", m.horizon},
                {"final_is_partition", m.final_is_partition},
                {"params",
                 json{{"beta", {m.params.beta_x, m.params.beta_y}},
                      {"d", {m.params.d_x, m.params.d_y}}}}};
}

json validation_to_json(const ValidationReport& v) {
    json checks = json::array();
    for (const auto& c : v.checks)
        checks.push_back(json{{"name", c.name},
                              {"pass", c.pass},
                              {"info_only", c.info_only},
                              {"measured", c.measured},
                              {"threshold", c.threshold},
                              {"detail", c.detail}});
    return json{{"all_pass", v.all_pass()}, {"checks", checks}};
}

json report_to_json(const Report& report) {
    json j;
    j["version"] = report.version;
    j["config"] = report.config_echo;
    j["sigma0_sq"] = report.sigma0_sq;

    json paths = json::array();
    for (const auto& p : report.paths)
        paths.push_back(json{{"path_id", p.params.path_id},
                             {"n", p.params.n},
                             {"delta_t", p.params.delta_t},
                             {"x", axis_to_json(p.params.x, p.boot_x, p.d_x_corrected)},
                             {"y", axis_to_json(p.params.y, p.boot_y, p.d_y_corrected)}});
    j["paths"] = paths;

    if (report.collective) {
        const auto& c = *report.collective;
        json cj{{"beta", {c.beta_x, c.beta_y}},
                {"d", {c.d_x, c.d_y}},
                {"total_duration", c.total_duration},
                {"path_count", c.path_count}};
        if (report.collective_boot) {
            const auto& b = *report.collective_boot;
            cj["beta_x_ci"] = ci_to_json(b.beta_x_ci);
            cj["beta_y_ci"] = ci_to_json(b.beta_y_ci);
            cj["d_x_ci"] = ci_to_json(b.d_x_ci);
            cj["d_y_ci"] = ci_to_json(b.d_y_ci);
        }
        j["collective"] = cj;
    }
    if (report.corrected_params)
        j["corrected_params"] = json{
            {"beta", {report.corrected_params->beta_x, report.corrected_params->beta_y}},
            {"d", {report.corrected_params->d_x, report.corrected_params->d_y}}};
    if (report.drift_x) j["drift_x"] = drift_to_json(*report.drift_x);
    if (report.drift_y) j["drift_y"] = drift_to_json(*report.drift_y);
    if (report.comparison) j["comparison"] = comparison_to_json(*report.comparison);
    if (report.proportions) j["proportions"] = matrix_to_json(*report.proportions);
    if (report.validation) j["validation"] = validation_to_json(*report.validation);
    return j;
}

void write_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    out << doc.dump(2) << "\n";
    if (!out) throw data_error("write failed for '" + path + "'");
}

}  // namespace migprop
