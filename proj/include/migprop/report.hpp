#pragma once

// Estimation report assembly and JSON serialization. Reports carry no
// timestamps and echo the exact config, so a rerun from the echoed config
// reproduces the report byte for byte.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "migprop/estimate.hpp"
#include "migprop/proportions.hpp"
#include "migprop/validate.hpp"

namespace migprop {

inline constexpr const char* tool_version = "0.1.0";

struct PathReport {
    EffectiveParams params;
    BootstrapResult boot_x;
    BootstrapResult boot_y;
    double d_x_corrected = 0.0;
    double d_y_corrected = 0.0;
};

// Drift flag for the weak-drift call: non-significant when the 99%
// percentile interval of the replicates contains zero.
struct DriftFlag {
    BootstrapCI ci99;
    bool significant = false;
};

DriftFlag drift_flag(const std::vector<double>& beta_replicates, std::uint64_t seed);

struct Report {
    std::string version = tool_version;
    nlohmann::json config_echo;
    double sigma0_sq = 0.0;
    std::vector<PathReport> paths;
    std::optional<CollectiveParams> collective;
    std::optional<CollectiveBootstrap> collective_boot;
    std::optional<PlanarParams> corrected_params;  // error-corrected, per-definition default
    std::optional<DriftFlag> drift_x;
    std::optional<DriftFlag> drift_y;
    std::optional<ModelComparison> comparison;
    std::optional<ProportionMatrix> proportions;
    std::optional<ValidationReport> validation;
};

nlohmann::json report_to_json(const Report& report);
nlohmann::json matrix_to_json(const ProportionMatrix& m);
nlohmann::json validation_to_json(const ValidationReport& v);

void write_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace migprop
