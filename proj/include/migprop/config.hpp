#pragma once

// Run configuration: JSON with strict validation (unknown keys rejected,
// module invariants enforced at parse time).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "migprop/greens.hpp"
#include "migprop/model.hpp"
#include "migprop/proportions.hpp"
#include "migprop/simulate.hpp"

namespace migprop {

struct SimulateConfig {
    std::size_t paths = 1;
    std::size_t observations = 100;
    DriftVector drift;
    DiffusionLaw diffusion = DiffusionLaw::constant(1.0);
    IntervalDistribution intervals = IntervalDistribution::exponential(0.2);
    NoiseModel noise = NoiseModel::none();
    double start_x = 0.0;
    double start_y = 0.0;
};

struct ValidateConfig {
    int quadrature_configs = 20;
    std::size_t mc_paths = 20000;
    std::size_t cumulant_sims = 200000;
    std::size_t estimator_paths = 300;
};

struct RunConfig {
    std::optional<DomainRect> domain;
    double origin_x = 0.0;
    double origin_y = 0.0;
    std::vector<AreaRect> areas;
    double horizon_days = 0.0;
    double sigma0_sq = 0.0;
    std::size_t bootstrap_replicates = 500;
    double bootstrap_level = 0.90;
    std::uint64_t seed = 0;
    ImageSumControl image_ctrl;
    double group_rel_tol = 0.0;
    bool project_lonlat = false;
    bool standardize_include_error = false;
    std::optional<PlanarParams> explicit_params;  // bypasses estimation in `proportions`
    std::optional<SimulateConfig> simulate;
    ValidateConfig validate;

    nlohmann::json echo;  // the exact parsed document, for report reproducibility
};

RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path);

const AreaRect& find_area(const RunConfig& cfg, const std::string& name);

}  // namespace migprop
