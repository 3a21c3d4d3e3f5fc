#pragma once

// Command implementations behind the migprop executable. Each command is an
// ordinary function so tests can drive it in-process; run_cli adds argument
// parsing and exit-code mapping (0 ok, 1 usage/config, 2 data, 3 numerical,
// 4 validation failure).

#include <string>
#include <vector>

#include "migprop/config.hpp"
#include "migprop/report.hpp"

namespace migprop {

std::vector<TrackSeries> cmd_simulate(const RunConfig& cfg, const std::string& out_dir);

Report cmd_estimate(const RunConfig& cfg, const std::vector<TrackSeries>& tracks,
                    const std::string& out_dir);

ProportionMatrix cmd_proportions(const RunConfig& cfg,
                                 const std::vector<TrackSeries>& tracks,
                                 const std::string& out_dir,
                                 const std::string& use_path = "");

ValidationReport cmd_validate(const RunConfig& cfg, const std::string& out_dir);

void cmd_standardize(const RunConfig& cfg, const std::vector<TrackSeries>& tracks,
                     const std::string& out_dir);

int run_cli(int argc, const char* const* argv);

}  // namespace migprop
