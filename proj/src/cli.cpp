#include "migprop/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "migprop/io.hpp"
#include "migprop/math_util.hpp"

namespace migprop {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw data_error("cannot create output directory '" + out_dir + "'");
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw data_error("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

std::vector<TrackSeries> cmd_simulate(const RunConfig& cfg, const std::string& out_dir) {
    if (!cfg.simulate)
        throw argument_error("simulate: config needs a 'simulate' section");
    const auto& sim = *cfg.simulate;
    ensure_dir(out_dir);

    std::vector<TrackSeries> tracks;
    tracks.reserve(sim.paths);
    for (std::size_t p = 0; p < sim.paths; ++p) {
        std::ostringstream id;
        id << "sim" << std::setw(3) << std::setfill('0') << p;
        auto track = simulate_free_path(id.str(), sim.drift, sim.diffusion, sim.intervals,
                                        sim.observations, sim.start_x, sim.start_y,
                                        derive_seed(cfg.seed, 2 * p));
        tracks.push_back(add_noise(track, sim.noise, derive_seed(cfg.seed, 2 * p + 1)));
    }

    std::vector<std::string> comments = {
        "generated by migprop " + std::string(tool_version),
        "paths=" + std::to_string(sim.paths) +
            " observations=" + std::to_string(sim.observations),
        "beta=(" + format_double(sim.drift.beta_x) + "," + format_double(sim.drift.beta_y) +
            ") seed=" + std::to_string(cfg.seed),
    };
    write_tracks_csv_file(join(out_dir, "tracks.csv"), tracks, comments);
    return tracks;
}

Report cmd_estimate(const RunConfig& cfg, const std::vector<TrackSeries>& tracks,
                    const std::string& out_dir) {
    if (tracks.empty()) throw argument_error("estimate: no tracks to estimate");
    ensure_dir(out_dir);

    Report report;
    report.config_echo = cfg.echo;
    report.sigma0_sq = cfg.sigma0_sq;

    std::vector<EffectiveParams> effs;
    std::vector<PathBootstrap> boots;
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        PathReport pr;
        pr.params = estimate_effective(tracks[i], cfg.group_rel_tol);
        auto [ix, iy] = extract_increments(tracks[i]);
        pr.boot_x = bootstrap_effective(ix, cfg.bootstrap_replicates, cfg.bootstrap_level,
                                        derive_seed(cfg.seed, 2 * i), cfg.group_rel_tol);
        pr.boot_y = bootstrap_effective(iy, cfg.bootstrap_replicates, cfg.bootstrap_level,
                                        derive_seed(cfg.seed, 2 * i + 1), cfg.group_rel_tol);
        pr.d_x_corrected =
            correct_for_error(pr.params.x.d_eff, cfg.sigma0_sq, pr.params.delta_t);
        pr.d_y_corrected =
            correct_for_error(pr.params.y.d_eff, cfg.sigma0_sq, pr.params.delta_t);
        effs.push_back(pr.params);
        boots.push_back({pr.boot_x, pr.boot_y});
        report.paths.push_back(std::move(pr));
    }

    report.collective = estimate_collective(effs);

    // error-corrected parameters: duration-weighted mean of corrected per-path values
    {
        neumaier_sum dur, dx, dy;
        for (const auto& p : report.paths) {
            dur.add(p.params.delta_t);
            dx.add(p.d_x_corrected * p.params.delta_t);
            dy.add(p.d_y_corrected * p.params.delta_t);
        }
        PlanarParams corrected;
        corrected.beta_x = report.collective->beta_x;
        corrected.beta_y = report.collective->beta_y;
        corrected.d_x = dx.value() / dur.value();
        corrected.d_y = dy.value() / dur.value();
        report.corrected_params = corrected;
    }

    if (tracks.size() >= 2) {
        report.collective_boot =
            bootstrap_collective(tracks, cfg.bootstrap_replicates, cfg.bootstrap_level,
                                 derive_seed(cfg.seed, 0x636f6c6cULL), cfg.group_rel_tol);
        report.drift_x = drift_flag(report.collective_boot->beta_x_reps, cfg.seed);
        report.drift_y = drift_flag(report.collective_boot->beta_y_reps, cfg.seed);
        report.comparison = compare_models(tracks, effs, boots, *report.collective, 199);
    } else {
        report.drift_x = drift_flag(report.paths[0].boot_x.beta_reps, cfg.seed);
        report.drift_y = drift_flag(report.paths[0].boot_y.beta_reps, cfg.seed);
    }

    write_json_file(join(out_dir, "report.json"), report_to_json(report));

    auto csv = open_out(join(out_dir, "params.csv"));
    csv << "path_id,axis,n,delta_t,beta_eff,beta_lo,beta_hi,d_eff,d_lo,d_hi,d_corrected,"
           "d_warning\n";
    auto write_axis = [&](const std::string& id, const char* axis, std::size_t n,
                          double delta_t, const AxisEstimate& a, const BootstrapResult& b,
                          double corrected) {
        csv << id << ',' << axis << ',' << n << ',' << format_double(delta_t) << ','
            << format_double(a.beta_eff) << ',' << format_double(b.beta_ci.lower) << ','
            << format_double(b.beta_ci.upper) << ',' << format_double(a.d_eff) << ','
            << format_double(b.d_ci.lower) << ',' << format_double(b.d_ci.upper) << ','
            << format_double(corrected) << ',' << (a.d_nonpositive ? 1 : 0) << "\n";
    };
    for (const auto& p : report.paths) {
        write_axis(p.params.path_id, "x", p.params.n, p.params.delta_t, p.params.x,
                   p.boot_x, p.d_x_corrected);
        write_axis(p.params.path_id, "y", p.params.n, p.params.delta_t, p.params.y,
                   p.boot_y, p.d_y_corrected);
    }
    return report;
}

namespace {

PlanarParams proportion_params(const RunConfig& cfg, const std::vector<TrackSeries>& tracks,
                               const std::string& use_path) {
    if (cfg.explicit_params) {
        if (!use_path.empty())
            throw argument_error("proportions: --use-path conflicts with explicit params");
        return *cfg.explicit_params;
    }
    if (tracks.empty())
        throw argument_error(
            "proportions: need track data or an explicit 'params' config section");

    std::vector<EffectiveParams> effs;
    for (const auto& t : tracks) effs.push_back(estimate_effective(t, cfg.group_rel_tol));

    PlanarParams p;
    if (!use_path.empty()) {
        for (const auto& e : effs) {
            if (e.path_id != use_path) continue;
            p.beta_x = e.x.beta_eff;
            p.beta_y = e.y.beta_eff;
            p.d_x = correct_for_error(e.x.d_eff, cfg.sigma0_sq, e.delta_t);
            p.d_y = correct_for_error(e.y.d_eff, cfg.sigma0_sq, e.delta_t);
            return p;
        }
        throw argument_error("proportions: no path named '" + use_path + "'");
    }
    const auto coll = estimate_collective(effs);
    neumaier_sum dur, dx, dy;
    for (const auto& e : effs) {
        dur.add(e.delta_t);
        dx.add(correct_for_error(e.x.d_eff, cfg.sigma0_sq, e.delta_t) * e.delta_t);
        dy.add(correct_for_error(e.y.d_eff, cfg.sigma0_sq, e.delta_t) * e.delta_t);
    }
    p.beta_x = coll.beta_x;
    p.beta_y = coll.beta_y;
    p.d_x = dx.value() / dur.value();
    p.d_y = dy.value() / dur.value();
    return p;
}

bool areas_tile_domain(const std::vector<AreaRect>& areas, const DomainRect& domain) {
    neumaier_sum total;
    for (std::size_t i = 0; i < areas.size(); ++i) {
        total.add(areas[i].area());
        for (std::size_t j = i + 1; j < areas.size(); ++j) {
            const auto& a = areas[i];
            const auto& b = areas[j];
            const bool overlap = a.x_lo < b.x_hi - 1e-12 && b.x_lo < a.x_hi - 1e-12 &&
                                 a.y_lo < b.y_hi - 1e-12 && b.y_lo < a.y_hi - 1e-12;
            if (overlap) return false;
        }
    }
    const double dom = domain.length_x * domain.length_y;
    return std::abs(total.value() - dom) <= 1e-9 * dom;
}

}  // namespace

ProportionMatrix cmd_proportions(const RunConfig& cfg,
                                 const std::vector<TrackSeries>& tracks,
                                 const std::string& out_dir, const std::string& use_path) {
    if (!cfg.domain) throw argument_error("proportions: config needs a 'domain' section");
    if (cfg.areas.empty()) throw argument_error("proportions: config needs named areas");
    if (!(cfg.horizon_days > 0.0))
        throw argument_error("proportions: config needs horizon_days > 0");
    ensure_dir(out_dir);

    const PlanarParams params = proportion_params(cfg, tracks, use_path);
    if (!(params.d_x > 0.0) || !(params.d_y > 0.0))
        throw numeric_error("proportions: diffusion parameter must be positive "
                            "(corrected estimate was not)");

    const bool partition = areas_tile_domain(cfg.areas, *cfg.domain);
    const auto m = proportion_matrix(cfg.areas, cfg.areas, params, cfg.horizon_days,
                                     *cfg.domain, cfg.image_ctrl, partition);

    write_json_file(join(out_dir, "proportions.json"), matrix_to_json(m));

    auto csv = open_out(join(out_dir, "matrix.csv"));
    csv << "initial\\final";
    for (const auto& name : m.final_names) csv << ',' << name;
    csv << ",row_sum\n";
    for (std::size_t i = 0; i < m.initial_names.size(); ++i) {
        csv << m.initial_names[i];
        for (double w : m.entries[i]) csv << ',' << format_double(w);
        csv << ',' << format_double(m.row_sums[i]) << "\n";
    }
    return m;
}

ValidationReport cmd_validate(const RunConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const auto report = run_validation(cfg.validate, cfg.seed);
    write_json_file(join(out_dir, "validation.json"), validation_to_json(report));
    for (const auto& c : report.checks) {
        const char* tag = c.info_only ? "info" : (c.pass ? "PASS" : "FAIL");
        std::cout << "[" << tag << "] " << c.name << ": measured=" << c.measured
                  << " threshold=" << c.threshold;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
    }
    std::cout << (report.all_pass() ? "validation: all checks passed"
                                    : "validation: FAILURES present")
              << "\n";
    return report;
}

void cmd_standardize(const RunConfig& cfg, const std::vector<TrackSeries>& tracks,
                     const std::string& out_dir) {
    if (tracks.empty()) throw argument_error("standardize: no tracks");
    ensure_dir(out_dir);

    std::vector<EffectiveParams> effs;
    for (const auto& t : tracks) effs.push_back(estimate_effective(t, cfg.group_rel_tol));
    const auto collective = estimate_collective(effs);

    auto csv = open_out(join(out_dir, "standardized.csv"));
    csv << "path_id,axis,index,dt,u\n";
    for (std::size_t i = 0; i < tracks.size(); ++i) {
        auto [ix, iy] = extract_increments(tracks[i]);
        auto write_axis = [&](const IncrementSeries& incs, const AxisEstimate& a) {
            if (a.d_nonpositive) {
                std::cerr << "warning: path '" << effs[i].path_id << "' axis "
                          << axis_name(incs.axis())
                          << " skipped (non-positive diffusion estimate)\n";
                return;
            }
            const auto u = standardize_increments(incs, a.beta_eff, a.d_eff,
                                                  cfg.standardize_include_error,
                                                  cfg.sigma0_sq);
            for (std::size_t k = 0; k < u.size(); ++k)
                csv << effs[i].path_id << ',' << axis_name(incs.axis()) << ',' << k << ','
                    << format_double(incs.deltas()[k].dt) << ',' << format_double(u[k])
                    << "\n";
        };
        write_axis(ix, effs[i].x);
        write_axis(iy, effs[i].y);
    }

    const auto [qq_x, qq_y] = qq_effective_vs_collective(tracks, effs, collective, 0);
    auto qq_csv = open_out(join(out_dir, "qq.csv"));
    qq_csv << "axis,prob,q_effective,q_collective\n";
    for (const auto& q : qq_x)
        qq_csv << "x," << format_double(q.prob) << ',' << format_double(q.q_effective)
               << ',' << format_double(q.q_collective) << "\n";
    for (const auto& q : qq_y)
        qq_csv << "y," << format_double(q.prob) << ',' << format_double(q.q_effective)
               << ',' << format_double(q.q_collective) << "\n";
}

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"drift/diffusion estimation and migration proportions for planar tracks"};
    app.require_subcommand(1);

    std::string config_path, data_path, out_dir, use_path;
    std::uint64_t seed_override = 0;
    bool have_seed = false, project = false;

    auto add_common = [&](CLI::App* sub, bool needs_data) {
        sub->add_option("--config", config_path, "JSON config file")->required();
        sub->add_option("--out", out_dir, "output directory")->required();
        auto* seed_opt = sub->add_option("--seed", seed_override, "master seed override");
        seed_opt->each([&](const std::string&) { have_seed = true; });
        sub->add_flag("--project-lonlat", project,
                      "project lon/lat degrees to km at the dataset mean latitude");
        auto* data = sub->add_option("--data", data_path, "track CSV (path_id,t,x,y)");
        if (needs_data) data->required();
    };

    auto* sim = app.add_subcommand("simulate", "generate synthetic tracks");
    add_common(sim, false);
    auto* est = app.add_subcommand("estimate", "effective/collective parameter estimates");
    add_common(est, true);
    auto* prop = app.add_subcommand("proportions", "migration proportion matrix");
    add_common(prop, false);
    prop->add_option("--use-path", use_path, "use one path's effective parameters");
    auto* stdz = app.add_subcommand("standardize", "standardized increments and qq pairs");
    add_common(stdz, true);
    auto* val = app.add_subcommand("validate", "run the oracle cross-check suite");
    add_common(val, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = load_config_file(config_path);
        if (have_seed) cfg.seed = seed_override;
        if (project) cfg.project_lonlat = true;

        std::vector<TrackSeries> tracks;
        if (!data_path.empty()) {
            IngestOptions opts;
            opts.project_lonlat = cfg.project_lonlat;
            opts.origin_x = cfg.origin_x;
            opts.origin_y = cfg.origin_y;
            auto ingest = ingest_tracks_file(data_path, opts);
            for (const auto& w : ingest.warnings) std::cerr << "warning: " << w << "\n";
            tracks = std::move(ingest.tracks);
        }

        if (sim->parsed()) {
            cmd_simulate(cfg, out_dir);
        } else if (est->parsed()) {
            cmd_estimate(cfg, tracks, out_dir);
        } else if (prop->parsed()) {
            cmd_proportions(cfg, tracks, out_dir, use_path);
        } else if (stdz->parsed()) {
            cmd_standardize(cfg, tracks, out_dir);
        } else if (val->parsed()) {
            if (!cmd_validate(cfg, out_dir).all_pass()) return 4;
        }
        return 0;
    } catch (const argument_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const data_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace migprop
