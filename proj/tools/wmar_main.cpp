// Command-line front end: simulation studies, fitting, forecasting and
// graph export for distributional time series on quantile grids.

#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "wmar/dataio.hpp"
#include "wmar/estimate.hpp"
#include "wmar/graphx.hpp"
#include "wmar/qfun.hpp"
#include "wmar/series.hpp"
#include "wmar/simulate.hpp"
#include "wmar/study.hpp"
#include "wmar/svg.hpp"

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw wmar::Error("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

int cmd_simulate(const wmar::SimConfig& cfg, const std::string& out_dir,
                 const std::set<std::string>& formats) {
    ensure_dir(out_dir);
    const wmar::Grid grid = cfg.grid();
    const auto noise = wmar::DistortionSpec::from_spline(wmar::default_distortion_knots(), grid);
    const auto means = wmar::default_feature_means(cfg.n_features, grid);

    wmar::Rng rng(cfg.seed);
    const Eigen::MatrixXd a = wmar::gen_coeffs(cfg, rng);
    const wmar::DistSeries centered = wmar::simulate_centered(a, noise, cfg, rng);
    const wmar::DistSeries raw = wmar::synthesize_raw(centered, means);

    wmar::write_text_file(join(out_dir, "config.json"), wmar::to_json(cfg));
    wmar::write_text_file(join(out_dir, "coeffs.json"),
                          wmar::coeffs_to_json(a, cfg.alpha, cfg.seed));
    wmar::write_grid_wide_file(raw, join(out_dir, "raw.csv"));
    wmar::write_grid_wide_file(centered, join(out_dir, "centered.csv"));

    wmar::DatasetManifest manifest;
    manifest.format = "grid-wide";
    manifest.grid_h = grid.h();
    manifest.features = raw.labels();
    manifest.times = raw.times();
    wmar::write_text_file(join(out_dir, "manifest.json"), wmar::to_json(manifest));

    if (formats.count("svg") != 0) {
        for (std::size_t i = 0; i < raw.n_features(); ++i) {
            wmar::write_text_file(join(out_dir, "fan_" + raw.labels()[i] + ".svg"),
                                  wmar::quantile_fan_svg(raw, i));
        }
    }
    std::cout << "wrote " << out_dir << "/{config,coeffs,manifest}.json, raw.csv, centered.csv\n";
    return 0;
}

int cmd_fit(const std::string& series_path, const wmar::FitOptions& opts,
            const std::string& out_dir) {
    ensure_dir(out_dir);
    const wmar::DistSeries raw = wmar::read_grid_wide_file(series_path);
    const wmar::FitReport report = wmar::fit(raw, opts);
    wmar::write_text_file(join(out_dir, "report.json"), wmar::to_json(report));
    if (report.small_sample) {
        std::cerr << "warning: fewer transitions than features; estimates are rank-deficient\n";
    }
    for (std::size_t i : report.degenerate_features) {
        std::cerr << "warning: feature '" << report.labels[i]
                  << "' has a degenerate (plateau) Frechet mean\n";
    }
    std::cout << "wrote " << join(out_dir, "report.json") << "\n";
    return 0;
}

int cmd_forecast(const std::string& report_path, const std::string& series_path,
                 std::size_t horizon, const std::string& out_dir) {
    ensure_dir(out_dir);
    const wmar::FitReport report = wmar::fit_report_from_json(wmar::read_text_file(report_path));
    const wmar::DistSeries raw = wmar::read_grid_wide_file(series_path, wmar::Grid(report.grid_h));
    if (raw.labels() != report.labels) {
        throw wmar::Error("forecast: series features disagree with the fitted report");
    }

    std::vector<wmar::QuantileGrid> state = raw.instant(raw.n_instants() - 1);
    std::vector<std::vector<wmar::QuantileGrid>> cells(raw.n_features());
    std::vector<std::int64_t> times;
    for (std::size_t step = 1; step <= horizon; ++step) {
        state = wmar::forecast(report, state);
        for (std::size_t i = 0; i < state.size(); ++i) cells[i].push_back(state[i]);
        times.push_back(raw.times().back() + static_cast<std::int64_t>(step));
    }
    wmar::DistSeries out(raw.labels(), std::move(cells), std::move(times));
    wmar::write_grid_wide_file(out, join(out_dir, "forecast.csv"));
    std::cout << "wrote " << join(out_dir, "forecast.csv") << "\n";
    return 0;
}

int cmd_graph(const std::string& report_path, double threshold, std::size_t top,
              const std::set<std::string>& formats, const std::string& out_dir) {
    ensure_dir(out_dir);
    const wmar::FitReport report = wmar::fit_report_from_json(wmar::read_text_file(report_path));
    const wmar::EdgeList edges = wmar::to_edges(report.a_hat, report.labels, threshold);
    if (formats.count("dot") != 0) {
        wmar::write_text_file(join(out_dir, "graph.dot"), wmar::export_dot(edges));
    }
    if (formats.count("json") != 0) {
        wmar::write_text_file(join(out_dir, "graph.json"), wmar::export_json(edges));
    }
    if (formats.count("csv") != 0) {
        const auto ranked = wmar::top_k(report.a_hat, report.labels, top);
        std::ostringstream os;
        os << "rank,from,to,weight\n";
        char buf[64];
        for (std::size_t r = 0; r < ranked.size(); ++r) {
            std::snprintf(buf, sizeof(buf), "%.6f", ranked[r].weight);
            os << (r + 1) << "," << ranked[r].from << "," << ranked[r].to << "," << buf << "\n";
        }
        wmar::write_text_file(join(out_dir, "topk.csv"), os.str());
    }
    std::cout << "wrote graph exports to " << out_dir << "\n";
    return 0;
}

int cmd_rmsd_study(const wmar::StudyConfig& cfg, const std::string& out_dir) {
    ensure_dir(out_dir);
    const wmar::StudyResult result = wmar::rmsd_study(cfg);
    wmar::write_text_file(join(out_dir, "rmsd_study.csv"), wmar::study_csv(result));
    wmar::write_text_file(join(out_dir, "rmsd_study.svg"), wmar::study_svg(result));
    // Timing is a measurement, not a seeded output; it lives in its own file.
    wmar::write_text_file(join(out_dir, "rmsd_study_timing.csv"), wmar::study_timing_csv(result));
    std::cout << "wrote " << out_dir << "/rmsd_study.{csv,svg} and rmsd_study_timing.csv\n";
    return 0;
}

int cmd_center(const std::string& series_path, const std::string& out_dir) {
    ensure_dir(out_dir);
    const wmar::DistSeries raw = wmar::read_grid_wide_file(series_path);
    wmar::CenteredSeries centered = wmar::center_series(raw);
    wmar::write_grid_wide_file(centered.series, join(out_dir, "centered.csv"));
    std::vector<std::vector<wmar::QuantileGrid>> cells;
    cells.reserve(centered.means.size());
    for (const auto& m : centered.means) cells.push_back({m});
    wmar::DistSeries means_series(raw.labels(), std::move(cells), {0});
    wmar::write_grid_wide_file(means_series, join(out_dir, "means.csv"));
    for (std::size_t i : centered.degenerate_features) {
        std::cerr << "warning: feature '" << raw.labels()[i]
                  << "' has a degenerate (plateau) Frechet mean\n";
    }
    std::cout << "wrote " << out_dir << "/centered.csv and means.csv\n";
    return 0;
}

int cmd_distance(const std::string& path_a, const std::string& path_b,
                 const std::string& out_path) {
    const wmar::QuantileGrid a = wmar::read_quantile_csv_file(path_a);
    const wmar::QuantileGrid b = wmar::read_quantile_csv_file(path_b);
    const double d = wmar::wasserstein(a, b);
    std::ostringstream os;
    os.precision(17);
    os << d << "\n";
    if (!out_path.empty()) {
        wmar::write_text_file(out_path, os.str());
    }
    std::cout << os.str();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributional time-series autoregression on quantile grids"};
    app.require_subcommand(1);

    // simulate
    wmar::SimConfig sim_cfg;
    std::string sim_out = "out";
    std::string sim_config_path;
    std::vector<std::string> sim_formats = {"csv"};
    auto* simulate = app.add_subcommand("simulate", "Generate a synthetic series");
    simulate->add_option("--config", sim_config_path, "SimConfig JSON file (flags override)");
    auto* opt_features = simulate->add_option("--features", sim_cfg.n_features, "number of features");
    auto* opt_tlen = simulate->add_option("--t-len", sim_cfg.t_len, "number of transitions");
    auto* opt_burn = simulate->add_option("--burn-in", sim_cfg.burn_in, "burn-in transitions");
    auto* opt_alpha = simulate->add_option("--alpha", sim_cfg.alpha, "spectral margin (norm = 1/(2+alpha))");
    auto* opt_density = simulate->add_option("--density", sim_cfg.density, "off-diagonal fill probability");
    auto* opt_seed = simulate->add_option("--seed", sim_cfg.seed, "random seed (default 1)");
    auto* opt_h = simulate->add_option("--grid-h", sim_cfg.grid_h, "grid granularity");
    simulate->add_option("--out-dir", sim_out, "output directory");
    simulate->add_option("--format", sim_formats, "outputs: csv, svg (fan charts)")
        ->check(CLI::IsMember({"csv", "svg"}));

    // fit
    std::string fit_series, fit_out = "out";
    wmar::FitOptions fit_opts;
    auto* fit_cmd = app.add_subcommand("fit", "Fit the coefficient matrix to a grid-wide series");
    fit_cmd->add_option("--series", fit_series, "grid-wide series CSV")->required();
    fit_cmd->add_option("--tol", fit_opts.tol, "stopping tolerance (default 1e-4)");
    fit_cmd->add_option("--max-iter", fit_opts.max_iter, "iteration cap per row");
    fit_cmd->add_option("--ridge", fit_opts.ridge, "diagonal lift for singular Gram matrices");
    fit_cmd->add_option("--out-dir", fit_out, "output directory");

    // forecast
    std::string fc_report, fc_series, fc_out = "out";
    std::size_t fc_horizon = 1;
    auto* fc_cmd = app.add_subcommand("forecast", "Forecast from a fitted report");
    fc_cmd->add_option("--report", fc_report, "fit report JSON")->required();
    fc_cmd->add_option("--series", fc_series, "grid-wide series CSV")->required();
    fc_cmd->add_option("--horizon", fc_horizon, "steps ahead (default 1)")
        ->check(CLI::PositiveNumber);
    fc_cmd->add_option("--out-dir", fc_out, "output directory");

    // graph
    std::string gr_report, gr_out = "out";
    double gr_threshold = 0.0;
    std::size_t gr_top = 5;
    std::vector<std::string> gr_formats = {"dot", "json", "csv"};
    auto* gr_cmd = app.add_subcommand("graph", "Export the dependency graph of a fitted report");
    gr_cmd->add_option("--report", gr_report, "fit report JSON")->required();
    gr_cmd->add_option("--threshold", gr_threshold, "drop edges with weight <= threshold");
    gr_cmd->add_option("--top-k", gr_top, "rows in the ranked edge table (default 5)");
    gr_cmd->add_option("--format", gr_formats, "outputs: dot, json, csv")
        ->check(CLI::IsMember({"dot", "json", "csv"}));
    gr_cmd->add_option("--out-dir", gr_out, "output directory");

    // rmsd-study
    wmar::StudyConfig study_cfg;
    std::string study_out = "out";
    std::vector<std::size_t> study_schedule;
    std::vector<double> study_alphas;
    auto* st_cmd = app.add_subcommand("rmsd-study", "Estimation-error study over sample sizes");
    st_cmd->add_option("--features", study_cfg.n_features, "number of features");
    st_cmd->add_option("--alpha", study_alphas, "alpha values (repeatable)");
    st_cmd->add_option("--t-schedule", study_schedule, "sample sizes, ascending");
    st_cmd->add_option("--replicates", study_cfg.replicates, "replicates per alpha");
    st_cmd->add_option("--density", study_cfg.density, "off-diagonal fill probability");
    st_cmd->add_option("--burn-in", study_cfg.burn_in, "burn-in transitions");
    st_cmd->add_option("--seed", study_cfg.seed, "base seed; replicate r uses seed + r");
    st_cmd->add_option("--grid-h", study_cfg.grid_h, "grid granularity");
    st_cmd->add_option("--tol", study_cfg.fit_options.tol, "fit stopping tolerance");
    st_cmd->add_option("--max-iter", study_cfg.fit_options.max_iter, "fit iteration cap");
    st_cmd->add_option("--threads", study_cfg.threads, "worker threads (0 = auto)");
    st_cmd->add_option("--out-dir", study_out, "output directory");

    // center
    std::string ct_series, ct_out = "out";
    auto* ct_cmd = app.add_subcommand("center", "Center a series by its empirical Frechet means");
    ct_cmd->add_option("--series", ct_series, "grid-wide series CSV")->required();
    ct_cmd->add_option("--out-dir", ct_out, "output directory");

    // distance
    std::string ds_a, ds_b, ds_out;
    auto* ds_cmd = app.add_subcommand("distance",
                                      "Wasserstein distance between two quantile CSV files");
    ds_cmd->add_option("a", ds_a, "first p,value CSV")->required();
    ds_cmd->add_option("b", ds_b, "second p,value CSV")->required();
    ds_cmd->add_option("--out", ds_out, "also write the distance to this file");

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            if (!sim_config_path.empty()) {
                wmar::SimConfig from_file =
                    wmar::sim_config_from_json(wmar::read_text_file(sim_config_path));
                if (opt_features->count() == 0) sim_cfg.n_features = from_file.n_features;
                if (opt_tlen->count() == 0) sim_cfg.t_len = from_file.t_len;
                if (opt_burn->count() == 0) sim_cfg.burn_in = from_file.burn_in;
                if (opt_alpha->count() == 0) sim_cfg.alpha = from_file.alpha;
                if (opt_density->count() == 0) sim_cfg.density = from_file.density;
                if (opt_seed->count() == 0) sim_cfg.seed = from_file.seed;
                if (opt_h->count() == 0) sim_cfg.grid_h = from_file.grid_h;
            }
            sim_cfg.validate();
            return cmd_simulate(sim_cfg, sim_out,
                                std::set<std::string>(sim_formats.begin(), sim_formats.end()));
        }
        if (fit_cmd->parsed()) return cmd_fit(fit_series, fit_opts, fit_out);
        if (fc_cmd->parsed()) return cmd_forecast(fc_report, fc_series, fc_horizon, fc_out);
        if (gr_cmd->parsed()) {
            return cmd_graph(gr_report, gr_threshold, gr_top,
                             std::set<std::string>(gr_formats.begin(), gr_formats.end()), gr_out);
        }
        if (st_cmd->parsed()) {
            if (!study_alphas.empty()) study_cfg.alphas = study_alphas;
            if (!study_schedule.empty()) study_cfg.t_schedule = study_schedule;
            return cmd_rmsd_study(study_cfg, study_out);
        }
        if (ct_cmd->parsed()) return cmd_center(ct_series, ct_out);
        if (ds_cmd->parsed()) return cmd_distance(ds_a, ds_b, ds_out);
    } catch (const std::exception& e) {
        nlohmann::json err{{"error", e.what()}};
        std::cerr << "wmar-error: " << err.dump() << "\n";
        return 1;
    }
    return 0;
}
