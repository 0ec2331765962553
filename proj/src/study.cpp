#include "wmar/study.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <future>
#include <sstream>
#include <thread>

#include "wmar/svg.hpp"

namespace wmar {

void StudyConfig::validate() const {
    if (alphas.empty()) throw Error("study needs at least one alpha");
    if (t_schedule.empty()) throw Error("study needs a nonempty T schedule");
    if (replicates == 0) throw Error("study needs at least one replicate");
    if (!std::is_sorted(t_schedule.begin(), t_schedule.end())) {
        throw Error("study T schedule must be ascending");
    }
    for (std::size_t t : t_schedule) {
        if (t < 2) throw Error("study T values must be at least 2");
    }
    SimConfig probe;
    probe.n_features = n_features;
    probe.t_len = t_schedule.back();
    probe.burn_in = burn_in;
    probe.alpha = alphas.front();
    probe.density = density;
    probe.grid_h = grid_h;
    probe.validate();
    fit_options.validate();
}

namespace {

std::string fmt(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

struct ReplicateOutcome {
    // [t_idx] -> value, for one (alpha, replicate) pair
    std::vector<double> rmsd;
    std::vector<double> seconds;
};

ReplicateOutcome run_replicate(const StudyConfig& cfg, const Eigen::MatrixXd& a,
                               const DistortionSpec& noise,
                               const std::vector<QuantileGrid>& means, double alpha,
                               std::uint64_t stream_seed) {
    SimConfig sim;
    sim.n_features = cfg.n_features;
    sim.t_len = cfg.t_schedule.back();
    sim.burn_in = cfg.burn_in;
    sim.alpha = alpha;
    sim.density = cfg.density;
    sim.grid_h = cfg.grid_h;
    sim.seed = stream_seed;

    Rng rng(stream_seed);
    DistSeries centered = simulate_centered(a, noise, sim, rng);
    DistSeries raw = synthesize_raw(centered, means);

    ReplicateOutcome out;
    out.rmsd.reserve(cfg.t_schedule.size());
    out.seconds.reserve(cfg.t_schedule.size());
    for (std::size_t t_len : cfg.t_schedule) {
        DistSeries window = raw.prefix(t_len + 1);
        const auto start = std::chrono::steady_clock::now();
        FitReport report = fit(window, cfg.fit_options);
        const auto stop = std::chrono::steady_clock::now();
        out.rmsd.push_back(rmsd(report.a_hat, a));
        out.seconds.push_back(std::chrono::duration<double>(stop - start).count());
    }
    return out;
}

} // namespace

StudyResult rmsd_study(const StudyConfig& cfg) {
    cfg.validate();
    const Grid grid(cfg.grid_h);
    const DistortionSpec noise = DistortionSpec::from_spline(default_distortion_knots(), grid);
    const std::vector<QuantileGrid> means = default_feature_means(cfg.n_features, grid);

    // Coefficient matrices use the base seed; replicate r uses seed + r.
    Rng coeff_rng(cfg.seed);
    std::vector<Eigen::MatrixXd> coeffs;
    coeffs.reserve(cfg.alphas.size());
    for (double alpha : cfg.alphas) {
        SimConfig sim;
        sim.n_features = cfg.n_features;
        sim.t_len = cfg.t_schedule.back();
        sim.burn_in = cfg.burn_in;
        sim.alpha = alpha;
        sim.density = cfg.density;
        sim.grid_h = cfg.grid_h;
        coeffs.push_back(gen_coeffs(sim, coeff_rng));
    }

    const std::size_t n_tasks = cfg.alphas.size() * cfg.replicates;
    std::vector<ReplicateOutcome> outcomes(n_tasks);
    std::size_t n_threads = cfg.threads != 0 ? cfg.threads : std::thread::hardware_concurrency();
    n_threads = std::max<std::size_t>(1, std::min(n_threads, n_tasks));

    std::atomic<std::size_t> next_task{0};
    auto worker = [&] {
        while (true) {
            const std::size_t task = next_task.fetch_add(1);
            if (task >= n_tasks) return;
            const std::size_t alpha_idx = task / cfg.replicates;
            const std::size_t r = task % cfg.replicates;
            outcomes[task] = run_replicate(cfg, coeffs[alpha_idx], noise, means,
                                           cfg.alphas[alpha_idx], cfg.seed + 1 + r);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    StudyResult result;
    result.config = cfg;
    for (std::size_t alpha_idx = 0; alpha_idx < cfg.alphas.size(); ++alpha_idx) {
        for (std::size_t t_idx = 0; t_idx < cfg.t_schedule.size(); ++t_idx) {
            StudyCell cell;
            cell.alpha = cfg.alphas[alpha_idx];
            cell.t_len = cfg.t_schedule[t_idx];
            double sum = 0.0, sum_sq = 0.0, sum_sec = 0.0;
            for (std::size_t r = 0; r < cfg.replicates; ++r) {
                const auto& o = outcomes[alpha_idx * cfg.replicates + r];
                sum += o.rmsd[t_idx];
                sum_sq += o.rmsd[t_idx] * o.rmsd[t_idx];
                sum_sec += o.seconds[t_idx];
            }
            const auto n = static_cast<double>(cfg.replicates);
            cell.rmsd_mean = sum / n;
            cell.seconds_mean = sum_sec / n;
            cell.rmsd_std = cfg.replicates > 1
                                ? std::sqrt(std::max(0.0, (sum_sq - sum * sum / n) / (n - 1.0)))
                                : 0.0;
            result.cells.push_back(cell);
        }
    }
    return result;
}

std::string study_csv(const StudyResult& result) {
    std::ostringstream os;
    os << "t,alpha,rmsd_mean,rmsd_std\n";
    for (const StudyCell& c : result.cells) {
        os << c.t_len << "," << fmt(c.alpha) << "," << fmt(c.rmsd_mean) << "," << fmt(c.rmsd_std)
           << "\n";
    }
    return os.str();
}

std::string study_timing_csv(const StudyResult& result) {
    std::ostringstream os;
    os << "t,alpha,seconds_mean\n";
    for (const StudyCell& c : result.cells) {
        os << c.t_len << "," << fmt(c.alpha) << "," << fmt(c.seconds_mean) << "\n";
    }
    return os.str();
}

std::string study_svg(const StudyResult& result) {
    static const char* kColors[] = {"#1f6fb4", "#d1495b", "#3a7d44", "#8d6a9f",
                                    "#c97b2d", "#4b7f9f"};
    std::vector<SvgSeriesLine> lines;
    for (std::size_t alpha_idx = 0; alpha_idx < result.config.alphas.size(); ++alpha_idx) {
        SvgSeriesLine mean_line;
        mean_line.name = "mean, alpha=" + fmt(result.config.alphas[alpha_idx]);
        mean_line.color = kColors[(2 * alpha_idx) % 6];
        SvgSeriesLine std_line;
        std_line.name = "std, alpha=" + fmt(result.config.alphas[alpha_idx]);
        std_line.color = kColors[(2 * alpha_idx + 1) % 6];
        for (std::size_t t_idx = 0; t_idx < result.config.t_schedule.size(); ++t_idx) {
            const StudyCell& c = result.cell(alpha_idx, t_idx);
            mean_line.points.emplace_back(static_cast<double>(c.t_len), c.rmsd_mean);
            std_line.points.emplace_back(static_cast<double>(c.t_len), c.rmsd_std);
        }
        lines.push_back(std::move(mean_line));
        lines.push_back(std::move(std_line));
    }
    return line_chart_svg("estimation error vs sample size", "T", "relative error", lines);
}

} // namespace wmar
