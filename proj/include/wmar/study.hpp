#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wmar/estimate.hpp"
#include "wmar/simulate.hpp"

namespace wmar {

/// Monte Carlo study of estimation error versus sample size: for each
/// alpha a coefficient matrix is generated, each replicate simulates one
/// series of the longest scheduled length, and the model is refit on every
/// scheduled prefix.
struct StudyConfig {
    std::size_t n_features = 10;
    std::vector<double> alphas = {0.1, 0.5};
    std::vector<std::size_t> t_schedule = {200, 500, 1000, 2000};
    std::size_t replicates = 20;
    double density = 0.3;
    std::size_t burn_in = 200;
    std::uint64_t seed = 1;
    double grid_h = 0.01;
    FitOptions fit_options;
    std::size_t threads = 0;    ///< 0 = hardware concurrency

    void validate() const;
};

struct StudyCell {
    double alpha = 0.0;
    std::size_t t_len = 0;
    double rmsd_mean = 0.0;
    double rmsd_std = 0.0;      ///< sample standard deviation over replicates
    double seconds_mean = 0.0;  ///< mean wall time of one fit
};

struct StudyResult {
    StudyConfig config;
    std::vector<StudyCell> cells;   ///< alpha-major, t ascending

    const StudyCell& cell(std::size_t alpha_idx, std::size_t t_idx) const {
        return cells[alpha_idx * config.t_schedule.size() + t_idx];
    }
};

StudyResult rmsd_study(const StudyConfig& cfg);

/// Seeded outputs: `t,alpha,rmsd_mean,rmsd_std`.
std::string study_csv(const StudyResult& result);
/// Wall-clock measurements, kept apart from the seeded outputs:
/// `t,alpha,seconds_mean`.
std::string study_timing_csv(const StudyResult& result);
/// Mean and standard deviation curves per alpha.
std::string study_svg(const StudyResult& result);

} // namespace wmar
