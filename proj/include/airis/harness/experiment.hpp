#pragma once

// Monte-Carlo driver: runs every configured scheme on seeded channel draws,
// optionally across a sweep axis, in a worker pool.

#include "airis/harness/config.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace airis::harness {

struct ResultRow {
    std::string algorithm;
    std::string variant;
    std::uint64_t seed = 0;
    int n_elements = 0;
    double p_max_dbm = 0.0;
    double ar_bits = 0.0;
    int iterations = 0;
    double wall_ms = 0.0;
    double p_bs = 0.0;
    double p_irs = 0.0;
    bool converged = false;
    std::string status = "ok";  // ok | overflow | solver_failure
    std::string message;
    std::vector<double> ar_trace;

    std::size_t algorithm_index = 0;
    std::size_t point_index = 0;
};

// Explicit flag, then AIRIS_THREADS, then the hardware concurrency.
int resolve_threads(std::optional<int> flag);

ResultRow run_scheme(const AlgorithmSpec& spec, const Scenario& scn, const ChannelSet& ch, std::uint64_t seed,
                     const pa_beta::RegressionConfig& reg);

// One row per (scheme, seed, point); rows come back sorted by
// (scheme order, seed, point order) whatever the thread count.
std::vector<ResultRow> run_grid(const ExperimentConfig& cfg, int threads);

struct SweepStat {
    std::string algorithm;
    std::string variant;
    std::size_t algorithm_index = 0;
    double axis_value = 0.0;
    double mean = 0.0;
    double stderr_mean = 0.0;
    int count = 0;
};

// Mean and standard error of the rate per (scheme, point); failed rows are skipped.
std::vector<SweepStat> summarize(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows);

struct FitCurve {
    int j_samples = 0;
    int q_order = 0;
    std::vector<double> coeffs;
    std::vector<double> snr;  // fitted f on the grid
    double mse = 0.0;
    double max_abs_err = 0.0;  // against the true f on the grid
    double beta_opt = 0.0;
};

struct FitBetaResult {
    std::vector<double> grid;
    std::vector<double> snr;  // true f on the grid
    std::vector<FitCurve> fits;
};

// True f(beta) and its polynomial fits for (J, Q) in {(101,2), (201,2), (101,3), (201,3)},
// at the Max-SNR-PA initial point of one channel draw.
FitBetaResult run_fit_beta(const Scenario& scn, const ChannelSet& ch, int grid_points = 1001);

struct ConvergenceCurve {
    std::string algorithm;
    std::string variant;
    int n_elements = 0;
    std::vector<double> mean_ar;  // traces padded with their final value
};

std::vector<ConvergenceCurve> mean_convergence(const std::vector<ResultRow>& rows);

// Copy of cfg sweeping N over cfg.convergence_n.
ExperimentConfig convergence_config(const ExperimentConfig& cfg);

}  // namespace airis::harness
