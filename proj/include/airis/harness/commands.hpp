#pragma once

// The four harness commands. Each writes its files under `out` (created if
// missing) together with manifest.json.

#include "airis/harness/experiment.hpp"

#include <filesystem>
#include <vector>

namespace airis::harness {

struct CommandResult {
    std::vector<ResultRow> rows;
    bool solver_failure = false;
};

// results.csv, timings.csv, traces.csv, summary.csv
CommandResult cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& out, int threads);

// cmd_run outputs plus sweep.svg; throws ConfigError when the axis is empty.
CommandResult cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out, int threads);

// fit_beta.csv, fit_beta_summary.csv, fit_beta.svg for the channel drawn with `seed`.
FitBetaResult cmd_fit_beta(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& out);

// traces.csv, convergence_mean.csv, convergence.svg over cfg.convergence_n.
CommandResult cmd_convergence(const ExperimentConfig& cfg, const std::filesystem::path& out, int threads);

}  // namespace airis::harness
