#pragma once

// CSV, manifest and SVG writers. CSVs use LF line endings and print floats
// with 17 significant digits; wall-clock times live in their own file so the
// other outputs are byte-deterministic.

#include "airis/harness/experiment.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace airis::harness {

std::string format_double(double x);

void write_results_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
void write_timings_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
void write_traces_csv(const std::filesystem::path& path, const std::vector<ResultRow>& rows);
void write_summary_csv(const std::filesystem::path& path, SweepAxis axis, const std::vector<SweepStat>& stats);
void write_fit_csv(const std::filesystem::path& curves_path, const std::filesystem::path& summary_path,
                   const FitBetaResult& fit);
void write_convergence_csv(const std::filesystem::path& path, const std::vector<ConvergenceCurve>& curves);
void write_manifest(const std::filesystem::path& path, const ExperimentConfig& cfg);

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

// Axes, ticks, legend and one polyline per series.
void write_svg_plot(const std::filesystem::path& path, const std::string& title, const std::string& x_label,
                    const std::string& y_label, const std::vector<Series>& series);

}  // namespace airis::harness
