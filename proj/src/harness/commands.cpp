#include "airis/harness/commands.hpp"

#include "airis/channel.hpp"
#include "airis/harness/output.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

namespace airis::harness {

namespace {

void prepare(const ExperimentConfig& cfg, const std::filesystem::path& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec) throw IoError("cannot create '" + out.string() + "': " + ec.message());
    write_manifest(out / "manifest.json", cfg);
}

CommandResult grid_outputs(const ExperimentConfig& cfg, const std::filesystem::path& out, int threads) {
    prepare(cfg, out);
    CommandResult res;
    res.rows = run_grid(cfg, threads);
    res.solver_failure = std::any_of(res.rows.begin(), res.rows.end(),
                                     [](const ResultRow& r) { return r.status == "solver_failure"; });
    write_results_csv(out / "results.csv", res.rows);
    write_timings_csv(out / "timings.csv", res.rows);
    write_traces_csv(out / "traces.csv", res.rows);
    write_summary_csv(out / "summary.csv", cfg.axis, summarize(cfg, res.rows));
    return res;
}

std::string series_name(const std::string& algorithm, const std::string& variant) {
    return variant.empty() || algorithm.find(variant) != std::string::npos ? algorithm
                                                                           : algorithm + " (" + variant + ")";
}

}  // namespace

CommandResult cmd_run(const ExperimentConfig& cfg, const std::filesystem::path& out, int threads) {
    return grid_outputs(cfg, out, threads);
}

CommandResult cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out, int threads) {
    if (cfg.axis == SweepAxis::None || cfg.axis_values.empty()) {
        throw ConfigError("/sweep", "sweep needs a non-empty axis");
    }
    CommandResult res = grid_outputs(cfg, out, threads);

    std::map<std::size_t, Series> by_scheme;
    for (const SweepStat& s : summarize(cfg, res.rows)) {
        Series& ser = by_scheme[s.algorithm_index];
        ser.name = series_name(s.algorithm, s.variant);
        ser.x.push_back(s.axis_value);
        ser.y.push_back(s.mean);
    }
    std::vector<Series> series;
    for (auto& [idx, s] : by_scheme) series.push_back(std::move(s));
    const std::string x_label = cfg.axis == SweepAxis::NElements ? "number of IRS elements N" : "P_max (dBm)";
    write_svg_plot(out / "sweep.svg", "Mean achievable rate", x_label, "AR (bit/s/Hz)", series);
    return res;
}

FitBetaResult cmd_fit_beta(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& out) {
    cfg.validate();
    prepare(cfg, out);
    const Scenario scn = cfg.scenario.to_scenario();
    const FitBetaResult fit = run_fit_beta(scn, channel::generate(scn, seed));
    write_fit_csv(out / "fit_beta.csv", out / "fit_beta_summary.csv", fit);

    auto ar = [](double snr) { return std::log2(1.0 + std::max(snr, 0.0)); };
    std::vector<Series> series;
    Series truth{"true", fit.grid, {}};
    for (double s : fit.snr) truth.y.push_back(ar(s));
    series.push_back(std::move(truth));
    for (const FitCurve& c : fit.fits) {
        Series s{fmt::format("J={}, Q={}", c.j_samples, c.q_order), fit.grid, {}};
        for (double v : c.snr) s.y.push_back(ar(v));
        series.push_back(std::move(s));
    }
    write_svg_plot(out / "fit_beta.svg", "Rate versus beta and its regressions", "beta", "AR (bit/s/Hz)", series);
    return fit;
}

CommandResult cmd_convergence(const ExperimentConfig& cfg, const std::filesystem::path& out, int threads) {
    const ExperimentConfig conv = convergence_config(cfg);
    conv.validate();
    prepare(conv, out);
    CommandResult res;
    res.rows = run_grid(conv, threads);
    res.solver_failure = std::any_of(res.rows.begin(), res.rows.end(),
                                     [](const ResultRow& r) { return r.status == "solver_failure"; });
    write_results_csv(out / "results.csv", res.rows);
    write_traces_csv(out / "traces.csv", res.rows);
    const std::vector<ConvergenceCurve> curves = mean_convergence(res.rows);
    write_convergence_csv(out / "convergence_mean.csv", curves);

    std::vector<Series> series;
    for (const ConvergenceCurve& c : curves) {
        Series s{fmt::format("{}, N={}", series_name(c.algorithm, c.variant), c.n_elements), {}, c.mean_ar};
        for (std::size_t i = 0; i < c.mean_ar.size(); ++i) s.x.push_back(static_cast<double>(i));
        series.push_back(std::move(s));
    }
    write_svg_plot(out / "convergence.svg", "Convergence", "iteration", "AR (bit/s/Hz)", series);
    return res;
}

}  // namespace airis::harness
