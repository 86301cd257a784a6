#include "airis/harness/commands.hpp"
#include "airis/harness/config.hpp"

#include <CLI11.hpp>

#include <fmt/format.h>

#include <cstdio>
#include <optional>
#include <string>

namespace {

struct Common {
    std::string config;
    std::string out;
    std::optional<int> seeds;
    std::optional<std::uint64_t> base_seed;
    std::optional<int> threads;
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--config", c.config, "experiment JSON (or a manifest.json from a previous run)");
    cmd->add_option("--out", c.out, "output directory (overrides output_dir)");
    cmd->add_option("--seeds", c.seeds, "number of channel draws")->check(CLI::PositiveNumber);
    cmd->add_option("--base-seed", c.base_seed, "seed of the first channel draw");
    cmd->add_option("--threads", c.threads, "worker threads (default: AIRIS_THREADS, then all cores)")
        ->check(CLI::PositiveNumber);
}

airis::harness::ExperimentConfig resolve(const Common& c) {
    airis::harness::ExperimentConfig cfg =
        c.config.empty() ? airis::harness::default_config() : airis::harness::load_config(c.config);
    if (c.seeds) cfg.seeds = *c.seeds;
    if (c.base_seed) cfg.base_seed = *c.base_seed;
    if (!c.out.empty()) cfg.output_dir = c.out;
    cfg.validate();
    return cfg;
}

int report(const airis::harness::CommandResult& res, const std::string& out) {
    int failed = 0;
    for (const auto& r : res.rows) failed += r.status == "solver_failure" ? 1 : 0;
    fmt::print("{} rows written to {}\n", res.rows.size(), out);
    if (failed > 0) {
        fmt::print(stderr, "{} row(s) flagged solver_failure\n", failed);
        for (const auto& r : res.rows) {
            if (r.status == "solver_failure") {
                fmt::print(stderr, "  {} seed {} N={} P={} dBm: {}\n", r.algorithm, r.seed, r.n_elements,
                           r.p_max_dbm, r.message);
            }
        }
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active-IRS beamforming and power-allocation experiments"};
    app.set_version_flag("--version", AIRIS_VERSION);
    app.require_subcommand(1);

    Common common;
    CLI::App* run = app.add_subcommand("run", "run every configured scheme over the seeds");
    CLI::App* sweep = app.add_subcommand("sweep", "run over the sweep axis and plot the mean rate");
    CLI::App* fit = app.add_subcommand("fit-beta", "true rate versus beta and its polynomial fits");
    CLI::App* conv = app.add_subcommand("convergence", "per-iteration rate traces");
    for (CLI::App* cmd : {run, sweep, fit, conv}) add_common(cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        const airis::harness::ExperimentConfig cfg = resolve(common);
        const int threads = airis::harness::resolve_threads(common.threads);
        const std::string& out = cfg.output_dir;
        if (run->parsed()) return report(airis::harness::cmd_run(cfg, out, threads), out);
        if (sweep->parsed()) return report(airis::harness::cmd_sweep(cfg, out, threads), out);
        if (conv->parsed()) return report(airis::harness::cmd_convergence(cfg, out, threads), out);
        if (fit->parsed()) {
            const auto res = airis::harness::cmd_fit_beta(cfg, cfg.base_seed, out);
            for (const auto& c : res.fits) {
                fmt::print("J={} Q={}  beta*={:.6f}  max|err|={:.6g}\n", c.j_samples, c.q_order, c.beta_opt,
                           c.max_abs_err);
            }
            return 0;
        }
    } catch (const airis::harness::ConfigError& e) {
        fmt::print(stderr, "config error: {}\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    }
    return 1;
}
