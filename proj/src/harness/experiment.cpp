#include "airis/harness/experiment.hpp"

#include "airis/baselines.hpp"
#include "airis/channel.hpp"
#include "airis/max_ar_cffp.hpp"
#include "airis/max_snr_pa.hpp"
#include "airis/model.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <thread>

namespace airis::harness {

namespace {

void fill_from_pa(ResultRow& row, const max_snr::SnrPaRun& run) {
    const auto& its = run.trace.iterations;
    row.iterations = static_cast<int>(its.size()) - 1;
    row.converged = run.trace.converged;
    row.ar_bits = its.back().ar_bits;
    row.p_bs = its.back().p_bs;
    row.p_irs = its.back().p_irs;
    for (const auto& it : its) row.ar_trace.push_back(it.ar_bits);
}

void fill_from_baseline(ResultRow& row, const baselines::BaselineRun& run, int iterations) {
    row.iterations = iterations;
    row.converged = true;
    row.ar_bits = run.ar_bits;
    row.p_bs = run.p_bs;
    row.p_irs = run.p_irs;
    row.ar_trace = run.ar_trace;
}

struct Task {
    std::size_t point_index;
    int seed_index;
};

}  // namespace

int resolve_threads(std::optional<int> flag) {
    if (flag && *flag > 0) return *flag;
    if (const char* env = std::getenv("AIRIS_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0 && v <= 1024) return static_cast<int>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

ResultRow run_scheme(const AlgorithmSpec& spec, const Scenario& scn, const ChannelSet& ch, std::uint64_t seed,
                     const pa_beta::RegressionConfig& reg) {
    ResultRow row;
    row.algorithm = spec.label();
    row.variant = spec.variant_name();
    row.seed = seed;
    row.n_elements = scn.n_elements;
    row.p_max_dbm = watt_to_dbm(scn.p_max);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        switch (spec.kind) {
            case AlgorithmKind::MaxSnrPa:
            case AlgorithmKind::FixedBeta: {
                max_snr::SnrPaOptions opts;
                opts.eps = spec.eps;
                opts.xi = spec.xi;
                opts.max_outer = spec.max_outer;
                opts.max_inner = spec.max_inner;
                opts.regression = reg;
                double beta0 = 0.5;
                if (spec.kind == AlgorithmKind::FixedBeta) {
                    opts.fixed_beta = spec.beta;
                    beta0 = spec.beta;
                }
                fill_from_pa(row, max_snr::run_max_snr_pa(scn, ch, max_snr::initial_state(scn, ch, beta0), opts));
                break;
            }
            case AlgorithmKind::MaxArCffp: {
                cffp::CffpOptions opts;
                opts.variant = spec.variant;
                opts.zeta = spec.zeta;
                opts.max_iters = spec.max_iters;
                const cffp::CffpRun run =
                    cffp::run_max_ar_cffp(scn, ch, cffp::initial_state(scn, ch, spec.variant), opts);
                const auto& its = run.trace.iterations;
                row.iterations = static_cast<int>(its.size()) - 1;
                row.converged = run.trace.converged;
                row.ar_bits = its.back().ar_bits;
                row.p_bs = its.back().p_bs;
                row.p_irs = its.back().total_power - its.back().p_bs;
                for (const auto& it : its) row.ar_trace.push_back(it.ar_bits);
                if (run.trace.overflow) {
                    row.status = "overflow";
                    row.message = "surrogate left the finite range";
                }
                break;
            }
            case AlgorithmKind::PassiveIrs:
                fill_from_baseline(row, baselines::run_passive_irs(scn, ch, spec.passive_iters), spec.passive_iters);
                break;
            case AlgorithmKind::RandomPhase:
                fill_from_baseline(row, baselines::run_random_phase(scn, ch, seed, reg), 1);
                break;
            case AlgorithmKind::NoIrs:
                fill_from_baseline(row, baselines::run_no_irs(scn, ch), 0);
                break;
        }
    } catch (const Error& e) {
        row.status = "solver_failure";
        row.message = e.what();
        row.ar_bits = 0.0;
        row.converged = false;
    }
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::vector<ResultRow> run_grid(const ExperimentConfig& cfg, int threads) {
    cfg.validate();
    const std::vector<double> points = cfg.sweep_points();
    std::vector<Task> tasks;
    for (std::size_t p = 0; p < points.size(); ++p) {
        for (int s = 0; s < cfg.seeds; ++s) tasks.push_back({p, s});
    }

    std::vector<std::vector<ResultRow>> out(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const Task& t = tasks[i];
            const Scenario scn = cfg.scenario_at(points[t.point_index]);
            const std::uint64_t seed = cfg.base_seed + static_cast<std::uint64_t>(t.seed_index);
            const ChannelSet ch = channel::generate(scn, seed);
            for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
                ResultRow row = run_scheme(cfg.algorithms[a], scn, ch, seed, cfg.regression);
                row.algorithm_index = a;
                row.point_index = t.point_index;
                out[i].push_back(std::move(row));
            }
        }
    };
    const int n_threads = std::max(1, std::min<int>(threads, static_cast<int>(tasks.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::vector<ResultRow> rows;
    for (auto& v : out) {
        for (auto& r : v) rows.push_back(std::move(r));
    }
    std::sort(rows.begin(), rows.end(), [](const ResultRow& x, const ResultRow& y) {
        if (x.algorithm_index != y.algorithm_index) return x.algorithm_index < y.algorithm_index;
        if (x.seed != y.seed) return x.seed < y.seed;
        return x.point_index < y.point_index;
    });
    return rows;
}

std::vector<SweepStat> summarize(const ExperimentConfig& cfg, const std::vector<ResultRow>& rows) {
    const std::vector<double> points = cfg.sweep_points();
    std::map<std::pair<std::size_t, std::size_t>, std::vector<const ResultRow*>> groups;
    for (const ResultRow& r : rows) {
        if (r.status == "solver_failure") continue;
        groups[{r.algorithm_index, r.point_index}].push_back(&r);
    }
    std::vector<SweepStat> stats;
    for (const auto& [key, members] : groups) {
        SweepStat s;
        s.algorithm_index = key.first;
        s.algorithm = members.front()->algorithm;
        s.variant = members.front()->variant;
        s.axis_value = cfg.axis == SweepAxis::None ? 0.0 : points[key.second];
        s.count = static_cast<int>(members.size());
        double sum = 0.0;
        for (const ResultRow* r : members) sum += r->ar_bits;
        s.mean = sum / s.count;
        if (s.count > 1) {
            double ss = 0.0;
            for (const ResultRow* r : members) ss += (r->ar_bits - s.mean) * (r->ar_bits - s.mean);
            s.stderr_mean = std::sqrt(ss / (s.count - 1) / s.count);
        }
        stats.push_back(s);
    }
    return stats;
}

FitBetaResult run_fit_beta(const Scenario& scn, const ChannelSet& ch, int grid_points) {
    const PaState init = max_snr::initial_state(scn, ch);
    const pa_beta::PaCoefficients k = pa_beta::pa_coefficients(scn, ch, init.theta_dir, init.v);

    FitBetaResult res;
    res.grid = pa_beta::uniform_samples(grid_points);
    for (double b : res.grid) res.snr.push_back(pa_beta::eval_f_beta(k, b));

    for (const auto& [j, q] : std::vector<std::pair<int, int>>{{101, 2}, {201, 2}, {101, 3}, {201, 3}}) {
        const auto cfg = pa_beta::RegressionConfig::make(q, j);
        const pa_beta::FitResult fit = pa_beta::optimize_beta(k, cfg, init.beta);
        FitCurve c;
        c.j_samples = j;
        c.q_order = q;
        c.coeffs = fit.coeffs;
        c.mse = fit.mse;
        c.beta_opt = fit.beta_opt;
        for (std::size_t i = 0; i < res.grid.size(); ++i) {
            const double y = pa_beta::eval_polynomial(c.coeffs, res.grid[i]);
            c.snr.push_back(y);
            c.max_abs_err = std::max(c.max_abs_err, std::abs(y - res.snr[i]));
        }
        res.fits.push_back(std::move(c));
    }
    return res;
}

std::vector<ConvergenceCurve> mean_convergence(const std::vector<ResultRow>& rows) {
    std::map<std::pair<std::size_t, int>, std::vector<const ResultRow*>> groups;
    for (const ResultRow& r : rows) {
        if (r.status == "solver_failure" || r.ar_trace.empty()) continue;
        groups[{r.algorithm_index, r.n_elements}].push_back(&r);
    }
    std::vector<ConvergenceCurve> curves;
    for (const auto& [key, members] : groups) {
        ConvergenceCurve c;
        c.algorithm = members.front()->algorithm;
        c.variant = members.front()->variant;
        c.n_elements = key.second;
        std::size_t len = 0;
        for (const ResultRow* r : members) len = std::max(len, r->ar_trace.size());
        c.mean_ar.assign(len, 0.0);
        for (const ResultRow* r : members) {
            for (std::size_t i = 0; i < len; ++i) c.mean_ar[i] += r->ar_trace[std::min(i, r->ar_trace.size() - 1)];
        }
        for (double& v : c.mean_ar) v /= static_cast<double>(members.size());
        curves.push_back(std::move(c));
    }
    return curves;
}

ExperimentConfig convergence_config(const ExperimentConfig& cfg) {
    ExperimentConfig c = cfg;
    c.axis = SweepAxis::NElements;
    c.axis_values.assign(cfg.convergence_n.begin(), cfg.convergence_n.end());
    return c;
}

}  // namespace airis::harness
