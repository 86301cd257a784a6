#include "airis/baselines.hpp"

#include "airis/error.hpp"
#include "airis/model.hpp"
#include "airis/pa_beta.hpp"
#include "airis/philox.hpp"

#include <cmath>
#include <numbers>

namespace airis::baselines {

namespace {

CVec unit_or_first(const CVec& x, Eigen::Index m) {
    const double n = x.norm();
    if (n > 0.0) return x / n;
    CVec e = CVec::Zero(m);
    e(0) = 1.0;
    return e;
}

}  // namespace

max_snr::SnrPaRun run_fixed_beta(const Scenario& scn, const ChannelSet& ch, double beta_fixed, double eps,
                                int max_iters) {
    if (!(beta_fixed > 0.0 && beta_fixed < 1.0)) throw DomainError("run_fixed_beta: beta must lie in (0, 1)");
    max_snr::SnrPaOptions opts;
    opts.eps = eps;
    opts.max_outer = max_iters;
    opts.fixed_beta = beta_fixed;
    return max_snr::run_max_snr_pa(scn, ch, max_snr::initial_state(scn, ch, beta_fixed), opts);
}

double passive_snr(const Scenario& scn, const ChannelSet& ch, const CVec& theta, const CVec& v) {
    return scn.p_max * std::norm(combined_gain(ch, theta, v)) / scn.sigma2_user;
}

BaselineRun run_passive_irs(const Scenario& scn, const ChannelSet& ch, int iters) {
    scn.validate();
    ch.check(scn);
    if (iters < 1) throw DomainError("run_passive_irs: iters must be >= 1");

    const Eigen::Index n = scn.n_elements;
    CVec v = unit_or_first(ch.h, scn.m_antennas);
    CVec theta = CVec::Ones(n);
    BaselineRun out;
    for (int k = 0; k < iters; ++k) {
        const CVec a = cascade_vector(ch, v);
        const cd direct = ch.h.dot(v);
        const double ref = direct == cd{0.0, 0.0} ? 0.0 : std::arg(direct);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double ph = a(i) == cd{0.0, 0.0} ? 0.0 : std::arg(a(i));
            theta(i) = std::polar(1.0, ph - ref);
        }
        v = unit_or_first(max_snr::combined_channel(ch, theta), scn.m_antennas);
        out.ar_trace.push_back(achievable_rate(passive_snr(scn, ch, theta, v)));
    }
    const CVec dir = n > 0 ? CVec(theta / std::sqrt(static_cast<double>(n))) : CVec(0);
    out.state = PaState::from_direction(1.0, v, std::sqrt(static_cast<double>(n)), dir);
    out.snr = passive_snr(scn, ch, theta, v);
    out.ar_bits = achievable_rate(out.snr);
    out.p_bs = scn.p_max;
    out.p_irs = 0.0;
    out.note = "passive";
    return out;
}

BaselineRun run_random_phase(const Scenario& scn, const ChannelSet& ch, std::uint64_t seed,
                             const pa_beta::RegressionConfig& reg) {
    scn.validate();
    ch.check(scn);
    const Eigen::Index n = scn.n_elements;

    PhiloxStream rng({seed, kPhaseStreamTag});
    CVec dir(n);
    const double mag = n > 0 ? 1.0 / std::sqrt(static_cast<double>(n)) : 0.0;
    for (Eigen::Index i = 0; i < n; ++i) dir(i) = std::polar(mag, 2.0 * std::numbers::pi * rng.next_open01());

    CVec v = unit_or_first(ch.h, scn.m_antennas);
    const pa_beta::FitResult fit = pa_beta::optimize_beta(pa_beta::pa_coefficients(scn, ch, dir, v), reg, 0.5);
    const double beta = fit.beta_opt;
    double rho = pa_beta::rho_of_beta(scn, ch, dir, v, beta);
    BaselineRun out;
    out.ar_trace.push_back(achievable_rate(snr_pa(scn, ch, PaState::from_direction(beta, v, rho, dir))));

    v = unit_or_first(max_snr::combined_channel(ch, rho * dir), scn.m_antennas);
    rho = pa_beta::rho_of_beta(scn, ch, dir, v, beta);
    out.state = PaState::from_direction(beta, v, rho, dir);
    out.snr = snr_pa(scn, ch, out.state);
    out.ar_bits = achievable_rate(out.snr);
    out.ar_trace.push_back(out.ar_bits);
    out.p_bs = beta * scn.p_max;
    out.p_irs = irs_power_pa(scn, ch, out.state);
    out.note = "active IRS, random phases";
    return out;
}

BaselineRun run_no_irs(const Scenario& scn, const ChannelSet& ch) {
    scn.validate();
    ch.check(scn);
    BaselineRun out;
    const CVec v = unit_or_first(ch.h, scn.m_antennas);
    const CVec dir = scn.n_elements > 0 ? CVec(CVec::Constant(scn.n_elements, 1.0 / std::sqrt(scn.n_elements)))
                                        : CVec(0);
    out.state = PaState::from_direction(1.0, v, 0.0, dir);
    out.snr = scn.p_max * ch.h.squaredNorm() / scn.sigma2_user;
    out.ar_bits = achievable_rate(out.snr);
    out.ar_trace.push_back(out.ar_bits);
    out.p_bs = scn.p_max;
    out.p_irs = 0.0;
    out.note = "no IRS";
    return out;
}

}  // namespace airis::baselines
