#include "airis/max_ar_cffp.hpp"

#include "airis/error.hpp"
#include "airis/max_snr_pa.hpp"
#include "airis/model.hpp"

#include <chrono>
#include <cmath>

namespace airis::cffp {

namespace {

double noise_term(const Scenario& scn, const ChannelSet& ch, const CVec& theta) {
    return scn.sigma2_irs * irs_noise_gain(ch, theta) + scn.sigma2_user;
}

struct MuGamma {
    cd mu;
    double gamma;
};

MuGamma mu_gamma_step(const Scenario& scn, const ChannelSet& ch, const CffpState& st, CffpVariant variant) {
    CffpState tmp = st;
    if (variant == CffpVariant::StandardFp) {
        // Joint maximizer of the exact surrogate: gamma = SNR and mu consistent with it.
        tmp.gamma = snr_no_pa(scn, ch, st);
    }
    tmp.mu = update_mu(scn, ch, tmp, variant);
    const double varpi = (std::conj(tmp.mu) * combined_signal(ch, tmp)).real();
    return {tmp.mu, update_gamma(varpi)};
}

}  // namespace

std::string to_string(CffpVariant v) {
    return v == CffpVariant::PaperFaithful ? "paper_faithful" : "standard_fp";
}

CffpVariant variant_from_string(const std::string& s) {
    if (s == "paper_faithful") return CffpVariant::PaperFaithful;
    if (s == "standard_fp") return CffpVariant::StandardFp;
    throw DomainError("unknown CFFP variant '" + s + "' (expected paper_faithful or standard_fp)");
}

cd combined_signal(const ChannelSet& ch, const CffpState& st) { return combined_gain(ch, st.theta, st.v1); }

cd update_mu(const Scenario& scn, const ChannelSet& ch, const CffpState& st, CffpVariant variant) {
    check_cffp_state(scn, ch, st);
    const cd c = combined_signal(ch, st);
    double den = noise_term(scn, ch, st.theta);
    if (variant == CffpVariant::StandardFp) den += std::norm(c);
    return std::sqrt(1.0 + st.gamma) * c / den;
}

double update_gamma(double varpi) {
    if (!(varpi > 0.0)) return 0.0;
    return 0.5 * (varpi * varpi + varpi * std::sqrt(varpi * varpi + 4.0));
}

BlockUpdate update_v1(const Scenario& scn, const ChannelSet& ch, const CffpState& st, CffpVariant variant) {
    check_cffp_state(scn, ch, st);
    const double p_r = scn.p_max - scn.sigma2_irs * st.theta.squaredNorm();
    if (!(p_r > 0.0)) throw DomainError("update_v1: the IRS coefficients exhaust the total budget (P_r <= 0)");

    const CVec r = max_snr::combined_channel(ch, st.theta);
    BlockUpdate out;
    out.x = st.v1;
    const double mu_abs = std::abs(st.mu);
    if (mu_abs == 0.0 || r.squaredNorm() == 0.0) {
        out.degenerate = true;
        return out;
    }
    CMat h = ch.g.adjoint() * st.theta.cwiseAbs2().cast<cd>().asDiagonal() * ch.g;
    h += CMat::Identity(scn.m_antennas, scn.m_antennas);

    // Objective divided by sqrt(1+gamma) |mu|, which leaves the maximizer
    // unchanged and keeps the data finite when gamma is large.
    const cd phase = st.mu / mu_abs;
    const CVec q = phase * r;
    qcqp::Solution sol;
    if (variant == CffpVariant::PaperFaithful) {
        sol = qcqp::solve_lin_ellipsoid(2.0 * q, h, p_r);
    } else {
        const double w = mu_abs / std::sqrt(1.0 + st.gamma);
        sol = qcqp::solve_trust_region(q, w * (r * r.adjoint()), h, p_r);
    }
    out.kkt = sol.kkt;
    if (sol.status == qcqp::Status::Degenerate) {
        out.degenerate = true;
        return out;
    }
    out.x = std::move(sol.x);
    return out;
}

BlockUpdate update_theta_cffp(const Scenario& scn, const ChannelSet& ch, const CffpState& st, CffpVariant variant) {
    check_cffp_state(scn, ch, st);
    const double p_b = scn.p_max - st.v1.squaredNorm();
    BlockUpdate out;
    if (!(p_b > 0.0)) {
        if (p_b < -1e-12 * scn.p_max) throw DomainError("update_theta_cffp: the BS beam exceeds the total budget");
        // L is positive definite, so only theta = 0 fits a zero budget.
        out.x = CVec::Zero(scn.n_elements);
        return out;
    }

    const double mu_abs = std::abs(st.mu);
    if (mu_abs == 0.0) {
        out.x = CVec::Zero(scn.n_elements);
        return out;
    }
    // Objective divided by sqrt(1+gamma) |mu|.
    const CVec a = cascade_vector(ch, st.v1);
    const double w = mu_abs / std::sqrt(1.0 + st.gamma);
    CVec q = std::conj(st.mu / mu_abs) * a;
    const RVec j = (w * scn.sigma2_irs) * ch.f.cwiseAbs2();
    const RVec l = (ch.g * st.v1).cwiseAbs2() + RVec::Constant(scn.n_elements, scn.sigma2_irs);

    qcqp::Solution sol;
    if (variant == CffpVariant::PaperFaithful) {
        sol = qcqp::solve_trust_region_diag(q, j, l, p_b);
    } else {
        const cd direct = ch.h.dot(st.v1);
        q -= (w * std::conj(direct)) * a;
        sol = qcqp::solve_trust_region_diag_rank1(q, {j, a, w}, l, p_b);
    }
    out.kkt = sol.kkt;
    out.x = std::move(sol.x);
    return out;
}

double surrogate_value(const Scenario& scn, const ChannelSet& ch, const CffpState& st, CffpVariant variant) {
    check_cffp_state(scn, ch, st);
    // Completed square in mu:
    //   ln(1+g) - g + (1+g)|c|^2/D - D |mu - sqrt(1+g) c / D|^2
    // with (1+g)|c|^2/D - g = 1 - (1+g) noise/D when D carries |c|^2.
    const cd c = combined_signal(ch, st);
    const double noise = noise_term(scn, ch, st.theta);
    const double u = std::sqrt(1.0 + st.gamma);
    const double d = variant == CffpVariant::StandardFp ? noise + std::norm(c) : noise;
    const double gap = d * std::norm(st.mu - u * c / d);
    if (variant == CffpVariant::StandardFp) return std::log1p(st.gamma) + 1.0 - (1.0 + st.gamma) * (noise / d) - gap;
    return std::log1p(st.gamma) - st.gamma + (1.0 + st.gamma) * (std::norm(c) / d) - gap;
}

CffpState initial_state(const Scenario& scn, const ChannelSet& ch, CffpVariant variant) {
    ch.check(scn);
    CffpState st;
    const double hn = ch.h.norm();
    st.v1 = CVec::Zero(scn.m_antennas);
    if (hn > 0.0) {
        st.v1 = ch.h / hn;
    } else {
        st.v1(0) = 1.0;
    }
    if (cascade_vector(ch, st.v1).squaredNorm() == 0.0) {
        // nothing reaches the user through the IRS
        st.v1 *= std::sqrt(scn.p_max);
        st.theta = CVec::Zero(scn.n_elements);
        const MuGamma mg = mu_gamma_step(scn, ch, st, variant);
        st.mu = mg.mu;
        st.gamma = mg.gamma;
        return st;
    }
    st.v1 *= std::sqrt(0.5 * scn.p_max);
    const CVec dir = max_snr::aligned_direction(ch, st.v1);
    const double unit_draw = reflected_signal_power(ch, dir, st.v1) + scn.sigma2_irs * dir.squaredNorm();
    st.theta = unit_draw > 0.0 ? CVec(std::sqrt(0.5 * scn.p_max / unit_draw) * dir) : dir;
    const MuGamma mg = mu_gamma_step(scn, ch, st, variant);
    st.mu = mg.mu;
    st.gamma = mg.gamma;
    return st;
}

CffpRun run_max_ar_cffp(const Scenario& scn, const ChannelSet& ch, const CffpState& init, const CffpOptions& opts) {
    scn.validate();
    check_cffp_state(scn, ch, init);
    if (!(opts.zeta > 0.0)) throw DomainError("run_max_ar_cffp: zeta must be positive");
    if (opts.max_iters < 1) throw DomainError("run_max_ar_cffp: max_iters must be >= 1");
    if (total_power_no_pa(scn, ch, init) > scn.p_max * (1.0 + 1e-9)) {
        throw DomainError("run_max_ar_cffp: initial state violates the power budget");
    }

    const CffpVariant variant = opts.variant;
    CffpRun run;
    run.trace.variant = variant;
    CffpState st = init;

    auto finish = [&](CffpIteration& it) {
        it.snr = snr_no_pa(scn, ch, st);
        if (!std::isfinite(it.snr)) throw SolverError("run_max_ar_cffp: non-finite SNR");
        it.ar_bits = achievable_rate(it.snr);
        it.total_power = total_power_no_pa(scn, ch, st);
        it.p_bs = st.v1.squaredNorm();
        it.mu = st.mu;
        it.gamma = st.gamma;
    };

    {
        CffpIteration it;
        const double s = surrogate_value(scn, ch, st, variant);
        it.after_mu = it.after_gamma = it.after_v1 = it.after_theta = s;
        finish(it);
        run.trace.iterations.push_back(std::move(it));
    }
    double prev_ar = run.trace.iterations.back().ar_bits;

    for (int t = 1; t <= opts.max_iters; ++t) {
        const auto t0 = std::chrono::steady_clock::now();
        CffpIteration it;
        it.iteration = t;

        CffpState next = st;
        if (variant == CffpVariant::StandardFp) {
            const MuGamma mg = mu_gamma_step(scn, ch, next, variant);
            next.mu = mg.mu;
            next.gamma = mg.gamma;
            it.after_mu = it.after_gamma = surrogate_value(scn, ch, next, variant);
        } else {
            next.mu = update_mu(scn, ch, next, variant);
            it.after_mu = surrogate_value(scn, ch, next, variant);
            next.gamma = update_gamma((std::conj(next.mu) * combined_signal(ch, next)).real());
            it.after_gamma = surrogate_value(scn, ch, next, variant);
        }
        if (!std::isfinite(next.gamma) || !std::isfinite(std::abs(next.mu)) || !std::isfinite(it.after_gamma)) {
            run.trace.overflow = true;
            break;
        }

        const BlockUpdate vb = update_v1(scn, ch, next, variant);
        next.v1 = vb.x;
        it.after_v1 = surrogate_value(scn, ch, next, variant);
        it.kkt.push_back(vb.kkt);

        const BlockUpdate tb = update_theta_cffp(scn, ch, next, variant);
        next.theta = tb.x;
        it.after_theta = surrogate_value(scn, ch, next, variant);
        it.kkt.push_back(tb.kkt);
        if (!std::isfinite(it.after_theta)) {
            run.trace.overflow = true;
            break;
        }

        st = std::move(next);
        finish(it);
        it.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        const double ar = it.ar_bits;
        run.trace.iterations.push_back(std::move(it));
        if (std::abs(ar - prev_ar) <= opts.zeta) {
            run.trace.converged = true;
            break;
        }
        prev_ar = ar;
    }
    run.state = std::move(st);
    return run;
}

}  // namespace airis::cffp
