#include "airis/max_snr_pa.hpp"

#include "airis/error.hpp"
#include "airis/model.hpp"

#include <chrono>
#include <cmath>

namespace airis::max_snr {

namespace {

double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

void check_forms(const ThetaForms& forms, const CVec& theta) {
    const Eigen::Index n = forms.a.size();
    if (forms.t.size() != n) throw DimensionError("t", n, forms.t.size());
    if (forms.e.size() != n) throw DimensionError("E.diag", n, forms.e.size());
    if (forms.f.size() != n) throw DimensionError("F.diag", n, forms.f.size());
    if (theta.size() != n) throw DimensionError("theta", n, theta.size());
    if (!(forms.sigma2_user > 0.0)) throw DomainError("theta forms: sigma_n^2 must be positive");
}

// Large multipliers turn a loose budget residual into a visible error in the
// parametric objective, so the subproblem is solved to machine precision.
constexpr qcqp::Tolerances kInnerTolerances{1e-9, 1e-8, 1e-15, 1e18};

bool within_budget(double power, double budget) { return power <= budget + 1e-9 * std::abs(budget); }

}  // namespace

ThetaForms build_theta_forms(const Scenario& scn, const ChannelSet& ch, double beta, const CVec& v) {
    ch.check(scn);
    if (v.size() != scn.m_antennas) throw DimensionError("v", scn.m_antennas, v.size());
    if (!(beta >= 0.0 && beta <= 1.0)) throw DomainError("build_theta_forms: beta must lie in [0, 1]");

    ThetaForms forms;
    forms.a = cascade_vector(ch, v);
    const cd direct = ch.h.dot(v);
    forms.t = std::conj(direct) * forms.a;
    forms.direct = std::norm(direct);
    forms.e = scn.sigma2_irs * ch.f.cwiseAbs2();
    forms.f = (beta * scn.p_max) * (ch.g * v).cwiseAbs2() + RVec::Constant(scn.n_elements, scn.sigma2_irs);
    forms.budget = (1.0 - beta) * scn.p_max;
    forms.sigma2_user = scn.sigma2_user;
    forms.signal_scale = beta * scn.p_max / scn.sigma2_user;
    return forms;
}

double forms_ratio(const ThetaForms& forms, const CVec& theta) {
    check_forms(forms, theta);
    const cd proj = theta.dot(forms.a);
    const double num = std::norm(proj) + 2.0 * theta.dot(forms.t).real() + forms.direct;
    const double den = (forms.e.dot(theta.cwiseAbs2()) + forms.sigma2_user) / forms.sigma2_user;
    return forms.signal_scale * num / den;
}

double forms_power(const ThetaForms& forms, const CVec& theta) {
    check_forms(forms, theta);
    return forms.f.dot(theta.cwiseAbs2());
}

DinkelbachResult dinkelbach(const ThetaForms& forms, const CVec& theta_init, double xi, int max_iters) {
    check_forms(forms, theta_init);
    if (!(xi > 0.0)) throw DomainError("dinkelbach: xi must be positive");
    if (max_iters < 1) throw DomainError("dinkelbach: max_iters must be >= 1");
    if (!within_budget(forms_power(forms, theta_init), forms.budget)) {
        throw DomainError("dinkelbach: theta_init violates the IRS budget");
    }

    DinkelbachResult res;
    const Eigen::Index n = forms.a.size();
    if (!(forms.budget > 0.0)) {
        // F is positive definite, so a zero budget admits only theta = 0.
        res.theta = CVec::Zero(n);
        res.converged = true;
        return res;
    }

    const RVec e_scaled = forms.e / forms.sigma2_user;
    CVec theta = theta_init;
    double eta = forms_ratio(forms, theta);
    for (int i = 0; i < max_iters; ++i) {
        const cd proj = theta.dot(forms.a);
        const CVec q = forms.signal_scale * (std::conj(proj) * forms.a + forms.t);
        const RVec a_diag = eta * e_scaled;
        const qcqp::Solution sol = qcqp::solve_trust_region_diag(q, a_diag, forms.f, forms.budget, kInnerTolerances);

        // Parametric objective written in terms of the step, so that it stays
        // accurate when the ratio itself is large.
        const CVec step = sol.x - theta;
        const CVec sum = sol.x + theta;
        double quad = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) quad += e_scaled(k) * (step(k) * std::conj(sum(k))).real();
        const double f_eta = 2.0 * q.dot(step).real() - eta * quad;

        res.kkt.push_back(sol.kkt);
        res.history.push_back({sol.x, eta, f_eta, i});

        const double next_eta = forms_ratio(forms, sol.x);
        if (!std::isfinite(next_eta)) throw SolverError("dinkelbach: non-finite ratio");
        if (next_eta < eta) {
            // Roundoff-level regression: keep the previous point.
            res.history.back().theta = theta;
            res.converged = f_eta <= xi;
            break;
        }
        theta = sol.x;
        eta = next_eta;
        if (f_eta <= xi) {
            res.converged = true;
            break;
        }
    }
    res.theta = std::move(theta);
    return res;
}

DinkelbachResult dinkelbach_theta(const Scenario& scn, const ChannelSet& ch, double beta, const CVec& v,
                                  const CVec& theta_init, double xi, int max_iters) {
    return dinkelbach(build_theta_forms(scn, ch, beta, v), theta_init, xi, max_iters);
}

CVec combined_channel(const ChannelSet& ch, const CVec& theta) {
    if (theta.size() != ch.f.size()) throw DimensionError("theta", ch.f.size(), theta.size());
    return ch.g.adjoint() * ch.f.cwiseProduct(theta) + ch.h;
}

VUpdate update_v(const Scenario& scn, const ChannelSet& ch, double beta, const CVec& theta, const CVec& v_prev) {
    ch.check(scn);
    if (v_prev.size() != scn.m_antennas) throw DimensionError("v_prev", scn.m_antennas, v_prev.size());
    if (theta.size() != scn.n_elements) throw DimensionError("theta", scn.n_elements, theta.size());
    if (std::abs(v_prev.norm() - 1.0) > 1e-9) throw DomainError("update_v: v_prev must have unit norm");

    VUpdate out;
    out.v = v_prev;
    if (!(beta > 0.0)) {
        out.status = VStatus::BudgetExhausted;
        return out;
    }
    const double p_prime = ((1.0 - beta) * scn.p_max - scn.sigma2_irs * theta.squaredNorm()) / (beta * scn.p_max);
    if (!(p_prime > 0.0)) {
        out.status = VStatus::BudgetExhausted;
        return out;
    }
    const CVec r = combined_channel(ch, theta);
    const CVec b = r * r.dot(v_prev);
    if (b.squaredNorm() == 0.0) {
        out.status = VStatus::Degenerate;
        return out;
    }
    const CVec gv_weight = theta.cwiseAbs2().cast<cd>();
    const CMat c = ch.g.adjoint() * gv_weight.asDiagonal() * ch.g;

    const qcqp::Solution sol = qcqp::solve_two_constraint(b, c, v_prev, p_prime);
    out.kkt = sol.kkt;
    if (sol.status == qcqp::Status::Infeasible) {
        out.status = VStatus::Infeasible;
        return out;
    }
    const double nrm = sol.x.norm();
    if (sol.status == qcqp::Status::Degenerate || !(nrm > 0.0)) {
        out.status = VStatus::Degenerate;
        return out;
    }
    out.v = sol.x / nrm;
    return out;
}

CVec aligned_direction(const ChannelSet& ch, const CVec& v) {
    const Eigen::Index n = ch.f.size();
    CVec dir(n);
    if (n == 0) return dir;
    const CVec a = cascade_vector(ch, v);
    const cd direct = ch.h.dot(v);
    const double ref = direct == cd{0.0, 0.0} ? 0.0 : std::arg(direct);
    const double mag = 1.0 / std::sqrt(static_cast<double>(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        const double ph = a(k) == cd{0.0, 0.0} ? 0.0 : std::arg(a(k));
        dir(k) = std::polar(mag, ph - ref);
    }
    return dir;
}

PaState initial_state(const Scenario& scn, const ChannelSet& ch, double beta) {
    ch.check(scn);
    CVec v = CVec::Zero(scn.m_antennas);
    const double hn = ch.h.norm();
    if (hn > 0.0) {
        v = ch.h / hn;
    } else {
        v(0) = 1.0;
    }
    CVec dir = aligned_direction(ch, v);
    const double rho = pa_beta::rho_of_beta(scn, ch, dir, v, beta);
    return PaState::from_direction(beta, std::move(v), rho, std::move(dir));
}

SnrPaRun run_max_snr_pa(const Scenario& scn, const ChannelSet& ch, const PaState& init, const SnrPaOptions& opts) {
    scn.validate();
    check_pa_state(scn, ch, init);
    opts.regression.validate();
    if (!(opts.eps > 0.0) || !(opts.xi > 0.0)) throw DomainError("run_max_snr_pa: tolerances must be positive");
    if (opts.max_outer < 1 || opts.max_inner < 1) throw DomainError("run_max_snr_pa: iteration caps must be >= 1");
    if (opts.fixed_beta) {
        const double b = *opts.fixed_beta;
        if (!(b > 0.0 && b <= 1.0)) throw DomainError("run_max_snr_pa: fixed beta must lie in (0, 1]");
        if (init.beta != b) throw DomainError("run_max_snr_pa: init beta differs from the fixed beta");
    }
    if (budget_residual_pa(scn, ch, init) < -1e-9 * scn.p_max) {
        throw DomainError("run_max_snr_pa: initial state violates the power budget");
    }

    SnrPaRun run;
    PaState st = init;
    auto snr_of = [&](const PaState& s) { return snr_pa(scn, ch, s); };
    auto record = [&](int k, double snr, bool accepted, int inner, VStatus vs, std::vector<qcqp::KktReport> kkt,
                      double ms) {
        if (!std::isfinite(snr)) throw SolverError("run_max_snr_pa: non-finite SNR at iteration " + std::to_string(k));
        SnrPaIteration it;
        it.iteration = k;
        it.beta = st.beta;
        it.snr = snr;
        it.ar_bits = achievable_rate(snr);
        it.p_bs = st.beta * scn.p_max;
        it.p_irs = irs_power_pa(scn, ch, st);
        it.beta_accepted = accepted;
        it.inner_iters = inner;
        it.v_status = vs;
        it.kkt = std::move(kkt);
        it.wall_ms = ms;
        run.trace.iterations.push_back(std::move(it));
        return run.trace.iterations.back().ar_bits;
    };

    double prev_ar = record(0, snr_of(st), false, 0, VStatus::Updated, {}, 0.0);
    for (int k = 1; k <= opts.max_outer; ++k) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<qcqp::KktReport> kkt;

        bool accepted = false;
        if (!opts.fixed_beta) {
            const pa_beta::PaCoefficients coeffs = pa_beta::pa_coefficients(scn, ch, st.theta_dir, st.v);
            const pa_beta::FitResult fit = pa_beta::optimize_beta(coeffs, opts.regression, st.beta);
            const double rho = pa_beta::rho_of_beta(scn, ch, st.theta_dir, st.v, fit.beta_opt);
            PaState cand = PaState::from_direction(fit.beta_opt, st.v, rho, st.theta_dir);
            if (snr_of(cand) >= snr_of(st)) {
                st = std::move(cand);
                accepted = true;
            }
        }

        const double snr_before_v = snr_of(st);
        const VUpdate vu = update_v(scn, ch, st.beta, st.theta, st.v);
        kkt.push_back(vu.kkt);
        if (vu.status == VStatus::Updated) {
            PaState cand = st;
            cand.v = vu.v;
            if (budget_residual_pa(scn, ch, cand) < 0.0) {
                const double rho = pa_beta::rho_of_beta(scn, ch, cand.theta_dir, cand.v, cand.beta);
                cand = PaState::from_direction(cand.beta, cand.v, std::min(rho, cand.rho), cand.theta_dir);
            }
            if (snr_of(cand) >= snr_before_v) st = std::move(cand);
        }

        const DinkelbachResult dk = dinkelbach_theta(scn, ch, st.beta, st.v, st.theta, opts.xi, opts.max_inner);
        kkt.insert(kkt.end(), dk.kkt.begin(), dk.kkt.end());
        st = PaState::from_theta(st.beta, st.v, dk.theta, st.theta_dir);

        const double ar = record(k, snr_of(st), accepted, static_cast<int>(dk.history.size()), vu.status,
                                 std::move(kkt), elapsed_ms(t0));
        if (std::abs(ar - prev_ar) <= opts.eps) {
            run.trace.converged = true;
            break;
        }
        prev_ar = ar;
    }
    run.state = std::move(st);
    return run;
}

}  // namespace airis::max_snr
