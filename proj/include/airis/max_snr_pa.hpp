#pragma once

// Max-SNR-PA: alternating optimization of the power-allocation factor beta,
// the BS beam v and the active-IRS coefficients theta under the shared budget
//
//   beta P ||Theta G v||^2 + sigma_I^2 ||theta||^2 <= (1 - beta) P.
//
// The theta block is a ratio of quadratics handled by Dinkelbach iterations
// with a linearized numerator; the v block is one SCA step.

#include "airis/pa_beta.hpp"
#include "airis/qcqp.hpp"
#include "airis/types.hpp"

#include <optional>
#include <vector>

namespace airis::max_snr {

// Quadratic forms of the theta subproblem for fixed (beta, v):
//   D = a a^H, t = conj(h^H v) a, E = diag(e), F = diag(f).
// The SNR is  s (theta^H D theta + 2Re{t^H theta} + direct) / (theta^H E theta + sigma_n^2) * sigma_n^2
// with s = beta P / sigma_n^2.
struct ThetaForms {
    CVec a;
    CVec t;
    RVec e;
    RVec f;
    double direct = 0.0;       // |h^H v|^2
    double budget = 0.0;       // (1 - beta) P
    double sigma2_user = 1.0;  // sigma_n^2
    double signal_scale = 0.0; // beta P / sigma_n^2
};

ThetaForms build_theta_forms(const Scenario& scn, const ChannelSet& ch, double beta, const CVec& v);

// SNR of theta under the forms; equals snr_pa for the same (beta, v, theta).
double forms_ratio(const ThetaForms& forms, const CVec& theta);

// theta^H F theta
double forms_power(const ThetaForms& forms, const CVec& theta);

struct DinkelbachState {
    CVec theta;
    double eta = 0.0;       // ratio at the start of the iteration
    double f_of_eta = 0.0;  // parametric objective attained by the subproblem
    int iteration = 0;
};

struct DinkelbachResult {
    CVec theta;
    std::vector<DinkelbachState> history;
    std::vector<qcqp::KktReport> kkt;
    bool converged = false;
};

DinkelbachResult dinkelbach(const ThetaForms& forms, const CVec& theta_init, double xi, int max_iters = 50);

DinkelbachResult dinkelbach_theta(const Scenario& scn, const ChannelSet& ch, double beta, const CVec& v,
                                  const CVec& theta_init, double xi, int max_iters = 50);

enum class VStatus {
    Updated,
    BudgetExhausted,  // P' <= 0, v_prev returned
    Infeasible,       // linearized set empty, v_prev returned
    Degenerate,       // zero combined channel, v_prev returned
};

struct VUpdate {
    CVec v;
    VStatus status = VStatus::Updated;
    qcqp::KktReport kkt;
};

// r = (f^H Theta G + h^H)^H
CVec combined_channel(const ChannelSet& ch, const CVec& theta);

VUpdate update_v(const Scenario& scn, const ChannelSet& ch, double beta, const CVec& theta, const CVec& v_prev);

struct SnrPaOptions {
    double eps = 1e-3;
    double xi = 1e-6;
    int max_outer = 100;
    int max_inner = 50;
    pa_beta::RegressionConfig regression{};
    std::optional<double> fixed_beta;  // skip the beta step
};

struct SnrPaIteration {
    int iteration = 0;
    double beta = 0.0;
    double ar_bits = 0.0;
    double snr = 0.0;
    double p_bs = 0.0;
    double p_irs = 0.0;
    bool beta_accepted = false;
    int inner_iters = 0;
    VStatus v_status = VStatus::Updated;
    std::vector<qcqp::KktReport> kkt;
    double wall_ms = 0.0;
};

struct SnrPaTrace {
    std::vector<SnrPaIteration> iterations;
    bool converged = false;
};

struct SnrPaRun {
    PaState state;
    SnrPaTrace trace;
};

// v = h/||h||, beta = 0.5, theta_dir phase-aligned with the direct path,
// rho from rho_of_beta.
PaState initial_state(const Scenario& scn, const ChannelSet& ch, double beta = 0.5);

// Unit-norm direction with arg(dir_n) = arg(a_n) - arg(h^H v), so every
// cascaded term adds in phase with the direct path.
CVec aligned_direction(const ChannelSet& ch, const CVec& v);

SnrPaRun run_max_snr_pa(const Scenario& scn, const ChannelSet& ch, const PaState& init,
                        const SnrPaOptions& opts = {});

}  // namespace airis::max_snr
