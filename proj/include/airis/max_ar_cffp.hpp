#pragma once

// Max-AR-CFFP: the rate log(1 + SNR_1) is replaced by a surrogate with
// auxiliaries mu (quadratic transform) and gamma (Lagrangian dual transform),
// and the four blocks mu, gamma, v1, theta are updated in turn under the
// total budget v1^H v1 + ||Theta G v1||^2 + sigma_I^2 ||theta||^2 <= P.

#include "airis/qcqp.hpp"
#include "airis/types.hpp"

#include <string>
#include <vector>

namespace airis::cffp {

enum class CffpVariant {
    PaperFaithful,  // mu denominator sigma_I^2 ||f^H Theta||^2 + sigma_n^2
    StandardFp,     // mu denominator additionally carries |c|^2
};

std::string to_string(CffpVariant v);
CffpVariant variant_from_string(const std::string& s);

// c = (f^H Theta G + h^H) v1
cd combined_signal(const ChannelSet& ch, const CffpState& st);

cd update_mu(const Scenario& scn, const ChannelSet& ch, const CffpState& st, CffpVariant variant);

// Stationary point of ln(1+g) - g + 2 sqrt(1+g) varpi; 0 when varpi <= 0.
double update_gamma(double varpi);

struct BlockUpdate {
    CVec x;
    qcqp::KktReport kkt;
    bool degenerate = false;  // zero linear term, previous block kept
};

BlockUpdate update_v1(const Scenario& scn, const ChannelSet& ch, const CffpState& st, CffpVariant variant);
BlockUpdate update_theta_cffp(const Scenario& scn, const ChannelSet& ch, const CffpState& st, CffpVariant variant);

// Natural-log domain.
double surrogate_value(const Scenario& scn, const ChannelSet& ch, const CffpState& st, CffpVariant variant);

struct CffpIteration {
    int iteration = 0;
    cd mu{0.0, 0.0};
    double gamma = 0.0;
    double after_mu = 0.0;
    double after_gamma = 0.0;
    double after_v1 = 0.0;
    double after_theta = 0.0;
    double ar_bits = 0.0;
    double snr = 0.0;
    double total_power = 0.0;
    double p_bs = 0.0;
    std::vector<qcqp::KktReport> kkt;
    double wall_ms = 0.0;
};

struct CffpTrace {
    CffpVariant variant = CffpVariant::PaperFaithful;
    std::vector<CffpIteration> iterations;
    bool converged = false;
    bool overflow = false;  // surrogate left the finite range (PaperFaithful gamma growth)
};

struct CffpOptions {
    CffpVariant variant = CffpVariant::PaperFaithful;
    double zeta = 1e-3;
    int max_iters = 200;
};

struct CffpRun {
    CffpState state;
    CffpTrace trace;
};

// v1 = sqrt(P/2) h/||h||, theta phase-aligned and scaled to draw P/2, then one
// mu/gamma pass.
CffpState initial_state(const Scenario& scn, const ChannelSet& ch, CffpVariant variant);

CffpRun run_max_ar_cffp(const Scenario& scn, const ChannelSet& ch, const CffpState& init,
                        const CffpOptions& opts = {});

}  // namespace airis::cffp
