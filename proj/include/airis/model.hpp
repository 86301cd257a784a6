#pragma once

// Deterministic power, SNR and rate formulas for the active-IRS link.
//
// The reflection matrix is Theta = diag(theta^H) and is never formed; every
// product with Theta is carried out elementwise on theta.

#include "airis/types.hpp"

namespace airis {

// a with a_n = conj(f_n) * (G v)_n, so that f^H Theta G v = theta^H a.
CVec cascade_vector(const ChannelSet& ch, const CVec& v);

// (f^H Theta G + h^H) v.
cd combined_gain(const ChannelSet& ch, const CVec& theta, const CVec& v);

// ||f^H Theta||^2 = sum |f_n|^2 |theta_n|^2.
double irs_noise_gain(const ChannelSet& ch, const CVec& theta);

// ||Theta G v||^2 = sum |theta_n|^2 |(G v)_n|^2.
double reflected_signal_power(const ChannelSet& ch, const CVec& theta, const CVec& v);

// beta P |(f^H Theta G + h^H) v|^2 / (sigma_I^2 ||f^H Theta||^2 + sigma_n^2)
double snr_pa(const Scenario& scn, const ChannelSet& ch, const PaState& st);

// log2(1 + snr). Throws DomainError on negative input.
double achievable_rate(double snr);

// beta P ||Theta G v||^2 + sigma_I^2 ||theta||^2
double irs_power_pa(const Scenario& scn, const ChannelSet& ch, const PaState& st);

// (1 - beta) P - irs_power_pa; the state is feasible iff this is >= -tol.
double budget_residual_pa(const Scenario& scn, const ChannelSet& ch, const PaState& st);

// |(f^H Theta G + h^H) v1|^2 / (sigma_I^2 ||f^H Theta||^2 + sigma_n^2)
double snr_no_pa(const Scenario& scn, const ChannelSet& ch, const CffpState& st);

// v1^H v1 + ||Theta G v1||^2 + sigma_I^2 ||theta||^2
double total_power_no_pa(const Scenario& scn, const ChannelSet& ch, const CffpState& st);

// Shape checks shared by the operations above.
void check_pa_state(const Scenario& scn, const ChannelSet& ch, const PaState& st);
void check_cffp_state(const Scenario& scn, const ChannelSet& ch, const CffpState& st);

}  // namespace airis
