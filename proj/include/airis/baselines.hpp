#pragma once

// Comparison schemes: fixed power-allocation factor, passive IRS, random
// phases on an active IRS, and no IRS at all.

#include "airis/max_snr_pa.hpp"
#include "airis/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace airis::baselines {

struct BaselineRun {
    PaState state;
    double snr = 0.0;
    double ar_bits = 0.0;
    double p_bs = 0.0;
    double p_irs = 0.0;
    std::vector<double> ar_trace;
    std::string note;
};

// Phase stream for random-phase draws, distinct from the channel stream.
inline constexpr std::uint64_t kPhaseStreamTag = 0x4149525350483031ULL;  // "AIRSPH01"

// Max-SNR-PA with beta pinned.
max_snr::SnrPaRun run_fixed_beta(const Scenario& scn, const ChannelSet& ch, double beta_fixed, double eps = 1e-3,
                                int max_iters = 100);

// |theta_n| = 1, full budget at the BS and no amplifier noise:
// SNR = P |theta^H a + h^H v|^2 / sigma_n^2 with ||v|| = 1.
double passive_snr(const Scenario& scn, const ChannelSet& ch, const CVec& theta, const CVec& v);

BaselineRun run_passive_irs(const Scenario& scn, const ChannelSet& ch, int iters = 3);

// Active IRS with i.i.d. uniform phases; beta from the regression step and v
// matched to the resulting combined channel.
BaselineRun run_random_phase(const Scenario& scn, const ChannelSet& ch, std::uint64_t seed,
                             const pa_beta::RegressionConfig& reg = {});

// v = h/||h||, AR = log2(1 + P ||h||^2 / sigma_n^2).
BaselineRun run_no_irs(const Scenario& scn, const ChannelSet& ch);

}  // namespace airis::baselines
