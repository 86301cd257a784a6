#include "airis/model.hpp"

#include "airis/error.hpp"

#include <cmath>

namespace airis {

namespace {

void require_size(const char* operand, long expected, long actual) {
    if (expected != actual) throw DimensionError(operand, expected, actual);
}

bool all_finite(const CVec& x) { return x.allFinite(); }

}  // namespace

void Scenario::validate() const {
    if (m_antennas <= 0) throw DomainError("scenario: m_antennas must be positive");
    if (n_elements < 0) throw DomainError("scenario: n_elements must be nonnegative");
    if (!(p_max > 0.0) || !std::isfinite(p_max)) throw DomainError("scenario: p_max must be > 0");
    if (!(sigma2_irs > 0.0)) throw DomainError("scenario: sigma2_irs must be > 0");
    if (!(sigma2_user > 0.0)) throw DomainError("scenario: sigma2_user must be > 0");
    for (double a : {alpha_bi, alpha_iu, alpha_bu}) {
        if (!(a >= 2.0) || !std::isfinite(a)) throw DomainError("scenario: path-loss exponents must be >= 2");
    }
    if (!bs_pos.allFinite() || !irs_pos.allFinite() || !user_pos.allFinite()) {
        throw DomainError("scenario: positions must be finite");
    }
    if (!(dist_bs_irs() > 0.0) || !(dist_irs_user() > 0.0) || !(dist_bs_user() > 0.0)) {
        throw DomainError("scenario: node positions must be pairwise distinct");
    }
    if (!std::isfinite(pl0_db)) throw DomainError("scenario: pl0_db must be finite");
}

void ChannelSet::check(const Scenario& scn) const {
    require_size("G.rows", scn.n_elements, g.rows());
    require_size("G.cols", scn.m_antennas, g.cols());
    require_size("f", scn.n_elements, f.size());
    require_size("h", scn.m_antennas, h.size());
    if (!g.allFinite() || !all_finite(f) || !all_finite(h)) {
        throw DomainError("channel set contains non-finite entries");
    }
}

PaState PaState::from_direction(double beta, CVec v, double rho, CVec dir) {
    PaState st;
    st.beta = beta;
    st.v = std::move(v);
    st.rho = rho;
    st.theta = rho * dir;
    st.theta_dir = std::move(dir);
    return st;
}

PaState PaState::from_theta(double beta, CVec v, CVec theta, const CVec& fallback_dir) {
    const double rho = theta.norm();
    PaState st;
    st.beta = beta;
    st.v = std::move(v);
    st.rho = rho;
    st.theta_dir = rho > 0.0 ? CVec(theta / rho) : fallback_dir;
    st.theta = std::move(theta);
    return st;
}

CVec cascade_vector(const ChannelSet& ch, const CVec& v) {
    require_size("v", ch.g.cols(), v.size());
    return ch.f.conjugate().cwiseProduct(ch.g * v);
}

cd combined_gain(const ChannelSet& ch, const CVec& theta, const CVec& v) {
    require_size("theta", ch.f.size(), theta.size());
    require_size("v", ch.h.size(), v.size());
    // Eigen's dot() conjugates its left operand.
    return theta.dot(cascade_vector(ch, v)) + ch.h.dot(v);
}

double irs_noise_gain(const ChannelSet& ch, const CVec& theta) {
    require_size("theta", ch.f.size(), theta.size());
    return (ch.f.cwiseAbs2().cwiseProduct(theta.cwiseAbs2())).sum();
}

double reflected_signal_power(const ChannelSet& ch, const CVec& theta, const CVec& v) {
    require_size("theta", ch.g.rows(), theta.size());
    require_size("v", ch.g.cols(), v.size());
    return ((ch.g * v).cwiseAbs2().cwiseProduct(theta.cwiseAbs2())).sum();
}

void check_pa_state(const Scenario& scn, const ChannelSet& ch, const PaState& st) {
    ch.check(scn);
    require_size("v", scn.m_antennas, st.v.size());
    require_size("theta", scn.n_elements, st.theta.size());
}

void check_cffp_state(const Scenario& scn, const ChannelSet& ch, const CffpState& st) {
    ch.check(scn);
    require_size("v1", scn.m_antennas, st.v1.size());
    require_size("theta", scn.n_elements, st.theta.size());
}

double snr_pa(const Scenario& scn, const ChannelSet& ch, const PaState& st) {
    check_pa_state(scn, ch, st);
    const double signal = std::norm(combined_gain(ch, st.theta, st.v));
    const double noise = scn.sigma2_irs * irs_noise_gain(ch, st.theta) + scn.sigma2_user;
    return st.beta * scn.p_max * signal / noise;
}

double achievable_rate(double snr) {
    if (!(snr >= 0.0)) throw DomainError("achievable_rate: snr must be nonnegative");
    return std::log2(1.0 + snr);
}

double irs_power_pa(const Scenario& scn, const ChannelSet& ch, const PaState& st) {
    check_pa_state(scn, ch, st);
    return st.beta * scn.p_max * reflected_signal_power(ch, st.theta, st.v) +
           scn.sigma2_irs * st.theta.squaredNorm();
}

double budget_residual_pa(const Scenario& scn, const ChannelSet& ch, const PaState& st) {
    return (1.0 - st.beta) * scn.p_max - irs_power_pa(scn, ch, st);
}

double snr_no_pa(const Scenario& scn, const ChannelSet& ch, const CffpState& st) {
    check_cffp_state(scn, ch, st);
    const double signal = std::norm(combined_gain(ch, st.theta, st.v1));
    const double noise = scn.sigma2_irs * irs_noise_gain(ch, st.theta) + scn.sigma2_user;
    return signal / noise;
}

double total_power_no_pa(const Scenario& scn, const ChannelSet& ch, const CffpState& st) {
    check_cffp_state(scn, ch, st);
    return st.v1.squaredNorm() + reflected_signal_power(ch, st.theta, st.v1) +
           scn.sigma2_irs * st.theta.squaredNorm();
}

}  // namespace airis
