#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace airis {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using Point3 = Eigen::Vector3d;

inline double dbm_to_watt(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }

// Physical configuration of the BS / active-IRS / user link. Powers in watts.
struct Scenario {
    int m_antennas = 2;
    int n_elements = 128;
    double p_max = 1.0;
    double sigma2_irs = 1e-13;
    double sigma2_user = 1e-13;
    Point3 bs_pos{0.0, 30.0, 0.0};
    Point3 irs_pos{50.0, 0.0, 10.0};
    Point3 user_pos{25.0, 30.0, 0.0};
    double alpha_bi = 2.1;
    double alpha_iu = 2.1;
    double alpha_bu = 4.0;
    double pl0_db = -30.0;

    // Throws DomainError when an invariant is violated.
    void validate() const;

    double dist_bs_irs() const { return (irs_pos - bs_pos).norm(); }
    double dist_irs_user() const { return (user_pos - irs_pos).norm(); }
    double dist_bs_user() const { return (user_pos - bs_pos).norm(); }
};

// One realization of the three links.
//   g : N x M, BS -> IRS
//   f : N,     IRS -> user (the link row is f^H)
//   h : M,     BS -> user (the link row is h^H)
struct ChannelSet {
    CMat g;
    CVec f;
    CVec h;

    int n_elements() const { return static_cast<int>(f.size()); }
    int m_antennas() const { return static_cast<int>(h.size()); }

    // Throws DimensionError naming the first inconsistent operand.
    void check(const Scenario& scn) const;
};

// Max-SNR-PA iterate. The IRS applies Theta = diag(theta^H).
struct PaState {
    double beta = 0.5;
    CVec v;
    CVec theta;
    double rho = 0.0;
    CVec theta_dir;

    // theta = rho * dir; dir must be unit norm (or empty when N = 0).
    static PaState from_direction(double beta, CVec v, double rho, CVec dir);
    // Splits theta into rho and direction; a zero theta keeps `fallback_dir`.
    static PaState from_theta(double beta, CVec v, CVec theta, const CVec& fallback_dir);
};

// Max-AR-CFFP iterate.
struct CffpState {
    CVec v1;
    CVec theta;
    cd mu{0.0, 0.0};
    double gamma = 0.0;
};

}  // namespace airis
