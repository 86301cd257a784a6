#pragma once

// Power-allocation factor subproblem: for fixed BS beam v and IRS direction
// theta_dir, the IRS norm rho is tied to beta by spending the whole budget,
// and the resulting SNR is the scalar rational function
//
//   f(beta) = (a beta^2 + b beta + 2 c beta sqrt(d beta^2 + e beta + f)) / (g beta + h).
//
// f is approximated by a least-squares polynomial whose stationary points in
// [0, 1] form the candidate set; the true f picks the winner.

#include "airis/types.hpp"

#include <span>
#include <vector>

namespace airis::pa_beta {

struct PaCoefficients {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double d = 0.0;
    double e = 0.0;
    double f = 0.0;
    double g = 0.0;
    double h = 0.0;
};

struct RegressionConfig {
    int q_order = 3;
    int j_samples = 201;

    // Throws DomainError unless 2 <= Q <= 5 and J >= 5 (Q + 1).
    static RegressionConfig make(int q_order, int j_samples);
    void validate() const;
};

struct PolyFit {
    std::vector<double> coeffs;  // a_0 .. a_Q
    double mse = 0.0;
    double normal_residual = 0.0;  // ||A^T A b - A^T c|| / ||A^T c||
};

struct FitResult {
    std::vector<double> coeffs;
    double mse = 0.0;
    std::vector<double> candidates;  // every beta compared by the true f
    double beta_opt = 0.0;
};

// sqrt((1 - beta) P / (beta P ||theta_dir^H diag(G v)||^2 + sigma_I^2))
double rho_of_beta(const Scenario& scn, const ChannelSet& ch, const CVec& theta_dir, const CVec& v, double beta);

PaCoefficients pa_coefficients(const Scenario& scn, const ChannelSet& ch, const CVec& theta_dir, const CVec& v);

// Radicands that are negative only through roundoff are clamped to zero.
double eval_f_beta(const PaCoefficients& k, double beta);

// J points uniform on [0, 1], endpoints included.
std::vector<double> uniform_samples(int j_samples);

PolyFit fit_polynomial(std::span<const double> betas, std::span<const double> values, int q_order);

double eval_polynomial(std::span<const double> coeffs, double beta);

// Real roots of the derivative of the fitted polynomial. Roots outside
// [0, 1] are mapped to 0; complex roots are dropped.
std::vector<double> stationary_candidates(std::span<const double> coeffs, int q_order);

// argmax of the true f over candidates + {0, 1, beta_prev}; ties go to the
// smallest beta.
double select_beta(const PaCoefficients& k, std::span<const double> candidates, double beta_prev);

// Sample, fit, find stationary points, select.
FitResult optimize_beta(const PaCoefficients& k, const RegressionConfig& cfg, double beta_prev);

}  // namespace airis::pa_beta
