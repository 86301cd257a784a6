#include "airis/pa_beta.hpp"

#include "airis/error.hpp"
#include "airis/model.hpp"

#include <algorithm>
#include <cmath>

namespace airis::pa_beta {

namespace {

void require_unit_interval(double beta, const char* where) {
    if (!(beta >= 0.0 && beta <= 1.0)) {
        throw DomainError(std::string(where) + ": beta must lie in [0, 1]");
    }
}

// ||theta_dir^H diag(G v)||^2
double reflected_gain(const ChannelSet& ch, const CVec& dir, const CVec& v) {
    return reflected_signal_power(ch, dir, v);
}

}  // namespace

RegressionConfig RegressionConfig::make(int q_order, int j_samples) {
    RegressionConfig cfg{q_order, j_samples};
    cfg.validate();
    return cfg;
}

void RegressionConfig::validate() const {
    if (q_order < 2 || q_order > 5) throw DomainError("regression: Q must be an integer in [2, 5]");
    if (j_samples < 5 * (q_order + 1)) throw DomainError("regression: J must satisfy J >= 5 (Q + 1)");
}

double rho_of_beta(const Scenario& scn, const ChannelSet& ch, const CVec& theta_dir, const CVec& v, double beta) {
    require_unit_interval(beta, "rho_of_beta");
    const double u = reflected_gain(ch, theta_dir, v);
    return std::sqrt((1.0 - beta) * scn.p_max / (beta * scn.p_max * u + scn.sigma2_irs));
}

PaCoefficients pa_coefficients(const Scenario& scn, const ChannelSet& ch, const CVec& theta_dir, const CVec& v) {
    if (theta_dir.size() != scn.n_elements) throw DimensionError("theta_dir", scn.n_elements, theta_dir.size());
    if (v.size() != scn.m_antennas) throw DimensionError("v", scn.m_antennas, v.size());
    ch.check(scn);

    const double p = scn.p_max;
    const double s2i = scn.sigma2_irs;
    const double s2n = scn.sigma2_user;
    const cd direct = ch.h.dot(v);                           // h^H v
    const cd cascade = theta_dir.dot(cascade_vector(ch, v));  // theta_dir^H diag(f^H) G v
    const double u = reflected_gain(ch, theta_dir, v);       // ||theta_dir^H diag(G v)||^2
    const double w = irs_noise_gain(ch, theta_dir);          // ||theta_dir^H diag(f^H)||^2

    PaCoefficients k;
    k.a = p * p * std::norm(direct) * u - p * p * std::norm(cascade);
    k.b = p * p * std::norm(cascade) + p * std::norm(direct) * s2i;
    k.c = p * (cascade * std::conj(direct)).real();
    k.d = -p * p * u;
    k.e = p * p * u - s2i * p;
    k.f = p * s2i;
    k.g = s2n * p * u - s2i * p * w;
    k.h = s2i * p * w + s2n * s2i;
    return k;
}

double eval_f_beta(const PaCoefficients& k, double beta) {
    require_unit_interval(beta, "eval_f_beta");
    // d b^2 + e b + f = (1 - b)(f - d b) + b (d + e + f); the value at b = 1
    // is zero up to roundoff for coefficients built from a channel.
    const double scale = std::abs(k.d) + std::abs(k.e) + std::abs(k.f);
    double at_one = k.d + k.e + k.f;
    if (std::abs(at_one) <= 1e-12 * scale) at_one = 0.0;
    double rad = (1.0 - beta) * (k.f - k.d * beta) + beta * at_one;
    if (rad < 0.0) {
        if (rad < -1e-12 * scale) throw DomainError("eval_f_beta: negative radicand");
        rad = 0.0;
    }
    return (k.a * beta * beta + k.b * beta + 2.0 * k.c * beta * std::sqrt(rad)) / (k.g * beta + k.h);
}

std::vector<double> uniform_samples(int j_samples) {
    if (j_samples < 2) throw DomainError("uniform_samples: need at least two samples");
    std::vector<double> out(static_cast<std::size_t>(j_samples));
    for (int j = 0; j < j_samples; ++j) out[static_cast<std::size_t>(j)] = static_cast<double>(j) / (j_samples - 1);
    return out;
}

PolyFit fit_polynomial(std::span<const double> betas, std::span<const double> values, int q_order) {
    if (betas.size() != values.size()) {
        throw DimensionError("values", static_cast<long>(betas.size()), static_cast<long>(values.size()));
    }
    if (q_order < 1) throw DomainError("fit_polynomial: order must be >= 1");
    const auto j = static_cast<Eigen::Index>(betas.size());
    const Eigen::Index cols = q_order + 1;
    if (j < 5 * cols) throw DomainError("fit_polynomial: J must satisfy J >= 5 (Q + 1)");

    std::vector<double> sorted(betas.begin(), betas.end());
    std::sort(sorted.begin(), sorted.end());
    const auto distinct = std::unique(sorted.begin(), sorted.end()) - sorted.begin();
    if (distinct < cols) throw DomainError("fit_polynomial: rank-deficient design (too few distinct samples)");

    Eigen::MatrixXd a(j, cols);
    Eigen::VectorXd c(j);
    for (Eigen::Index r = 0; r < j; ++r) {
        double pw = 1.0;
        for (Eigen::Index q = 0; q < cols; ++q) {
            a(r, q) = pw;
            pw *= betas[static_cast<std::size_t>(r)];
        }
        c(r) = values[static_cast<std::size_t>(r)];
    }

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < cols) throw DomainError("fit_polynomial: rank-deficient design matrix");
    const Eigen::VectorXd coef = qr.solve(c);

    PolyFit fit;
    fit.coeffs.assign(coef.data(), coef.data() + coef.size());
    fit.mse = (a * coef - c).squaredNorm() / static_cast<double>(j);
    const Eigen::VectorXd atc = a.transpose() * c;
    const double atc_norm = atc.norm();
    const double res = (a.transpose() * (a * coef) - atc).norm();
    fit.normal_residual = atc_norm > 0.0 ? res / atc_norm : res;
    return fit;
}

double eval_polynomial(std::span<const double> coeffs, double beta) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * beta + *it;
    return acc;
}

std::vector<double> stationary_candidates(std::span<const double> coeffs, int q_order) {
    if (q_order < 2 || q_order > 5) throw DomainError("stationary_candidates: Q must lie in [2, 5]");
    if (static_cast<int>(coeffs.size()) != q_order + 1) {
        throw DimensionError("coeffs", q_order + 1, static_cast<long>(coeffs.size()));
    }
    // Derivative d_0 + d_1 beta + ... + d_{Q-1} beta^{Q-1}.
    std::vector<double> d(static_cast<std::size_t>(q_order));
    double dmax = 0.0;
    for (int k = 0; k < q_order; ++k) {
        d[static_cast<std::size_t>(k)] = (k + 1) * coeffs[static_cast<std::size_t>(k + 1)];
        dmax = std::max(dmax, std::abs(d[static_cast<std::size_t>(k)]));
    }
    if (dmax == 0.0) return {};
    while (!d.empty() && std::abs(d.back()) <= 1e-14 * dmax) d.pop_back();
    const int deg = static_cast<int>(d.size()) - 1;

    std::vector<double> roots;
    if (deg == 1) {
        roots.push_back(-d[0] / d[1]);
    } else if (deg == 2) {
        // (-d1 +- sqrt(d1^2 - 4 d2 d0)) / (2 d2); for Q = 3 this is the
        // familiar (-a2 +- sqrt(a2^2 - 3 a3 a1)) / (3 a3).
        const double disc = d[1] * d[1] - 4.0 * d[2] * d[0];
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            roots.push_back((-d[1] + sq) / (2.0 * d[2]));
            roots.push_back((-d[1] - sq) / (2.0 * d[2]));
        }
    } else if (deg >= 3) {
        Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
        for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
        for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -d[static_cast<std::size_t>(i)] / d.back();
        const Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            const cd z = es.eigenvalues()(i);
            if (std::abs(z.imag()) <= 1e-9 * std::max(1.0, std::abs(z.real()))) roots.push_back(z.real());
        }
    }
    for (double& r : roots) {
        if (!(r >= 0.0 && r <= 1.0)) r = 0.0;
    }
    return roots;
}

double select_beta(const PaCoefficients& k, std::span<const double> candidates, double beta_prev) {
    std::vector<double> pool(candidates.begin(), candidates.end());
    pool.push_back(0.0);
    pool.push_back(1.0);
    pool.push_back(beta_prev);
    std::sort(pool.begin(), pool.end());

    double best = pool.front();
    double best_val = eval_f_beta(k, best);
    for (double b : pool) {
        const double val = eval_f_beta(k, b);
        if (val > best_val) {
            best = b;
            best_val = val;
        }
    }
    return best;
}

FitResult optimize_beta(const PaCoefficients& k, const RegressionConfig& cfg, double beta_prev) {
    cfg.validate();
    require_unit_interval(beta_prev, "optimize_beta");
    const std::vector<double> betas = uniform_samples(cfg.j_samples);
    std::vector<double> values(betas.size());
    for (std::size_t i = 0; i < betas.size(); ++i) values[i] = eval_f_beta(k, betas[i]);

    const PolyFit fit = fit_polynomial(betas, values, cfg.q_order);
    std::vector<double> cands = stationary_candidates(fit.coeffs, cfg.q_order);

    FitResult out;
    out.coeffs = fit.coeffs;
    out.mse = fit.mse;
    out.beta_opt = select_beta(k, cands, beta_prev);
    cands.push_back(0.0);
    cands.push_back(1.0);
    cands.push_back(beta_prev);
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    out.candidates = std::move(cands);
    return out;
}

}  // namespace airis::pa_beta
