#include "airis/qcqp.hpp"

#include "airis/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace airis::qcqp {

namespace {

struct MultiplierSearch {
    double lambda = 0.0;
    int evaluations = 0;
};

// Root of a strictly decreasing phi on (0, inf) with phi(0+) > 0. Brackets by
// doubling (or halving) from lambda = 1, then bisects; the returned lambda is
// always on the phi <= 0 side. The search runs on lambda / scale.
template <class Phi>
MultiplierSearch find_multiplier(Phi&& phi, double ftol, double cap, double scale = 1.0) {
    int evals = 0;
    auto eval = [&](double l) {
        ++evals;
        return phi(scale * l);
    };
    double lo = 0.0;
    double hi = 1.0;
    double fhi = eval(hi);
    if (fhi > 0.0) {
        while (fhi > 0.0) {
            lo = hi;
            hi *= 2.0;
            if (hi > cap) throw SolverError("multiplier search exceeded the bracket cap");
            fhi = eval(hi);
        }
    } else {
        while (hi > 1e-300) {
            const double cand = 0.5 * hi;
            const double fc = eval(cand);
            if (fc > 0.0) {
                lo = cand;
                break;
            }
            hi = cand;
            fhi = fc;
        }
    }
    for (int it = 0; it < 400 && std::abs(fhi) > ftol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double fm = eval(mid);
        if (fm > 0.0) {
            lo = mid;
        } else {
            hi = mid;
            fhi = fm;
        }
    }
    return {scale * hi, evals};
}

// ||B^{-1/2} q|| / sqrt(P): the multiplier when A = 0.
double natural_scale(const CVec& q, const RVec& b, double p) {
    const double s = std::sqrt(q.cwiseAbs2().cwiseQuotient(b).sum() / p);
    return s > 0.0 && std::isfinite(s) ? s : 1.0;
}

void require_square(const char* what, const CMat& m, Eigen::Index n) {
    if (m.rows() != n) throw DimensionError(std::string(what) + ".rows", n, m.rows());
    if (m.cols() != n) throw DimensionError(std::string(what) + ".cols", n, m.cols());
}

void require_positive_budget(double p) {
    if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("budget P must be positive and finite");
}

Eigen::LLT<CMat> factor_with_jitter(const CMat& m, const char* what) {
    Eigen::LLT<CMat> llt(m);
    if (llt.info() == Eigen::Success) return llt;
    const double n = static_cast<double>(m.rows());
    const double jitter = 1e-12 * std::max(m.trace().real(), 0.0) / n;
    llt.compute(m + jitter * CMat::Identity(m.rows(), m.cols()));
    if (llt.info() != Eigen::Success) throw DomainError(std::string(what) + " is not positive definite");
    return llt;
}

}  // namespace

std::string to_string(Status s) {
    switch (s) {
        case Status::Ok:
            return "ok";
        case Status::Degenerate:
            return "degenerate";
        case Status::Infeasible:
            return "infeasible";
    }
    return "unknown";
}

double trust_region_objective(const CVec& q, const CMat& a, const CVec& x) {
    return 2.0 * q.dot(x).real() - x.dot(a * x).real();
}

Solution solve_lin_ellipsoid(const CVec& k, const CMat& h, double p) {
    require_square("H", h, k.size());
    require_positive_budget(p);
    const Eigen::SelfAdjointEigenSolver<CMat> ev(h, Eigen::EigenvaluesOnly);
    const double lmin = ev.eigenvalues().minCoeff();
    const double lmax = ev.eigenvalues().maxCoeff();
    if (!(lmax > 0.0) || !(lmin > 1e-12 * lmax)) throw DomainError("solve_lin_ellipsoid: H is singular");

    Solution sol;
    if (k.squaredNorm() == 0.0) {
        sol.x = CVec::Zero(k.size());
        sol.status = Status::Degenerate;
        sol.kkt.lambdas = {0.0};
        sol.kkt.complementarity_residual = 0.0;
        return sol;
    }
    const Eigen::LLT<CMat> llt(h);
    const CVec z = llt.solve(k);
    const double s = k.dot(z).real();
    sol.x = std::sqrt(p / s) * z;
    const double lambda = 0.5 * std::sqrt(s / p);
    const double energy = sol.x.dot(h * sol.x).real();
    sol.kkt.lambdas = {lambda};
    sol.kkt.stationarity_residual = (lambda * (h * sol.x) - 0.5 * k).norm();
    sol.kkt.constraint_violation = std::max(0.0, energy - p);
    sol.kkt.complementarity_residual = lambda * std::abs(energy - p);
    sol.kkt.iterations = 1;
    return sol;
}

Solution solve_trust_region(const CVec& q, const CMat& a, const CMat& b, double p, const Tolerances& tol) {
    const Eigen::Index n = q.size();
    require_square("A", a, n);
    require_square("B", b, n);
    require_positive_budget(p);

    Solution sol;
    if (n == 0) {
        sol.x = CVec(0);
        sol.kkt.lambdas = {0.0};
        return sol;
    }

    // Whiten B = L L^H, so the constraint becomes ||y||^2 <= P with y = U^H L^H x.
    const Eigen::LLT<CMat> llt = factor_with_jitter(b, "B");
    const CMat lower = llt.matrixL();
    const CMat tmp = lower.triangularView<Eigen::Lower>().solve(a);
    CMat white = lower.triangularView<Eigen::Lower>().solve(CMat(tmp.adjoint())).adjoint();
    white = 0.5 * (white + white.adjoint()).eval();
    const Eigen::SelfAdjointEigenSolver<CMat> es(white);
    RVec lam = es.eigenvalues();
    const double lmax = std::max(lam.cwiseAbs().maxCoeff(), 0.0);
    if (lam.minCoeff() < -1e-12 * lmax) throw DomainError("solve_trust_region: A is not positive semidefinite");
    lam = lam.cwiseMax(0.0);
    const double zero = 1e-13 * lmax;

    const CVec qt = es.eigenvectors().adjoint() * lower.triangularView<Eigen::Lower>().solve(q);
    const double qt_norm = qt.norm();

    auto y_of = [&](double lambda) {
        CVec y(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double den = lam(i) + lambda;
            y(i) = den > 0.0 ? qt(i) / den : cd{0.0, 0.0};
        }
        return y;
    };

    bool bounded = true;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (lam(i) <= zero && std::abs(qt(i)) > 1e-12 * qt_norm) bounded = false;
    }
    double lambda = 0.0;
    int evals = 1;
    CVec y;
    if (bounded) {
        y = CVec(n);
        for (Eigen::Index i = 0; i < n; ++i) y(i) = lam(i) > zero ? qt(i) / lam(i) : cd{0.0, 0.0};
    }
    if (!bounded || y.squaredNorm() > p) {
        const double scale = qt_norm > 0.0 ? qt_norm / std::sqrt(p) : 1.0;
        const auto search = find_multiplier([&](double l) { return y_of(l).squaredNorm() - p; },
                                            tol.bisection * p, tol.lambda_cap, scale);
        lambda = search.lambda;
        evals += search.evaluations;
        y = y_of(lambda);
    }

    sol.x = lower.adjoint().triangularView<Eigen::Upper>().solve(es.eigenvectors() * y);
    const double energy = sol.x.dot(b * sol.x).real();
    sol.kkt.lambdas = {lambda};
    sol.kkt.stationarity_residual = ((a + lambda * b) * sol.x - q).norm();
    sol.kkt.constraint_violation = std::max(0.0, energy - p);
    sol.kkt.complementarity_residual = lambda * std::abs(energy - p);
    sol.kkt.iterations = evals;
    return sol;
}

Solution solve_trust_region_diag(const CVec& q, const RVec& a, const RVec& b, double p, const Tolerances& tol) {
    const Eigen::Index n = q.size();
    if (a.size() != n) throw DimensionError("A.diag", n, a.size());
    if (b.size() != n) throw DimensionError("B.diag", n, b.size());
    require_positive_budget(p);

    Solution sol;
    if (n == 0) {
        sol.x = CVec(0);
        sol.kkt.lambdas = {0.0};
        return sol;
    }
    if (!(b.minCoeff() > 0.0)) throw DomainError("solve_trust_region: B is not positive definite");
    const double amax = a.cwiseAbs().maxCoeff();
    if (a.minCoeff() < -1e-12 * amax) throw DomainError("solve_trust_region: A is not positive semidefinite");
    const RVec ad = a.cwiseMax(0.0);

    auto x_of = [&](double lambda) {
        CVec x(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double den = ad(i) + lambda * b(i);
            x(i) = den > 0.0 ? q(i) / den : cd{0.0, 0.0};
        }
        return x;
    };
    auto energy_of = [&](const CVec& x) { return b.dot(x.cwiseAbs2()); };

    bool bounded = true;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (ad(i) == 0.0 && q(i) != cd{0.0, 0.0}) bounded = false;
    }
    double lambda = 0.0;
    int evals = 1;
    CVec x;
    if (bounded) x = x_of(0.0);
    if (!bounded || energy_of(x) > p) {
        const auto search = find_multiplier([&](double l) { return energy_of(x_of(l)) - p; }, tol.bisection * p,
                                            tol.lambda_cap, natural_scale(q, b, p));
        lambda = search.lambda;
        evals += search.evaluations;
        x = x_of(lambda);
    }

    const double energy = energy_of(x);
    sol.x = std::move(x);
    sol.kkt.lambdas = {lambda};
    sol.kkt.stationarity_residual = ((ad + lambda * b).cast<cd>().cwiseProduct(sol.x) - q).norm();
    sol.kkt.constraint_violation = std::max(0.0, energy - p);
    sol.kkt.complementarity_residual = lambda * std::abs(energy - p);
    sol.kkt.iterations = evals;
    return sol;
}

Solution solve_trust_region_diag_rank1(const CVec& q, const DiagPlusRank1& a, const RVec& b, double p,
                                       const Tolerances& tol) {
    const Eigen::Index n = q.size();
    if (a.diag.size() != n) throw DimensionError("A.diag", n, a.diag.size());
    if (a.u.size() != n) throw DimensionError("A.u", n, a.u.size());
    if (b.size() != n) throw DimensionError("B.diag", n, b.size());
    if (!(a.weight >= 0.0)) throw SolverError("solve_trust_region: rank-one weight must be nonnegative");
    require_positive_budget(p);
    if (n == 0) return solve_trust_region_diag(q, a.diag, b, p, tol);
    if (!(b.minCoeff() > 0.0)) throw DomainError("solve_trust_region: B is not positive definite");

    // A singular diagonal part needs the range test of the dense path.
    if (!(a.diag.minCoeff() > 0.0)) {
        const CMat dense = CMat(a.diag.cast<cd>().asDiagonal()) + a.weight * a.u * a.u.adjoint();
        return solve_trust_region(q, dense, CMat(b.cast<cd>().asDiagonal()), p, tol);
    }

    auto x_of = [&](double lambda) {
        const RVec den = a.diag + lambda * b;
        const CVec dq = q.cwiseQuotient(den.cast<cd>());
        const CVec du = a.u.cwiseQuotient(den.cast<cd>());
        const cd num = a.u.dot(dq);
        const double s = 1.0 + a.weight * a.u.dot(du).real();
        return CVec(dq - (a.weight * num / s) * du);
    };
    auto energy_of = [&](const CVec& x) { return b.dot(x.cwiseAbs2()); };

    double lambda = 0.0;
    int evals = 1;
    CVec x = x_of(0.0);
    if (energy_of(x) > p) {
        const auto search = find_multiplier([&](double l) { return energy_of(x_of(l)) - p; }, tol.bisection * p,
                                            tol.lambda_cap, natural_scale(q, b, p));
        lambda = search.lambda;
        evals += search.evaluations;
        x = x_of(lambda);
    }

    const double energy = energy_of(x);
    const CVec ax = a.diag.cast<cd>().cwiseProduct(x) + a.weight * a.u * a.u.dot(x);
    Solution sol;
    sol.kkt.lambdas = {lambda};
    sol.kkt.stationarity_residual = (ax + lambda * b.cast<cd>().cwiseProduct(x) - q).norm();
    sol.kkt.constraint_violation = std::max(0.0, energy - p);
    sol.kkt.complementarity_residual = lambda * std::abs(energy - p);
    sol.kkt.iterations = evals;
    sol.x = std::move(x);
    return sol;
}

Solution solve_two_constraint(const CVec& b, const CMat& c, const CVec& v_ref, double p_prime, const Tolerances& tol) {
    const Eigen::Index m = b.size();
    require_square("C", c, m);
    if (v_ref.size() != m) throw DimensionError("v_ref", m, v_ref.size());
    if (v_ref.norm() > 1.0 + 1e-12) throw DomainError("solve_two_constraint: ||v_ref|| must be <= 1");

    Solution sol;
    sol.x = v_ref;
    sol.kkt.lambdas = {0.0, 0.0};
    if (!(p_prime > 0.0) || !std::isfinite(p_prime)) {
        sol.status = Status::Infeasible;
        return sol;
    }
    const double bnorm = b.norm();
    if (bnorm == 0.0) {
        sol.status = Status::Degenerate;
        return sol;
    }

    // Work with b / ||b|| and C / P'; v is invariant under both scalings.
    const CMat cs = c / p_prime;
    const Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (cs + cs.adjoint()));
    RVec lam = es.eigenvalues();
    const double lmax = lam.cwiseAbs().maxCoeff();
    if (lam.minCoeff() < -1e-12 * lmax) throw DomainError("solve_two_constraint: C is not positive semidefinite");
    lam = lam.cwiseMax(0.0);
    const CMat& u = es.eigenvectors();
    const CVec bh = 0.5 * (u.adjoint() * b) / bnorm;
    const CVec nu = u.adjoint() * v_ref;
    const double nu2 = nu.squaredNorm();

    auto y_of = [&](double l1, double l2) {
        CVec y(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            const cd num = bh(i) + l2 * nu(i);
            const double den = l1 + l2 * lam(i);
            y(i) = den > 0.0 ? num / den : cd{0.0, 0.0};
        }
        return y;
    };
    auto lin_constraint = [&](const CVec& y) {
        return lam.dot(y.cwiseAbs2()) - 2.0 * nu.dot(y).real() + nu2;
    };

    int evals = 0;
    // Smallest lambda_1 >= 0 keeping ||y|| <= 1 for a given lambda_2.
    auto inner = [&](double l2) {
        bool bounded = true;
        for (Eigen::Index i = 0; i < m; ++i) {
            if (l2 * lam(i) <= 0.0 && std::abs(bh(i) + l2 * nu(i)) > 0.0) bounded = false;
        }
        if (bounded && y_of(0.0, l2).squaredNorm() <= 1.0) return 0.0;
        const auto s = find_multiplier([&](double l1) { return y_of(l1, l2).squaredNorm() - 1.0; }, tol.bisection,
                                       tol.lambda_cap);
        evals += s.evaluations;
        return s.lambda;
    };

    double l2 = 0.0;
    double l1 = inner(0.0);
    CVec y = y_of(l1, 0.0);
    if (lin_constraint(y) > 0.0) {
        const double ftol = tol.bisection * (1.0 + nu2);
        MultiplierSearch outer;
        try {
            outer = find_multiplier(
                [&](double l) {
                    const double l1_trial = inner(l);
                    return lin_constraint(y_of(l1_trial, l));
                },
                ftol, tol.lambda_cap);
        } catch (const SolverError&) {
            sol.status = Status::Infeasible;
            return sol;
        }
        l2 = outer.lambda;
        l1 = inner(l2);
        y = y_of(l1, l2);
        evals += outer.evaluations;
    }

    sol.x = u * y;
    // Report multipliers for the unscaled problem.
    const double lambda1 = l1 * bnorm;
    const double lambda2 = l2 * bnorm / p_prime;
    const double ball = sol.x.squaredNorm() - 1.0;
    const double lin = sol.x.dot(c * sol.x).real() - p_prime * (2.0 * v_ref.dot(sol.x).real() - v_ref.squaredNorm());
    sol.kkt.lambdas = {lambda1, lambda2};
    sol.kkt.stationarity_residual =
        (lambda1 * sol.x + lambda2 * (c * sol.x) - 0.5 * b - lambda2 * p_prime * v_ref).norm();
    sol.kkt.constraint_violation = std::max({0.0, ball, lin / p_prime});
    sol.kkt.complementarity_residual = std::max(lambda1 * std::abs(ball), lambda2 * std::abs(lin));
    sol.kkt.iterations = evals;
    sol.status = Status::Ok;
    return sol;
}

}  // namespace airis::qcqp
