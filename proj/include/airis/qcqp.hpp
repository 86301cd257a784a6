#pragma once

// Dense complex convex subproblem solvers.
//
//   solve_lin_ellipsoid   max Re{k^H x}              s.t. x^H H x <= P
//   solve_trust_region    max 2Re{q^H x} - x^H A x   s.t. x^H B x <= P
//   solve_two_constraint  max Re{b^H v}              s.t. v^H v <= 1,
//                                                         v^H C v <= P'(2Re{v_ref^H v} - v_ref^H v_ref)
//
// Every solver returns a KKT certificate alongside the point.

#include "airis/types.hpp"

#include <string>
#include <vector>

namespace airis::qcqp {

struct Tolerances {
    double feas = 1e-9;
    double kkt = 1e-8;
    double bisection = 1e-10;
    double lambda_cap = 1e18;
};

inline constexpr Tolerances kTolerances{};

struct KktReport {
    std::vector<double> lambdas;
    double stationarity_residual = 0.0;
    double constraint_violation = 0.0;
    double complementarity_residual = 0.0;
    int iterations = 0;
};

enum class Status {
    Ok,
    Degenerate,  // zero linear term; the returned point is a valid but arbitrary maximizer
    Infeasible,  // the feasible set is empty (two-constraint solver only)
};

std::string to_string(Status s);

struct Solution {
    CVec x;
    KktReport kkt;
    Status status = Status::Ok;
};

// Closed form x = sqrt(P / k^H H^-1 k) H^-1 k. H must be Hermitian positive
// definite (smallest eigenvalue > 1e-12 * largest).
Solution solve_lin_ellipsoid(const CVec& k, const CMat& h, double p);

// Dense path: Cholesky whitening of B, eigendecomposition of the whitened A,
// then bisection on the multiplier. A must be PSD and B positive definite.
Solution solve_trust_region(const CVec& q, const CMat& a, const CMat& b, double p,
                            const Tolerances& tol = kTolerances);

// Diagonal A and B: x_n(lambda) = q_n / (a_n + lambda b_n), O(N) per trial.
Solution solve_trust_region_diag(const CVec& q, const RVec& a, const RVec& b, double p,
                                 const Tolerances& tol = kTolerances);

// A = diag(d) + w u u^H with w >= 0; B diagonal. Sherman-Morrison keeps each
// trial O(N).
struct DiagPlusRank1 {
    RVec diag;
    CVec u;
    double weight = 0.0;
};

Solution solve_trust_region_diag_rank1(const CVec& q, const DiagPlusRank1& a, const RVec& b, double p,
                                       const Tolerances& tol = kTolerances);

// Objective values, shared by callers and tests.
double trust_region_objective(const CVec& q, const CMat& a, const CVec& x);

// Nested multiplier bisection in the eigenbasis of C: lambda_1 enforces the
// unit ball for a given lambda_2, and lambda_2 is bisected on the sign of the
// linearized constraint, which is monotone along the inner solution path.
// Returns Status::Infeasible (x = v_ref) when the linearized set is empty or
// p_prime <= 0.
Solution solve_two_constraint(const CVec& b, const CMat& c, const CVec& v_ref, double p_prime,
                              const Tolerances& tol = kTolerances);

}  // namespace airis::qcqp
