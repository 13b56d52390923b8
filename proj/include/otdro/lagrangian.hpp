// This file is part of otdro, a C++ library for worst-case expectation
// bounds over optimal-transport balls of probability measures.
//
// MIT License
//
// Permission is hereby granted, free of charge, to any person obtaining a copy
// of this software and associated documentation files (the "Software"), to deal
// in the Software without restriction, including without limitation the rights
// to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
// copies of the Software, and to permit persons to whom the Software is
// furnished to do so, subject to the following conditions:
//
// The above copyright notice and this permission notice shall be included in
// all copies or substantial portions of the Software.
//
// THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
// IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
// FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
// AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
// LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
// OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
// SOFTWARE.

#pragma once

#include "otdro/dual.hpp"
#include "otdro/measure.hpp"
#include "otdro/primal.hpp"
#include "otdro/simplex.hpp"
#include "otdro/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

namespace otdro {

/**
 * The Lagrangian of the budget constraint,
 *
 *   L(pi, lambda) = <f(y) + lambda c(x,y), pi> - lambda r,
 *
 * evaluated with the multiplier folded into the integrand.
 */
inline double lagrangian(const Coupling& pi, double lambda, const PrimalProblem& prob) {
    const std::size_t n = prob.size();
    if (pi.size() != n) throw DimensionMismatchError("coupling and problem sizes disagree");
    if (!(lambda >= 0.0)) throw ValidationError("multiplier must be nonnegative");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            acc += pi.pi(i, j) * (prob.f[j] + lambda * prob.cost.c(i, j));
    return acc - lambda * prob.r;
}

/// Same Lagrangian grouped as objective + multiplier * constraint slack:
/// <f, pi> + lambda (<c, pi> - r). Agrees with `lagrangian` to roundoff;
/// kept as an independent algebraic route for consistency checks.
inline double lagrangian_constraint_form(const Coupling& pi, double lambda,
                                         const PrimalProblem& prob) {
    const std::size_t n = prob.size();
    if (pi.size() != n) throw DimensionMismatchError("coupling and problem sizes disagree");
    if (!(lambda >= 0.0)) throw ValidationError("multiplier must be nonnegative");
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) objective += pi.pi(i, j) * prob.f[j];
    return objective + lambda * (plan_cost(pi, prob.cost) - prob.r);
}

/**
 * Measures how far L is from preserving convex combinations, which is the
 * convex-concave-like condition it satisfies with equality:
 *
 *   part (a): L(t pi1 + (1-t) pi2, lambda) vs t L(pi1) + (1-t) L(pi2)
 *   part (b): L(pi, t l1 + (1-t) l2)       vs t L(pi,l1) + (1-t) L(pi,l2)
 *
 * Returns the largest absolute discrepancy over the sampled multipliers;
 * anything beyond roundoff indicates an implementation bug, since L is
 * linear in the plan and affine in the multiplier.
 */
inline double check_cc_like(const Coupling& pi1, const Coupling& pi2, double t,
                            const Vec& lambdas, const PrimalProblem& prob) {
    const std::size_t n = prob.size();
    if (pi1.size() != n || pi2.size() != n)
        throw DimensionMismatchError("coupling and problem sizes disagree");
    if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("t must lie in [0,1]");

    Matrix mix(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            mix(i, j) = t * pi1.pi(i, j) + (1.0 - t) * pi2.pi(i, j);
    const Coupling blend{std::move(mix)};

    double worst = 0.0;
    for (double lam : lambdas) {
        const double lhs = lagrangian(blend, lam, prob);
        const double rhs = t * lagrangian(pi1, lam, prob) + (1.0 - t) * lagrangian(pi2, lam, prob);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    for (std::size_t a = 0; a + 1 < lambdas.size(); ++a) {
        const double l1 = lambdas[a], l2 = lambdas[a + 1];
        const double l3 = t * l1 + (1.0 - t) * l2;
        for (const Coupling* pi : {&pi1, &pi2, &blend}) {
            const double lhs = lagrangian(*pi, l3, prob);
            const double rhs =
                t * lagrangian(*pi, l1, prob) + (1.0 - t) * lagrangian(*pi, l2, prob);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    return worst;
}

/// min over plans with first marginal mu of L(pi, lambda), via the per-row
/// argmin closed form: each source independently sends its mass to the
/// cheapest integrand target, giving sum_i mu_i phi_lambda(x_i) - lambda r.
inline double min_over_plans(double lambda, const PrimalProblem& prob) {
    if (!(lambda >= 0.0)) throw ValidationError("multiplier must be nonnegative");
    return dual_objective(lambda, prob);
}

/**
 * The same inner minimum computed by the simplex over the marginal polytope
 * (no budget row). Independent of the closed form above; the two must agree
 * to solver tolerance, which is the executable version of the equality chain
 * that identifies the inner minimum with the integrated phi.
 */
inline double min_over_plans_lp(double lambda, const PrimalProblem& prob) {
    if (!(lambda >= 0.0)) throw ValidationError("multiplier must be nonnegative");
    const std::size_t n = prob.size();
    LinearProgram lp;
    lp.objective = Vec(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            lp.objective[i * n + j] = prob.f[j] + lambda * prob.cost.c(i, j);
    lp.eq_lhs = Matrix(n, n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lp.eq_lhs(i, i * n + j) = 1.0;
    lp.eq_rhs = prob.mu.w;
    const LpSolution sol = simplex_solve(lp);
    if (sol.status != LpStatus::Optimal)
        throw NumericalFailureError("inner minimization LP must be solvable");
    return sol.value - lambda * prob.r;
}

/**
 * sup over lambda >= 0 of L(pi, lambda) for a fixed plan: the objective
 * <f, pi> when the budget constraint holds, unbounded otherwise. The
 * unbounded case is reported as an empty optional rather than a floating
 * +infinity so it cannot leak into arithmetic.
 */
inline std::optional<double> sup_over_lambda(const Coupling& pi, const PrimalProblem& prob) {
    const std::size_t n = prob.size();
    if (pi.size() != n) throw DimensionMismatchError("coupling and problem sizes disagree");
    if (plan_cost(pi, prob.cost) > prob.r + 1e-12) return std::nullopt;
    double objective = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) objective += pi.pi(i, j) * prob.f[j];
    return objective;
}

/// Random plan with first marginal mu: each source row is an independent
/// random distribution scaled by its baseline mass.
inline Coupling random_coupling(const Measure& mu, std::mt19937_64& rng) {
    const std::size_t n = mu.size();
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Matrix pi(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        Vec row(n);
        double total = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row[j] = -std::log(1.0 - unif(rng));
            total += row[j];
        }
        for (std::size_t j = 0; j < n; ++j) pi(i, j) = mu.w[i] * row[j] / total;
    }
    return Coupling{std::move(pi)};
}

/**
 * Numerical certificate for the minimax identity
 *
 *   min_pi sup_lambda L = sup_lambda min_pi L.
 *
 * min-sup is the primal LP optimum, sup-min the one-dimensional dual
 * optimum; their gap is the quantity being certified. The convex-concave-
 * like condition is probed on `trials` seeded random plan pairs.
 * `lsc_checked` records that lower semicontinuity of L in the plan is
 * automatic on a finite space (every function on the coupling simplex is
 * continuous) and therefore not separately exercised.
 */
struct MinimaxReport {
    double min_sup = 0.0;
    double sup_min = 0.0;
    double gap = 0.0;
    double cc_like_max_violation = 0.0;
    bool lsc_checked = false;
};

inline MinimaxReport certify_minimax(const PrimalProblem& prob, std::size_t trials = 100,
                                     std::uint64_t seed = 0) {
    MinimaxReport report;
    report.min_sup = solve_primal(prob).value;
    report.sup_min = solve_dual_min(prob).value;
    report.gap = report.min_sup - report.sup_min;
    report.lsc_checked = true;

    for (std::size_t trial = 0; trial < trials; ++trial) {
        // One generator per trial so results do not depend on scheduling.
        std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ULL * (trial + 1));
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const Coupling pi1 = random_coupling(prob.mu, rng);
        const Coupling pi2 = random_coupling(prob.mu, rng);
        const double t = unif(rng);
        const Vec lambdas{0.0, 1.0, 5.0, 10.0 * unif(rng)};
        report.cc_like_max_violation =
            std::max(report.cc_like_max_violation, check_cc_like(pi1, pi2, t, lambdas, prob));
    }
    return report;
}

} // namespace otdro
