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

#include "otdro/measure.hpp"
#include "otdro/simplex.hpp"
#include "otdro/space.hpp"
#include "otdro/types.hpp"

#include <cmath>
#include <cstddef>
#include <utility>

namespace otdro {

/**
 * The worst-case expectation problem in minimization form:
 *
 *   minimize    sum_ij pi_ij f_j
 *   subject to  sum_j pi_ij = mu_i        (first marginal is the baseline)
 *               sum_ij pi_ij c_ij <= r    (transport budget)
 *               pi >= 0
 *
 * f is the objective evaluated at the target point, mu the baseline measure,
 * c the transport cost and r the ball radius. The second marginal of an
 * optimal plan is a worst-case measure within budget r of mu.
 */
struct PrimalProblem {
    Vec f;
    Measure mu;
    CostMatrix cost;
    double r = 0.0;

    PrimalProblem(Vec f_, Measure mu_, CostMatrix cost_, double r_)
        : f(std::move(f_)), mu(std::move(mu_)), cost(std::move(cost_)), r(r_) {
        const std::size_t n = f.size();
        if (n == 0) throw ValidationError("objective vector must be nonempty");
        if (mu.size() != n || cost.c.rows() != n || cost.c.cols() != n)
            throw DimensionMismatchError("objective, measure and cost sizes disagree");
        for (double v : f)
            if (!std::isfinite(v)) throw ValidationError("objective has a non-finite entry");
        if (!(r >= 0.0)) throw ValidationError("budget r must be nonnegative");
    }

    std::size_t size() const { return f.size(); }

    /// Same problem with the objective negated (solves the maximization form).
    PrimalProblem negated() const {
        Vec g(f.size());
        for (std::size_t j = 0; j < f.size(); ++j) g[j] = -f[j];
        return PrimalProblem(std::move(g), mu, cost, r);
    }

    /// E_mu[f]: the objective under the baseline measure.
    double baseline_expectation() const { return dot(mu.w, f); }
};

enum class SolveStatus { Optimal, Infeasible };

struct PrimalSolution {
    Coupling plan;
    double value = 0.0;
    double cost_used = 0.0;
    SolveStatus status = SolveStatus::Optimal;
};

/**
 * Solves the primal exactly with the dense simplex. The identity coupling
 * (keep every point in place) costs zero, so the program is always feasible
 * for r >= 0 and the returned status is Optimal in normal operation. The
 * value and cost are recomputed from the extracted plan.
 */
inline PrimalSolution solve_primal(const PrimalProblem& prob) {
    const std::size_t n = prob.size();

    LinearProgram lp;
    lp.objective = Vec(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lp.objective[i * n + j] = prob.f[j];
    lp.eq_lhs = Matrix(n, n * n, 0.0);
    lp.eq_rhs = prob.mu.w;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lp.eq_lhs(i, i * n + j) = 1.0;
    lp.ineq_lhs = Matrix(1, n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) lp.ineq_lhs(0, i * n + j) = prob.cost.c(i, j);
    lp.ineq_rhs = Vec{prob.r};

    const LpSolution sol = simplex_solve(lp);
    if (sol.status == LpStatus::Infeasible)
        return PrimalSolution{Coupling{}, 0.0, 0.0, SolveStatus::Infeasible};
    if (sol.status == LpStatus::Unbounded)
        throw NumericalFailureError("primal cannot be unbounded: plans form a simplex");

    Matrix pi(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) pi(i, j) = sol.x[i * n + j];
    Coupling plan = Coupling::from_matrix(std::move(pi));

    double value = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) value += plan.pi(i, j) * prob.f[j];
    const double used = plan_cost(plan, prob.cost);
    return PrimalSolution{std::move(plan), value, used, SolveStatus::Optimal};
}

} // namespace otdro
