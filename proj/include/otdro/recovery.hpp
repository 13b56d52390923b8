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
#include "otdro/lagrangian.hpp"
#include "otdro/measure.hpp"
#include "otdro/primal.hpp"
#include "otdro/types.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace otdro {

/**
 * Per-source extreme selections inside the optimal argmin sets: `low`
 * points each source to its cheapest admissible target, `high` to its
 * costliest. Cost ties break to the smallest index, so the selection is a
 * deterministic function of the dual solution (the finite-space stand-in
 * for a measurable selector).
 */
struct SelectionMap {
    std::vector<std::size_t> low;
    std::vector<std::size_t> high;
};

inline SelectionMap select_extremes(const DualSolution& dual, const PrimalProblem& prob) {
    if (!dual.attained)
        throw ValidationError("extreme selection requires a finite optimal multiplier");
    const std::size_t n = prob.size();
    if (dual.argmin_sets.size() != n)
        throw DimensionMismatchError("dual solution and problem sizes disagree");

    SelectionMap sel;
    sel.low.resize(n);
    sel.high.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& set = dual.argmin_sets[i];
        assert(!set.empty() && "argmin sets on a finite space are never empty");
        std::size_t lo = set.front(), hi = set.front();
        for (std::size_t j : set) {
            if (prob.cost.c(i, j) < prob.cost.c(i, lo)) lo = j;
            if (prob.cost.c(i, j) > prob.cost.c(i, hi)) hi = j;
        }
        sel.low[i] = lo;
        sel.high[i] = hi;
    }
    return sel;
}

/**
 * A worst-case certificate: the recovered plan pi*, its second marginal
 * nu* (the measure attaining the optimum), the blend fraction between the
 * cheap and costly extreme selections, and the complementary slackness
 * residual lambda* (cost - r).
 */
struct WorstCaseResult {
    Coupling plan;
    Measure nu;
    double blend_t = 0.0;
    double slack = 0.0;
};

/**
 * Builds the optimal plan from the dual solution. All mass stays on the
 * argmin sets, where the Lagrangian integrand is flat, so any selection
 * minimizes L(., lambda*); what remains is making the budget bind when
 * lambda* > 0. The costs of the pure cheap and pure costly selections
 * bracket r at an optimal multiplier, and the transport cost is linear in
 * the blend between them, so one scalar
 *
 *   t = (r - C_low) / (C_high - C_low)
 *
 * splits every source's mass (1-t) cheap / t costly and lands the cost on r
 * exactly. At lambda* = 0 the budget is slack and the pure cheap selection
 * is already optimal. The r = 0 sentinel keeps all mass in place.
 */
inline WorstCaseResult recover_worst_case(const DualSolution& dual, const PrimalProblem& prob) {
    const std::size_t n = prob.size();

    if (!dual.attained) {
        std::vector<std::size_t> identity(n);
        for (std::size_t i = 0; i < n; ++i) identity[i] = i;
        Coupling plan = deterministic_coupling(prob.mu, identity);
        return WorstCaseResult{std::move(plan), prob.mu, 0.0, 0.0};
    }

    const SelectionMap sel = select_extremes(dual, prob);
    double cost_low = 0.0, cost_high = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cost_low += prob.mu.w[i] * prob.cost.c(i, sel.low[i]);
        cost_high += prob.mu.w[i] * prob.cost.c(i, sel.high[i]);
    }

    double t = 0.0;
    if (dual.lambda_star > 0.0) {
        if (prob.r < cost_low - 1e-8 || prob.r > cost_high + 1e-8)
            throw InfeasibleRecoveryError(
                "budget " + format_double(prob.r) + " outside selection cost range [" +
                format_double(cost_low) + ", " + format_double(cost_high) + "]");
        if (cost_high - cost_low > 1e-15 * std::max(1.0, cost_high))
            t = std::clamp((prob.r - cost_low) / (cost_high - cost_low), 0.0, 1.0);
    }

    Matrix pi(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        pi(i, sel.low[i]) += (1.0 - t) * prob.mu.w[i];
        pi(i, sel.high[i]) += t * prob.mu.w[i];
    }
    Coupling plan{std::move(pi)};
    Measure nu = marginals(plan).second;
    const double slack = dual.lambda_star * (plan_cost(plan, prob.cost) - prob.r);
    return WorstCaseResult{std::move(plan), std::move(nu), t, slack};
}

struct CertificateClause {
    std::string name;
    bool pass = false;
    double lhs = 0.0; // measured quantity
    double rhs = 0.0; // reference it is checked against
};

struct CertificateReport {
    std::vector<CertificateClause> clauses;

    bool all_pass() const {
        return std::all_of(clauses.begin(), clauses.end(),
                           [](const CertificateClause& c) { return c.pass; });
    }
};

/// Tolerance for the optimality certificate clauses.
inline constexpr double certificate_tolerance = 1e-8;

/**
 * Checks the chain of identities behind the recovered optimum, each within
 * `certificate_tolerance`:
 *
 *   feasibility:  d_c(mu, nu*) <= r, with the transport cost re-solved
 *                 independently rather than read off the recovered plan;
 *   objective:    E_{nu*}[f] equals the dual optimum;
 *   slackness:    lambda* (cost(pi*) - r) = 0;
 *   lagrangian:   L(pi*, lambda*) equals g(lambda*).
 *
 * For the unattained r = 0 sentinel the slack is 0 by construction and the
 * Lagrangian clause is evaluated at lambda = 1, where L of the in-place plan
 * is constant and must equal the reported value.
 */
inline CertificateReport verify_certificate(const WorstCaseResult& result,
                                            const DualSolution& dual,
                                            const PrimalProblem& prob) {
    CertificateReport report;
    const std::size_t n = prob.size();

    const double transport = ot_distance(prob.mu, result.nu, prob.cost).distance;
    report.clauses.push_back({"feasibility", transport <= prob.r + certificate_tolerance,
                              transport, prob.r});

    double expectation = 0.0;
    for (std::size_t j = 0; j < n; ++j) expectation += result.nu.w[j] * prob.f[j];
    report.clauses.push_back(
        {"objective", std::abs(expectation - dual.value) <= certificate_tolerance,
         expectation, dual.value});

    report.clauses.push_back(
        {"slackness", std::abs(result.slack) <= certificate_tolerance, result.slack, 0.0});

    double lag, target;
    if (dual.attained) {
        lag = lagrangian(result.plan, dual.lambda_star, prob);
        target = dual_objective(dual.lambda_star, prob);
    } else {
        lag = lagrangian(result.plan, 1.0, prob);
        target = dual.value;
    }
    report.clauses.push_back(
        {"lagrangian", std::abs(lag - target) <= certificate_tolerance, lag, target});
    return report;
}

/// Throws CertificateFailureError naming the first violated clause.
inline void require_certificate(const CertificateReport& report) {
    for (const auto& clause : report.clauses)
        if (!clause.pass)
            throw CertificateFailureError("certificate clause '" + clause.name +
                                          "' violated: got " + format_double(clause.lhs) +
                                          " against " + format_double(clause.rhs));
}

} // namespace otdro
