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

#include "otdro/primal.hpp"
#include "otdro/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace otdro {

/// Absolute tolerance for membership in an argmin set. Kink multipliers are
/// computed in double precision, so exact ties land within a few ulps of the
/// minimum and must be captured for worst-case recovery to work.
inline constexpr double argmin_tolerance = 1e-10;

/**
 * The per-source inner minimum of the dual integrand,
 *
 *   phi_lambda(x_i) = min_j { f_j + lambda * c_ij },
 *
 * together with the set of targets attaining it (ascending, tolerance
 * `argmin_tolerance`).
 */
struct PhiValue {
    double value = 0.0;
    std::vector<std::size_t> argmin;
};

namespace detail {

inline double phi_value(double lambda, std::size_t i, const PrimalProblem& prob) {
    const std::size_t n = prob.size();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j)
        best = std::min(best, prob.f[j] + lambda * prob.cost.c(i, j));
    return best;
}

} // namespace detail

inline PhiValue phi(double lambda, std::size_t i, const PrimalProblem& prob) {
    const std::size_t n = prob.size();
    if (i >= n) throw IndexOutOfRangeError("phi source index out of range");
    const double best = detail::phi_value(lambda, i, prob);
    PhiValue out{best, {}};
    for (std::size_t j = 0; j < n; ++j)
        if (prob.f[j] + lambda * prob.cost.c(i, j) <= best + argmin_tolerance)
            out.argmin.push_back(j);
    return out;
}

/// The dual objective g(lambda) = sum_i mu_i phi_lambda(x_i) - lambda r.
/// Concave and piecewise linear in lambda.
inline double dual_objective(double lambda, const PrimalProblem& prob) {
    double acc = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i)
        acc += prob.mu.w[i] * detail::phi_value(lambda, i, prob);
    return acc - lambda * prob.r;
}

/**
 * Every multiplier at which some source's argmin set can change: the
 * crossing points lambda = (f_j - f_k) / (c_ik - c_ij) over all sources i
 * and target pairs, restricted to finite nonnegative values, plus 0.
 * Sorted ascending with exact duplicates removed. The maximum of g over
 * [0, inf) is attained at one of these.
 */
inline std::vector<double> dual_breakpoints(const PrimalProblem& prob) {
    const std::size_t n = prob.size();
    std::vector<double> cands;
    cands.reserve(n * n * n / 2 + 1);
    cands.push_back(0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                const double denom = prob.cost.c(i, k) - prob.cost.c(i, j);
                if (denom == 0.0) continue;
                const double lam = (prob.f[j] - prob.f[k]) / denom;
                if (lam > 0.0 && std::isfinite(lam)) cands.push_back(lam);
            }
    std::sort(cands.begin(), cands.end());
    cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
    return cands;
}

/// Callable view of g with its breakpoint grid attached.
struct DualObjective {
    const PrimalProblem* problem = nullptr;
    std::vector<double> breakpoints;

    explicit DualObjective(const PrimalProblem& prob)
        : problem(&prob), breakpoints(dual_breakpoints(prob)) {}

    double operator()(double lambda) const { return dual_objective(lambda, *problem); }
};

/**
 * Supergradient interval of g at lambda. Within each argmin set the extreme
 * transport costs bound the attainable slopes:
 *
 *   lo = sum_i mu_i min{ c_ij : j in argmin_i } - r   (right derivative)
 *   hi = sum_i mu_i max{ c_ij : j in argmin_i } - r   (left derivative)
 *
 * lambda maximizes g iff 0 is in [lo, hi] (or lo <= 0 at lambda = 0).
 */
inline std::pair<double, double> supergradient(double lambda, const PrimalProblem& prob) {
    double lo = 0.0, hi = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const PhiValue pv = phi(lambda, i, prob);
        double cmin = std::numeric_limits<double>::infinity();
        double cmax = -std::numeric_limits<double>::infinity();
        for (std::size_t j : pv.argmin) {
            cmin = std::min(cmin, prob.cost.c(i, j));
            cmax = std::max(cmax, prob.cost.c(i, j));
        }
        lo += prob.mu.w[i] * cmin;
        hi += prob.mu.w[i] * cmax;
    }
    return {lo - prob.r, hi - prob.r};
}

/**
 * Solution of the one-dimensional dual sup_{lambda >= 0} g(lambda).
 *
 * `attained` is false only in the degenerate r = 0 case, where the supremum
 * E_mu[f] is approached as lambda grows without bound; lambda_star is then
 * the +infinity sentinel and the argmin sets degenerate to "stay in place".
 */
struct DualSolution {
    double lambda_star = 0.0;
    bool attained = true;
    double value = 0.0;
    std::vector<std::vector<std::size_t>> argmin_sets;
    double supergradient_lo = 0.0;
    double supergradient_hi = 0.0;
};

/**
 * Maximizes g exactly by evaluating it at every candidate breakpoint; g is
 * concave piecewise linear, so no other point can do better. Among equal
 * maximizers the smallest multiplier is returned, which carries the largest
 * argmin sets at the kink and is what recovery wants. Requires a zero cost
 * diagonal (guaranteed by CostMatrix) so that g eventually decreases and the
 * maximum exists for every r > 0.
 */
inline DualSolution solve_dual_min(const PrimalProblem& prob) {
    const std::size_t n = prob.size();

    if (prob.r == 0.0) {
        DualSolution out;
        out.lambda_star = std::numeric_limits<double>::infinity();
        out.attained = false;
        out.value = prob.baseline_expectation();
        out.argmin_sets.resize(n);
        for (std::size_t i = 0; i < n; ++i) out.argmin_sets[i] = {i};
        out.supergradient_lo = 0.0;
        out.supergradient_hi = 0.0;
        return out;
    }

    const std::vector<double> cands = dual_breakpoints(prob);
    double best_value = -std::numeric_limits<double>::infinity();
    double best_lambda = 0.0;
    for (double lam : cands) {
        const double v = dual_objective(lam, prob);
        if (v > best_value) {
            best_value = v;
            best_lambda = lam;
        }
    }

    DualSolution out;
    out.lambda_star = best_lambda;
    out.attained = true;
    out.value = best_value;
    out.argmin_sets.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        out.argmin_sets[i] = phi(best_lambda, i, prob).argmin;
    const auto [lo, hi] = supergradient(best_lambda, prob);
    out.supergradient_lo = lo;
    out.supergradient_hi = hi;
    return out;
}

/**
 * The maximization form: the largest expectation over the ball. Solved by
 * negating the objective, running the minimization dual and negating the
 * optimal value back; the multiplier and argmin structure carry over
 * unchanged and describe the maximizing measure.
 */
inline DualSolution solve_max(const PrimalProblem& prob) {
    DualSolution sol = solve_dual_min(prob.negated());
    sol.value = -sol.value;
    return sol;
}

} // namespace otdro
