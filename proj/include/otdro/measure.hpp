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

#include "otdro/simplex.hpp"
#include "otdro/space.hpp"
#include "otdro/types.hpp"

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace otdro {

/// Mass vectors may be off unity by at most this much before rejection.
inline constexpr double mass_tolerance = 1e-12;

/// Total mass already within this window of 1 is left untouched, which makes
/// parse -> emit -> parse bit-stable (renormalizing twice would wiggle the
/// last bits).
inline constexpr double mass_skip_tolerance = 1e-14;

namespace detail {

inline double clean_mass_vector(Vec& w, const char* what) {
    if (w.empty()) throw ValidationError(std::string(what) + " must be nonempty");
    double total = 0.0;
    for (double& v : w) {
        if (!std::isfinite(v)) throw ValidationError(std::string(what) + " has a non-finite entry");
        if (v < -mass_tolerance)
            throw ValidationError(std::string(what) + " has a negative entry");
        if (v < 0.0) v = 0.0;
        total += v;
    }
    const double adjustment = std::abs(total - 1.0);
    if (adjustment > mass_tolerance)
        throw ValidationError(std::string(what) + " mass sums to " + format_double(total) +
                              ", not 1");
    if (adjustment > mass_skip_tolerance)
        for (double& v : w) v /= total;
    return adjustment;
}

} // namespace detail

/**
 * A probability measure on a finite space, stored as a dense weight vector.
 * Weights are validated (nonnegative, total mass 1 within `mass_tolerance`)
 * and renormalized once at construction; the input's deviation from unit
 * mass is kept in `normalization_adjustment`.
 */
struct Measure {
    Vec w;
    double normalization_adjustment = 0.0;

    static Measure from_weights(Vec weights) {
        const double adj = detail::clean_mass_vector(weights, "measure");
        return Measure{std::move(weights), adj};
    }

    std::size_t size() const { return w.size(); }

    bool operator==(const Measure& other) const { return w == other.w; }
};

/// Point mass at index i.
inline Measure dirac(const FiniteSpace& space, std::size_t i) {
    if (i >= space.n)
        throw IndexOutOfRangeError("dirac index " + std::to_string(i) + " out of range");
    Vec w(space.n, 0.0);
    w[i] = 1.0;
    return Measure{std::move(w), 0.0};
}

/**
 * A transport plan: joint mass on S x S, entry (i,j) being the mass moved
 * from point i to point j. Same validation policy as Measure.
 */
struct Coupling {
    Matrix pi;

    static Coupling from_matrix(Matrix m) {
        if (m.rows() == 0 || m.rows() != m.cols())
            throw DimensionMismatchError("coupling must be square and nonempty");
        Vec flat = m.data();
        const std::size_t n = m.rows();
        detail::clean_mass_vector(flat, "coupling");
        Matrix cleaned(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) cleaned(i, j) = flat[i * n + j];
        return Coupling{std::move(cleaned)};
    }

    std::size_t size() const { return pi.rows(); }
};

/// Row and column sums: the first and second marginal measures of a plan.
inline std::pair<Measure, Measure> marginals(const Coupling& plan) {
    const std::size_t n = plan.size();
    Vec first(n, 0.0), second(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            first[i] += plan.pi(i, j);
            second[j] += plan.pi(i, j);
        }
    return {Measure::from_weights(std::move(first)), Measure::from_weights(std::move(second))};
}

/**
 * Pushforward of mu under an index map T: mass at i lands on T(i). T must be
 * total on {0..n-1} with values in range.
 */
inline Measure image_measure(const Measure& mu, const std::vector<std::size_t>& map) {
    const std::size_t n = mu.size();
    if (map.size() != n) throw BadMapError("index map must cover every point");
    Vec out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (map[i] >= n)
            throw BadMapError("index map value " + std::to_string(map[i]) + " out of range");
        out[map[i]] += mu.w[i];
    }
    return Measure{std::move(out), 0.0};
}

/**
 * The deterministic plan that moves all of mu's mass at i onto T(i): entry
 * (i, T(i)) carries mu_i and everything else is zero. Its first marginal is
 * mu and its second is the pushforward of mu under T, exactly.
 */
inline Coupling deterministic_coupling(const Measure& mu, const std::vector<std::size_t>& map) {
    const std::size_t n = mu.size();
    if (map.size() != n) throw BadMapError("index map must cover every point");
    Matrix pi(n, n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (map[i] >= n)
            throw BadMapError("index map value " + std::to_string(map[i]) + " out of range");
        pi(i, map[i]) = mu.w[i];
    }
    return Coupling{std::move(pi)};
}

/// Total transport cost of a plan: sum over all cells of mass times cost.
inline double plan_cost(const Coupling& plan, const CostMatrix& cost) {
    const std::size_t n = plan.size();
    if (cost.c.rows() != n)
        throw DimensionMismatchError("plan and cost matrix sizes disagree");
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) total += plan.pi(i, j) * cost.c(i, j);
    return total;
}

struct OTResult {
    double distance = 0.0;
    Coupling plan;
};

/**
 * Optimal transport cost between mu and nu: the cheapest plan with first
 * marginal mu and second marginal nu, solved as an exact LP on the n^2 plan
 * entries. Identical measures short-circuit to the diagonal plan, whose cost
 * is exactly zero because the cost diagonal is zero.
 */
inline OTResult ot_distance(const Measure& mu, const Measure& nu, const CostMatrix& cost) {
    const std::size_t n = mu.size();
    if (nu.size() != n || cost.c.rows() != n)
        throw DimensionMismatchError("measures and cost matrix sizes disagree");

    if (mu.w == nu.w) {
        Matrix pi(n, n, 0.0);
        for (std::size_t i = 0; i < n; ++i) pi(i, i) = mu.w[i];
        Coupling plan{std::move(pi)};
        const double d = plan_cost(plan, cost);
        return OTResult{d, std::move(plan)};
    }

    LinearProgram lp;
    lp.objective = cost.c.data();
    lp.eq_lhs = Matrix(2 * n, n * n, 0.0);
    lp.eq_rhs = Vec(2 * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            lp.eq_lhs(i, i * n + j) = 1.0;     // row sums = mu
            lp.eq_lhs(n + j, i * n + j) = 1.0; // column sums = nu
        }
        lp.eq_rhs[i] = mu.w[i];
        lp.eq_rhs[n + i] = nu.w[i];
    }
    const LpSolution sol = simplex_solve(lp);
    if (sol.status != LpStatus::Optimal)
        throw NumericalFailureError("transport LP must be feasible and bounded");

    Matrix pi(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) pi(i, j) = sol.x[i * n + j];
    Coupling plan = Coupling::from_matrix(std::move(pi));
    const double d = plan_cost(plan, cost);
    return OTResult{d, std::move(plan)};
}

} // namespace otdro
