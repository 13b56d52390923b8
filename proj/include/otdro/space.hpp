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

#include "otdro/types.hpp"

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace otdro {

/// Relative slack used when validating metric axioms; absorbs the rounding
/// of distances computed from floating-point coordinates.
inline constexpr double metric_tolerance = 1e-12;

enum class PointMetric { Euclidean, Manhattan };

/**
 * A finite metric space: n labeled points and the full pairwise distance
 * matrix. Instances are immutable after construction and always satisfy the
 * metric axioms (zero diagonal, symmetry, positivity off the diagonal,
 * triangle inequality), so downstream code never re-checks them.
 */
struct FiniteSpace {
    std::size_t n = 0;
    std::vector<std::string> labels;
    std::vector<Vec> coords; // empty when built from an explicit matrix
    Matrix dist;
};

/**
 * Transport cost per unit mass between every pair of points. When the cost
 * was derived as dist^p the exponent is recorded. A zero diagonal is
 * required: it guarantees that staying put is free, which keeps the dual
 * multiplier finite and makes the identity coupling feasible at every
 * budget.
 */
struct CostMatrix {
    Matrix c;
    std::optional<double> exponent_p;
};

namespace detail {

inline void validate_metric(const Matrix& d) {
    const std::size_t n = d.rows();
    if (d.cols() != n) throw NonMetricError("distance matrix must be square");
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(d(i, i)) > metric_tolerance)
            throw NonMetricError("nonzero diagonal at index " + std::to_string(i));
        for (std::size_t j = 0; j < n; ++j) {
            if (!std::isfinite(d(i, j)))
                throw NonMetricError("non-finite distance entry");
            if (i != j && d(i, j) <= 0.0)
                throw NonMetricError("nonpositive distance between distinct points " +
                                     std::to_string(i) + " and " + std::to_string(j));
            const double gap = std::abs(d(i, j) - d(j, i));
            if (gap > metric_tolerance * std::max(1.0, std::abs(d(i, j))))
                throw NonMetricError("asymmetric distances between " + std::to_string(i) +
                                     " and " + std::to_string(j));
        }
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = 0; k < n; ++k) {
                const double via = d(i, k) + d(k, j);
                if (d(i, j) > via + metric_tolerance * std::max(1.0, via))
                    throw NonMetricError("triangle inequality violated on (" +
                                         std::to_string(i) + "," + std::to_string(j) + "," +
                                         std::to_string(k) + ")");
            }
}

inline std::vector<std::string> index_labels(std::size_t n) {
    std::vector<std::string> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = std::to_string(i);
    return labels;
}

inline double point_distance(const Vec& a, const Vec& b, PointMetric metric) {
    double acc = 0.0;
    switch (metric) {
    case PointMetric::Euclidean:
        for (std::size_t k = 0; k < a.size(); ++k) {
            const double diff = a[k] - b[k];
            acc += diff * diff;
        }
        return std::sqrt(acc);
    case PointMetric::Manhattan:
        for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
        return acc;
    }
    return acc; // unreachable
}

} // namespace detail

/**
 * Builds a finite metric space from a point cloud. All points must have the
 * same dimension and be pairwise distinct (coincident points would produce a
 * zero off-diagonal distance, which is not a metric).
 */
inline FiniteSpace build_space(const std::vector<Vec>& points, PointMetric metric) {
    if (points.empty()) throw EmptySpaceError("at least one point is required");
    const std::size_t n = points.size();
    const std::size_t dim = points.front().size();
    for (const auto& p : points)
        if (p.size() != dim)
            throw DimensionMismatchError("points have unequal dimensions");

    Matrix d(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dij = detail::point_distance(points[i], points[j], metric);
            d(i, j) = dij;
            d(j, i) = dij;
        }
    detail::validate_metric(d);
    return FiniteSpace{n, detail::index_labels(n), points, std::move(d)};
}

/**
 * Builds a finite metric space from an explicit distance matrix. The matrix
 * must satisfy all metric axioms within `metric_tolerance`; the diagonal is
 * snapped to exact zero after validation.
 */
inline FiniteSpace build_space(const Matrix& dist,
                               std::vector<std::string> labels = {}) {
    if (dist.rows() == 0) throw EmptySpaceError("at least one point is required");
    detail::validate_metric(dist);
    Matrix d = dist;
    for (std::size_t i = 0; i < d.rows(); ++i) d(i, i) = 0.0;
    if (labels.empty()) labels = detail::index_labels(d.rows());
    if (labels.size() != d.rows())
        throw DimensionMismatchError("label count does not match point count");
    return FiniteSpace{d.rows(), std::move(labels), {}, std::move(d)};
}

/**
 * Derives the transport cost c(x,y) = d(x,y)^p from the metric. Exponents
 * p = 1 and p = 2 are computed without pow so that the common Wasserstein
 * costs are bit-reproducible.
 */
inline CostMatrix cost_from_metric(const FiniteSpace& space, double p) {
    if (!(p >= 1.0)) throw BadExponentError("cost exponent must satisfy p >= 1");
    const std::size_t n = space.n;
    Matrix c(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double d = space.dist(i, j);
            if (p == 1.0)
                c(i, j) = d;
            else if (p == 2.0)
                c(i, j) = d * d;
            else
                c(i, j) = std::pow(d, p);
        }
    return CostMatrix{std::move(c), p};
}

/**
 * Validates an explicitly supplied cost matrix: entries must be finite and
 * nonnegative with an exactly zero diagonal (entries within metric_tolerance
 * of zero are snapped). Symmetry is NOT required here; asymmetric costs are
 * legitimate inputs.
 */
inline CostMatrix cost_from_matrix(const Matrix& c) {
    if (c.rows() == 0 || c.rows() != c.cols())
        throw DimensionMismatchError("cost matrix must be square and nonempty");
    Matrix out = c;
    for (std::size_t i = 0; i < out.rows(); ++i)
        for (std::size_t j = 0; j < out.cols(); ++j) {
            if (!std::isfinite(out(i, j)) || out(i, j) < 0.0)
                throw ValidationError("cost entries must be finite and nonnegative");
            if (i == j) {
                if (out(i, i) > metric_tolerance)
                    throw ValidationError("cost diagonal must be zero");
                out(i, i) = 0.0;
            }
        }
    return CostMatrix{std::move(out), std::nullopt};
}

/**
 * Uniform discretization of the interval [a,b] into n points together with
 * the cost |x - y|^p. This is the stock desk-scale stand-in for a compact
 * one-dimensional space.
 */
inline std::pair<FiniteSpace, CostMatrix> grid_space(double a, double b,
                                                     std::size_t n, double p) {
    if (!(a < b)) throw BadIntervalError("grid requires a < b");
    if (n < 2) throw BadCountError("grid requires at least two points");
    std::vector<Vec> points(n);
    for (std::size_t k = 0; k < n; ++k)
        points[k] = {a + static_cast<double>(k) * (b - a) / static_cast<double>(n - 1)};
    FiniteSpace space = build_space(points, PointMetric::Euclidean);
    CostMatrix cost = cost_from_metric(space, p);
    return {std::move(space), std::move(cost)};
}

} // namespace otdro
