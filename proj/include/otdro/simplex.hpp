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
#include <cstddef>
#include <limits>
#include <vector>

namespace otdro {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct LpSolution {
    Vec x;
    double value = 0.0;
    LpStatus status = LpStatus::Optimal;
};

/**
 * A linear program in standard form:
 *
 *   minimize    objective . x
 *   subject to  eq_lhs   x  =  eq_rhs
 *               ineq_lhs x  <= ineq_rhs
 *               x >= 0
 *
 * Either constraint block may be empty.
 */
struct LinearProgram {
    Vec objective;
    Matrix eq_lhs;
    Vec eq_rhs;
    Matrix ineq_lhs;
    Vec ineq_rhs;
};

namespace detail {

/// Thresholds for the dense tableau. Instances here are tiny and well
/// scaled, so fixed absolute tolerances suffice.
inline constexpr double simplex_cost_tol = 1e-9;   // reduced-cost optimality
inline constexpr double simplex_pivot_tol = 1e-10; // minimum pivot magnitude
inline constexpr double simplex_ratio_tol = 1e-12; // min-ratio tie window

/**
 * Dense simplex tableau with Bland's anti-cycling pivot rule. The basis
 * columns are kept as an identity submatrix; `reduced` is the objective row
 * reduced against the current basis. Deterministic by construction: the
 * entering variable is the lowest-index column with a negative reduced cost
 * and ratio-test ties go to the lowest basis index.
 */
class Tableau {
public:
    Tableau(std::vector<Vec> rows, Vec rhs, std::vector<std::size_t> basis)
        : rows_(std::move(rows)), rhs_(std::move(rhs)), basis_(std::move(basis)) {}

    std::size_t row_count() const { return rows_.size(); }
    std::size_t col_count() const { return rows_.empty() ? 0 : rows_.front().size(); }
    const std::vector<std::size_t>& basis() const { return basis_; }
    double rhs(std::size_t r) const { return rhs_[r]; }
    double entry(std::size_t r, std::size_t c) const { return rows_[r][c]; }

    /// Reduces a raw cost vector against the current basis and returns the
    /// objective value of the current basic solution.
    double load_costs(const Vec& costs) {
        reduced_ = costs;
        double value = 0.0;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            const double f = reduced_[basis_[r]];
            if (f == 0.0) continue;
            value += f * rhs_[r];
            for (std::size_t c = 0; c < reduced_.size(); ++c)
                reduced_[c] -= f * rows_[r][c];
        }
        return value;
    }

    /**
     * Runs simplex iterations until optimality over the first `active_cols`
     * columns. Returns Optimal or Unbounded; throws NumericalFailureError if
     * the iteration guard trips (which Bland's rule should make impossible).
     */
    LpStatus optimize(std::size_t active_cols) {
        const std::size_t max_iter = 2000 + 200 * (row_count() + active_cols);
        for (std::size_t iter = 0; iter < max_iter; ++iter) {
            // Bland: lowest-index improving column.
            std::size_t enter = active_cols;
            for (std::size_t c = 0; c < active_cols; ++c)
                if (reduced_[c] < -simplex_cost_tol) { enter = c; break; }
            if (enter == active_cols) return LpStatus::Optimal;

            // Min-ratio test; ties resolved by the smallest basis index.
            std::size_t leave = row_count();
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t r = 0; r < row_count(); ++r) {
                const double a = rows_[r][enter];
                if (a <= simplex_pivot_tol) continue;
                const double ratio = rhs_[r] / a;
                if (ratio < best_ratio - simplex_ratio_tol) {
                    best_ratio = ratio;
                    leave = r;
                } else if (ratio <= best_ratio + simplex_ratio_tol &&
                           leave < row_count() && basis_[r] < basis_[leave]) {
                    leave = r;
                }
            }
            if (leave == row_count()) return LpStatus::Unbounded;
            pivot(leave, enter);
        }
        throw NumericalFailureError("simplex iteration guard exceeded");
    }

    /// Pivots variable `col` into the basis at row `row`.
    void pivot(std::size_t row, std::size_t col) {
        const double inv = 1.0 / rows_[row][col];
        for (double& v : rows_[row]) v *= inv;
        rows_[row][col] = 1.0; // kill roundoff on the pivot itself
        rhs_[row] *= inv;
        for (std::size_t r = 0; r < rows_.size(); ++r) {
            if (r == row) continue;
            const double f = rows_[r][col];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < rows_[r].size(); ++c)
                rows_[r][c] -= f * rows_[row][c];
            rows_[r][col] = 0.0;
            rhs_[r] -= f * rhs_[row];
        }
        const double f = reduced_[col];
        if (f != 0.0) {
            for (std::size_t c = 0; c < reduced_.size(); ++c)
                reduced_[c] -= f * rows_[row][c];
            reduced_[col] = 0.0;
        }
        basis_[row] = col;
    }

    /// Drops row r (used for redundant equality constraints).
    void drop_row(std::size_t r) {
        rows_.erase(rows_.begin() + static_cast<std::ptrdiff_t>(r));
        rhs_.erase(rhs_.begin() + static_cast<std::ptrdiff_t>(r));
        basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(r));
    }

private:
    std::vector<Vec> rows_;
    Vec rhs_;
    std::vector<std::size_t> basis_;
    Vec reduced_;
};

} // namespace detail

/**
 * Solves a bounded LP with the two-phase dense simplex method.
 *
 * Phase 1 installs one artificial variable per constraint row and minimizes
 * their sum; a positive optimum means the program is infeasible. Artificials
 * still basic at level zero afterwards are pivoted out, or their (redundant)
 * rows dropped when no pivot exists. Phase 2 then minimizes the original
 * objective with Bland's rule throughout, so runs are deterministic and
 * cycling-free.
 *
 * The reported value is recomputed as objective . x from the extracted
 * solution rather than read off the tableau, so clean optima (e.g. an
 * all-zero-cost plan) come back exact.
 */
inline LpSolution simplex_solve(const LinearProgram& lp) {
    const std::size_t nvar = lp.objective.size();
    const std::size_t neq = lp.eq_rhs.size();
    const std::size_t nineq = lp.ineq_rhs.size();
    if ((neq > 0 && lp.eq_lhs.cols() != nvar) || lp.eq_lhs.rows() != neq)
        throw DimensionMismatchError("equality block shape mismatch");
    if ((nineq > 0 && lp.ineq_lhs.cols() != nvar) || lp.ineq_lhs.rows() != nineq)
        throw DimensionMismatchError("inequality block shape mismatch");

    const std::size_t nrows = neq + nineq;
    const std::size_t nslack = nineq;
    const std::size_t nstruct = nvar + nslack;    // structural + slack columns
    const std::size_t ntotal = nstruct + nrows;   // + one artificial per row

    std::vector<Vec> rows(nrows, Vec(ntotal, 0.0));
    Vec rhs(nrows, 0.0);
    for (std::size_t r = 0; r < neq; ++r) {
        for (std::size_t c = 0; c < nvar; ++c) rows[r][c] = lp.eq_lhs(r, c);
        rhs[r] = lp.eq_rhs[r];
    }
    for (std::size_t t = 0; t < nineq; ++t) {
        const std::size_t r = neq + t;
        for (std::size_t c = 0; c < nvar; ++c) rows[r][c] = lp.ineq_lhs(t, c);
        rows[r][nvar + t] = 1.0; // slack
        rhs[r] = lp.ineq_rhs[t];
    }
    // Nonnegative right-hand sides so artificials give a feasible start.
    for (std::size_t r = 0; r < nrows; ++r) {
        if (rhs[r] < 0.0) {
            for (double& v : rows[r]) v = -v;
            rhs[r] = -rhs[r];
        }
        rows[r][nstruct + r] = 1.0;
    }

    std::vector<std::size_t> basis(nrows);
    for (std::size_t r = 0; r < nrows; ++r) basis[r] = nstruct + r;
    detail::Tableau tab(std::move(rows), std::move(rhs), std::move(basis));

    // Phase 1: drive the artificials to zero.
    Vec phase1(ntotal, 0.0);
    for (std::size_t r = 0; r < nrows; ++r) phase1[nstruct + r] = 1.0;
    tab.load_costs(phase1);
    if (tab.optimize(ntotal) != LpStatus::Optimal)
        throw NumericalFailureError("phase 1 cannot be unbounded");
    double infeas = 0.0;
    for (std::size_t r = 0; r < tab.row_count(); ++r)
        if (tab.basis()[r] >= nstruct) infeas += tab.rhs(r);
    if (infeas > 1e-9) return LpSolution{{}, 0.0, LpStatus::Infeasible};

    // Remove artificials left basic at level zero; a row with no usable
    // pivot is linearly dependent and gets dropped.
    for (std::size_t r = tab.row_count(); r-- > 0;) {
        if (tab.basis()[r] < nstruct) continue;
        std::size_t col = nstruct;
        for (std::size_t c = 0; c < nstruct; ++c)
            if (std::abs(tab.entry(r, c)) > detail::simplex_pivot_tol) { col = c; break; }
        if (col < nstruct)
            tab.pivot(r, col);
        else
            tab.drop_row(r);
    }

    // Phase 2: original objective over structural and slack columns only.
    Vec phase2(ntotal, 0.0);
    for (std::size_t c = 0; c < nvar; ++c) phase2[c] = lp.objective[c];
    tab.load_costs(phase2);
    const LpStatus status = tab.optimize(nstruct);
    if (status == LpStatus::Unbounded) return LpSolution{{}, 0.0, LpStatus::Unbounded};

    Vec x(nvar, 0.0);
    for (std::size_t r = 0; r < tab.row_count(); ++r)
        if (tab.basis()[r] < nvar) x[tab.basis()[r]] = tab.rhs(r);
    const double value = dot(lp.objective, x);
    return LpSolution{std::move(x), value, LpStatus::Optimal};
}

} // namespace otdro
