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

#include <charconv>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace otdro {

using Vec = std::vector<double>;

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Input validation failures.
struct NonMetricError : Error { using Error::Error; };
struct EmptySpaceError : Error { using Error::Error; };
struct BadExponentError : Error { using Error::Error; };
struct BadIntervalError : Error { using Error::Error; };
struct BadCountError : Error { using Error::Error; };
struct IndexOutOfRangeError : Error { using Error::Error; };
struct BadMapError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };
struct ValidationError : Error { using Error::Error; };

// Solver failures.
struct InfeasibleError : Error { using Error::Error; };
struct UnboundedError : Error { using Error::Error; };
struct NumericalFailureError : Error { using Error::Error; };
struct InfeasibleRecoveryError : Error { using Error::Error; };
struct CertificateFailureError : Error { using Error::Error; };

// Document ingestion failures.
struct ParseError : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };

/**
 * Dense row-major matrix of doubles. The library only ever needs small
 * matrices (point counts are desk scale), so no effort is spent on blocking
 * or expression templates.
 */
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    /// Builds a matrix from a list of equally long rows.
    static Matrix from_rows(const std::vector<Vec>& rows) {
        if (rows.empty()) return Matrix();
        Matrix m(rows.size(), rows.front().size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_)
                throw DimensionMismatchError("matrix rows have unequal lengths");
            for (std::size_t j = 0; j < m.cols_; ++j)
                m(i, j) = rows[i][j];
        }
        return m;
    }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    const Vec& data() const { return data_; }

    std::vector<Vec> to_rows() const {
        std::vector<Vec> out(rows_, Vec(cols_));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                out[i][j] = (*this)(i, j);
        return out;
    }

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

/// Dot product; sizes must already agree.
inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

/// Shortest decimal representation that parses back to the same double.
inline std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

} // namespace otdro
