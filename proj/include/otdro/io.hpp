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
#include "otdro/primal.hpp"
#include "otdro/recovery.hpp"
#include "otdro/space.hpp"
#include "otdro/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace otdro {

enum class Sense { Min, Max };

inline const char* to_string(Sense s) { return s == Sense::Min ? "min" : "max"; }

/**
 * A fully validated problem document. The wire format is JSON with top-level
 * keys {version, space, cost, f, mu, r, sense} plus an optional second
 * measure `nu` for transport-distance queries:
 *
 *   space: {"points": [[..], ..], "metric": "euclidean"|"manhattan"}
 *          or {"dist": [[..], ..]}
 *   cost:  {"p": number >= 1} or {"matrix": [[..], ..]}
 *
 * `sense` defaults to "min" when absent. Maximization is always realized by
 * solving the minimization problem for -f, so this struct keeps f as given
 * and records the sense separately.
 */
struct ProblemSpec {
    std::string version;
    FiniteSpace space;
    std::optional<PointMetric> metric; // set when the space came from points
    CostMatrix cost;
    Vec f;
    Measure mu;
    std::optional<Measure> nu;
    double r = 0.0;
    Sense sense = Sense::Min;

    /// The minimization-form problem this document describes. For
    /// sense = max the caller negates f (see PrimalProblem::negated).
    PrimalProblem problem() const { return PrimalProblem(f, mu, cost, r); }

    bool operator==(const ProblemSpec& other) const {
        return version == other.version && space.dist == other.space.dist &&
               space.coords == other.space.coords && metric == other.metric &&
               cost.c == other.cost.c && cost.exponent_p == other.cost.exponent_p &&
               f == other.f && mu == other.mu && nu == other.nu && r == other.r &&
               sense == other.sense;
    }
};

namespace detail {

using json = nlohmann::json;

inline const json& require_key(const json& obj, const char* key) {
    if (!obj.is_object() || !obj.contains(key))
        throw SchemaError(std::string("missing required field '") + key + "'");
    return obj.at(key);
}

inline double require_number(const json& v, const char* what) {
    if (!v.is_number()) throw SchemaError(std::string(what) + " must be a number");
    return v.get<double>();
}

inline std::string require_string(const json& v, const char* what) {
    if (!v.is_string()) throw SchemaError(std::string(what) + " must be a string");
    return v.get<std::string>();
}

inline Vec require_vector(const json& v, const char* what) {
    if (!v.is_array()) throw SchemaError(std::string(what) + " must be an array");
    Vec out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(require_number(e, what));
    return out;
}

inline Matrix require_matrix(const json& v, const char* what) {
    if (!v.is_array() || v.empty())
        throw SchemaError(std::string(what) + " must be a nonempty array of rows");
    std::vector<Vec> rows;
    rows.reserve(v.size());
    for (const auto& row : v) rows.push_back(require_vector(row, what));
    try {
        return Matrix::from_rows(rows);
    } catch (const DimensionMismatchError& e) {
        throw SchemaError(std::string(what) + ": " + e.what());
    }
}

inline json matrix_to_json(const Matrix& m) { return json(m.to_rows()); }

} // namespace detail

/**
 * Parses and validates a problem document. Structural defects (bad JSON,
 * missing fields, wrong shapes) surface as ParseError/SchemaError; semantic
 * defects (metric axiom violations, negative weights, r < 0, bad exponents)
 * as ValidationError. Measures are renormalized on entry per the Measure
 * construction policy.
 */
inline ProblemSpec parse_problem(const std::string& text) {
    detail::json doc;
    try {
        doc = detail::json::parse(text);
    } catch (const detail::json::parse_error& e) {
        throw ParseError(e.what());
    }
    if (!doc.is_object()) throw SchemaError("top-level document must be an object");

    ProblemSpec spec;
    spec.version = detail::require_string(detail::require_key(doc, "version"), "version");

    const auto& space_doc = detail::require_key(doc, "space");
    const bool has_points = space_doc.is_object() && space_doc.contains("points");
    const bool has_dist = space_doc.is_object() && space_doc.contains("dist");
    if (has_points == has_dist)
        throw SchemaError("space must carry exactly one of 'points' or 'dist'");
    try {
        if (has_points) {
            const auto& pts = space_doc.at("points");
            if (!pts.is_array() || pts.empty())
                throw SchemaError("space.points must be a nonempty array");
            std::vector<Vec> points;
            points.reserve(pts.size());
            for (const auto& p : pts) points.push_back(detail::require_vector(p, "space.points"));
            const std::string metric =
                detail::require_string(detail::require_key(space_doc, "metric"), "space.metric");
            if (metric == "euclidean")
                spec.metric = PointMetric::Euclidean;
            else if (metric == "manhattan")
                spec.metric = PointMetric::Manhattan;
            else
                throw SchemaError("space.metric must be 'euclidean' or 'manhattan'");
            spec.space = build_space(points, *spec.metric);
        } else {
            spec.space = build_space(detail::require_matrix(space_doc.at("dist"), "space.dist"));
        }
    } catch (const NonMetricError& e) {
        throw ValidationError(std::string("space: ") + e.what());
    } catch (const EmptySpaceError& e) {
        throw ValidationError(std::string("space: ") + e.what());
    } catch (const DimensionMismatchError& e) {
        throw SchemaError(std::string("space: ") + e.what());
    }

    const auto& cost_doc = detail::require_key(doc, "cost");
    const bool has_p = cost_doc.is_object() && cost_doc.contains("p");
    const bool has_matrix = cost_doc.is_object() && cost_doc.contains("matrix");
    if (has_p == has_matrix)
        throw SchemaError("cost must carry exactly one of 'p' or 'matrix'");
    try {
        if (has_p) {
            spec.cost = cost_from_metric(
                spec.space, detail::require_number(cost_doc.at("p"), "cost.p"));
        } else {
            spec.cost = cost_from_matrix(detail::require_matrix(cost_doc.at("matrix"), "cost.matrix"));
        }
    } catch (const BadExponentError& e) {
        throw ValidationError(std::string("cost: ") + e.what());
    } catch (const DimensionMismatchError& e) {
        throw SchemaError(std::string("cost: ") + e.what());
    }
    if (spec.cost.c.rows() != spec.space.n)
        throw SchemaError("cost matrix size does not match the space");

    spec.f = detail::require_vector(detail::require_key(doc, "f"), "f");
    if (spec.f.size() != spec.space.n)
        throw SchemaError("f length does not match the space");

    Vec mu_raw = detail::require_vector(detail::require_key(doc, "mu"), "mu");
    if (mu_raw.size() != spec.space.n)
        throw SchemaError("mu length does not match the space");
    try {
        spec.mu = Measure::from_weights(std::move(mu_raw));
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("mu: ") + e.what());
    }
    if (doc.contains("nu")) {
        Vec nu_raw = detail::require_vector(doc.at("nu"), "nu");
        if (nu_raw.size() != spec.space.n)
            throw SchemaError("nu length does not match the space");
        try {
            spec.nu = Measure::from_weights(std::move(nu_raw));
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("nu: ") + e.what());
        }
    }

    spec.r = detail::require_number(detail::require_key(doc, "r"), "r");
    if (!(spec.r >= 0.0)) throw ValidationError("r must be nonnegative");

    if (doc.contains("sense")) {
        const std::string s = detail::require_string(doc.at("sense"), "sense");
        if (s == "min")
            spec.sense = Sense::Min;
        else if (s == "max")
            spec.sense = Sense::Max;
        else
            throw SchemaError("sense must be 'min' or 'max'");
    }
    return spec;
}

/**
 * Serializes a problem back to its wire format. Keys come out sorted and
 * numbers in shortest round-trip form, so emitting and re-parsing is
 * bit-stable and the output is canonical (it doubles as the hash input).
 */
inline std::string emit_problem(const ProblemSpec& spec) {
    detail::json doc;
    doc["version"] = spec.version;
    if (spec.metric) {
        doc["space"]["points"] = spec.space.coords;
        doc["space"]["metric"] =
            *spec.metric == PointMetric::Euclidean ? "euclidean" : "manhattan";
    } else {
        doc["space"]["dist"] = detail::matrix_to_json(spec.space.dist);
    }
    if (spec.cost.exponent_p)
        doc["cost"]["p"] = *spec.cost.exponent_p;
    else
        doc["cost"]["matrix"] = detail::matrix_to_json(spec.cost.c);
    doc["f"] = spec.f;
    doc["mu"] = spec.mu.w;
    if (spec.nu) doc["nu"] = spec.nu->w;
    doc["r"] = spec.r;
    doc["sense"] = to_string(spec.sense);
    return doc.dump(2) + "\n";
}

/// FNV-1a over the canonical serialization; stable across runs and builds.
inline std::string problem_hash(const ProblemSpec& spec) {
    const std::string canonical = emit_problem(spec);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    static const char* digits = "0123456789abcdef";
    for (int k = 15; k >= 0; --k) {
        buf[k] = digits[h & 0xf];
        h >>= 4;
    }
    buf[16] = '\0';
    return std::string(buf);
}

// ---------------------------------------------------------------------------
// Result documents
// ---------------------------------------------------------------------------

struct PrimalReport {
    double value = 0.0;
    double cost_used = 0.0;
    std::string status;
    std::vector<Vec> plan;
};

struct DualReport {
    bool attained = true;
    double lambda_star = 0.0; // meaningful only when attained
    double value = 0.0;
};

struct WorstCaseReport {
    Vec nu;
    double blend_t = 0.0;
    double slack = 0.0;
    std::vector<CertificateClause> certificate;
};

struct ResultDocument {
    std::string problem; // hash of the canonical problem serialization
    std::string sense = "min";
    std::optional<PrimalReport> primal;
    std::optional<DualReport> dual;
    std::optional<WorstCaseReport> worst_case;
    std::optional<double> gap;
    std::optional<std::map<std::string, double>> timings; // seconds per stage
};

/**
 * Serializes a result document: sorted keys, shortest round-trip numbers.
 * The dual block omits lambda_star when the supremum is unattained. Timings
 * are only present when the caller measured them, keeping default outputs
 * byte-identical across runs.
 */
inline std::string emit_result(const ResultDocument& res) {
    detail::json doc;
    doc["problem"] = res.problem;
    doc["sense"] = res.sense;
    if (res.primal) {
        doc["primal"]["value"] = res.primal->value;
        doc["primal"]["cost_used"] = res.primal->cost_used;
        doc["primal"]["status"] = res.primal->status;
        doc["primal"]["plan"] = res.primal->plan;
    }
    if (res.dual) {
        doc["dual"]["attained"] = res.dual->attained;
        doc["dual"]["value"] = res.dual->value;
        if (res.dual->attained) doc["dual"]["lambda_star"] = res.dual->lambda_star;
    }
    if (res.worst_case) {
        doc["worst_case"]["nu"] = res.worst_case->nu;
        doc["worst_case"]["blend_t"] = res.worst_case->blend_t;
        doc["worst_case"]["slack"] = res.worst_case->slack;
        detail::json clauses = detail::json::array();
        for (const auto& c : res.worst_case->certificate)
            clauses.push_back({{"name", c.name},
                               {"pass", c.pass},
                               {"measured", c.lhs},
                               {"reference", c.rhs}});
        doc["worst_case"]["certificate"] = clauses;
    }
    if (res.gap) doc["gap"] = *res.gap;
    if (res.timings) doc["timings"] = *res.timings;
    return doc.dump(2) + "\n";
}

/// One row of a radius sweep.
struct SweepRow {
    double r = 0.0;
    double value = 0.0;
    bool attained = true;
    double lambda_star = 0.0;
};

/// CSV with header "r,value,lambda_star,attained", rows in input order.
/// An unattained supremum prints lambda_star as "inf".
inline std::string emit_sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "r,value,lambda_star,attained\n";
    for (const auto& row : rows) {
        out += format_double(row.r);
        out += ',';
        out += format_double(row.value);
        out += ',';
        out += row.attained ? format_double(row.lambda_star) : "inf";
        out += ',';
        out += row.attained ? "true" : "false";
        out += '\n';
    }
    return out;
}

} // namespace otdro
