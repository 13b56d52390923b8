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

#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstring>
#include <random>

using namespace otdro;
using testsupport::random_instance;
using testsupport::two_point_problem;

TEST_CASE("extreme selections", "[recovery]") {
    SECTION("tie at the kink splits into cheap and costly targets") {
        const PrimalProblem prob = two_point_problem(0.4);
        const DualSolution dual = solve_dual_min(prob);
        const SelectionMap sel = select_extremes(dual, prob);
        REQUIRE(sel.low[1] == 1);  // staying costs 0
        REQUIRE(sel.high[1] == 0); // moving costs 1
    }
    SECTION("unique argmin collapses low and high") {
        const PrimalProblem prob = two_point_problem(2.0); // lambda* = 0, argmin {0}
        const DualSolution dual = solve_dual_min(prob);
        const SelectionMap sel = select_extremes(dual, prob);
        REQUIRE(sel.low == sel.high);
    }
    SECTION("equal costs break ties to the smallest index") {
        // explicit cost with two equally priced global minimizers of f
        const CostMatrix cost = cost_from_matrix(Matrix::from_rows({{0.0, 0.3, 0.5, 0.5},
                                                                    {0.3, 0.0, 0.4, 0.4},
                                                                    {0.5, 0.4, 0.0, 0.2},
                                                                    {0.5, 0.4, 0.2, 0.0}}));
        const PrimalProblem prob(Vec{1.0, 1.0, 0.0, 0.0},
                                 Measure::from_weights({1.0, 0.0, 0.0, 0.0}), cost, 1.0);
        const DualSolution dual = solve_dual_min(prob);
        REQUIRE(dual.lambda_star == 0.0);
        REQUIRE(dual.argmin_sets[0] == std::vector<std::size_t>{2, 3});
        const SelectionMap sel = select_extremes(dual, prob);
        REQUIRE(sel.low[0] == 2);
        REQUIRE(sel.high[0] == 2);
    }
    SECTION("the unattained sentinel is rejected") {
        const PrimalProblem prob = two_point_problem(0.0);
        REQUIRE_THROWS_AS(select_extremes(solve_dual_min(prob), prob), ValidationError);
    }
}

TEST_CASE("worst case on the two-point family", "[recovery]") {
    SECTION("binding budget blends the kink selections") {
        const PrimalProblem prob = two_point_problem(0.4);
        const WorstCaseResult res = recover_worst_case(solve_dual_min(prob), prob);
        REQUIRE(res.blend_t == Catch::Approx(0.4).margin(1e-12));
        REQUIRE(res.nu.w[0] == Catch::Approx(0.4).margin(1e-9));
        REQUIRE(res.nu.w[1] == Catch::Approx(0.6).margin(1e-9));
        REQUIRE(dot(res.nu.w, prob.f) == Catch::Approx(0.6).margin(1e-10));
        REQUIRE(std::abs(res.slack) <= 1e-12);
    }
    SECTION("slack budget takes the pure cheap selection") {
        const PrimalProblem prob = two_point_problem(2.0);
        const WorstCaseResult res = recover_worst_case(solve_dual_min(prob), prob);
        REQUIRE(res.nu.w == Vec{1.0, 0.0});
        REQUIRE(dot(res.nu.w, prob.f) == 0.0);
        REQUIRE(res.blend_t == 0.0);
    }
    SECTION("zero budget returns the baseline") {
        const PrimalProblem prob = two_point_problem(0.0);
        const WorstCaseResult res = recover_worst_case(solve_dual_min(prob), prob);
        REQUIRE(res.nu.w == prob.mu.w);
        REQUIRE(res.slack == 0.0);
    }
}

TEST_CASE("certificate clauses", "[recovery]") {
    const PrimalProblem prob = two_point_problem(0.4);
    const DualSolution dual = solve_dual_min(prob);
    const WorstCaseResult res = recover_worst_case(dual, prob);

    SECTION("clean result passes all four clauses") {
        const CertificateReport report = verify_certificate(res, dual, prob);
        REQUIRE(report.clauses.size() == 4);
        REQUIRE(report.all_pass());
        REQUIRE_NOTHROW(require_certificate(report));
    }
    SECTION("mass moved off the argmin set fails the objective clause") {
        WorstCaseResult corrupted = res;
        corrupted.nu = Measure::from_weights({0.7, 0.3});
        const CertificateReport report = verify_certificate(corrupted, dual, prob);
        REQUIRE_FALSE(report.all_pass());
        bool objective_failed = false;
        for (const auto& clause : report.clauses)
            if (clause.name == "objective" && !clause.pass) objective_failed = true;
        REQUIRE(objective_failed);
        REQUIRE_THROWS_AS(require_certificate(report), CertificateFailureError);
    }
    SECTION("zero budget case passes with sentinel slack") {
        const PrimalProblem degenerate = two_point_problem(0.0);
        const DualSolution dsol = solve_dual_min(degenerate);
        const WorstCaseResult wres = recover_worst_case(dsol, degenerate);
        REQUIRE(verify_certificate(wres, dsol, degenerate).all_pass());
    }
}

TEST_CASE("recovered expectation matches the primal optimum", "[recovery]") {
    std::mt19937_64 rng(73);
    for (int trial = 0; trial < 50; ++trial) {
        const PrimalProblem prob = random_instance(rng);
        const DualSolution dual = solve_dual_min(prob);
        REQUIRE(dual.attained);
        const WorstCaseResult res = recover_worst_case(dual, prob);
        const double primal = solve_primal(prob).value;

        REQUIRE(std::abs(dot(res.nu.w, prob.f) - primal) <= 1e-8);
        REQUIRE(res.blend_t >= 0.0);
        REQUIRE(res.blend_t <= 1.0);
        REQUIRE(plan_cost(res.plan, prob.cost) <= prob.r + 1e-9);
        REQUIRE(std::abs(res.slack) <= 1e-8);

        // support condition: positive mass only on argmin targets
        for (std::size_t i = 0; i < prob.size(); ++i)
            for (std::size_t j = 0; j < prob.size(); ++j)
                if (res.plan.pi(i, j) > 1e-12) {
                    bool member = false;
                    for (std::size_t k : dual.argmin_sets[i]) member = member || k == j;
                    REQUIRE(member);
                }
    }
}

TEST_CASE("pure cheap selection minimizes the Lagrangian integrand", "[recovery]") {
    std::mt19937_64 rng(79);
    for (int trial = 0; trial < 15; ++trial) {
        const PrimalProblem prob = random_instance(rng);
        const DualSolution dual = solve_dual_min(prob);
        const SelectionMap sel = select_extremes(dual, prob);
        const Coupling plan = deterministic_coupling(prob.mu, sel.low);
        // L(plan, lambda*) equals the LP minimum over all feasible plans
        const double lhs = lagrangian(plan, dual.lambda_star, prob);
        const double lp = min_over_plans_lp(dual.lambda_star, prob);
        REQUIRE(lhs <= lp + 1e-9);
        REQUIRE(lhs >= lp - 1e-9);
    }
}

TEST_CASE("recovery is deterministic", "[recovery]") {
    std::mt19937_64 rng(83);
    const PrimalProblem prob = random_instance(rng);
    const DualSolution dual = solve_dual_min(prob);
    const WorstCaseResult a = recover_worst_case(dual, prob);
    const WorstCaseResult b = recover_worst_case(dual, prob);
    REQUIRE(a.plan.pi.data().size() == b.plan.pi.data().size());
    REQUIRE(std::memcmp(a.plan.pi.data().data(), b.plan.pi.data().data(),
                        a.plan.pi.data().size() * sizeof(double)) == 0);
    REQUIRE(std::memcmp(&a.blend_t, &b.blend_t, sizeof(double)) == 0);
}

TEST_CASE("a mismatched budget is flagged as a recovery failure", "[recovery]") {
    // Recovery is handed a dual solution computed for a much smaller budget;
    // the selection costs cannot bracket the real one.
    const PrimalProblem tight = two_point_problem(0.4);
    const DualSolution dual = solve_dual_min(tight);
    const PrimalProblem loose = two_point_problem(10.0);
    REQUIRE_THROWS_AS(recover_worst_case(dual, loose), InfeasibleRecoveryError);
}
