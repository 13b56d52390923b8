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
#include <random>

using namespace otdro;
using testsupport::random_instance;
using testsupport::random_measure;
using testsupport::two_point_problem;

TEST_CASE("Lagrangian evaluation", "[lagrangian]") {
    const PrimalProblem prob = two_point_problem(0.4);

    SECTION("identity coupling with a slack budget term") {
        const Coupling identity = deterministic_coupling(prob.mu, {0, 1});
        // <f> = 1, cost 0, so L = 1 + 2 (0 - 0.4) = 0.2
        REQUIRE(lagrangian(identity, 2.0, prob) == Catch::Approx(0.2).margin(1e-12));
    }
    SECTION("multiplier zero leaves the plain objective") {
        std::mt19937_64 rng(89);
        const Coupling pi = random_coupling(prob.mu, rng);
        double objective = 0.0;
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 2; ++j) objective += pi.pi(i, j) * prob.f[j];
        REQUIRE(lagrangian(pi, 0.0, prob) == Catch::Approx(objective).margin(1e-15));
    }
    SECTION("optimal plan at the optimal multiplier") {
        const Coupling plan{Matrix::from_rows({{0, 0}, {0.4, 0.6}})};
        REQUIRE(lagrangian(plan, 1.0, prob) == Catch::Approx(0.6).margin(1e-12));
    }
    SECTION("negative multipliers are rejected") {
        const Coupling identity = deterministic_coupling(prob.mu, {0, 1});
        REQUIRE_THROWS_AS(lagrangian(identity, -1.0, prob), ValidationError);
    }
}

TEST_CASE("both Lagrangian groupings agree", "[lagrangian]") {
    std::mt19937_64 rng(97);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 30; ++trial) {
        const PrimalProblem prob = random_instance(rng);
        const Coupling pi = random_coupling(prob.mu, rng);
        const double lam = 10.0 * unif(rng);
        REQUIRE(std::abs(lagrangian(pi, lam, prob) -
                         lagrangian_constraint_form(pi, lam, prob)) <= 1e-12);
    }
}

TEST_CASE("convex-concave-like holds with equality", "[lagrangian]") {
    const PrimalProblem prob = two_point_problem(0.4);
    std::mt19937_64 rng(101);
    const Coupling pi1 = random_coupling(prob.mu, rng);
    const Coupling pi2 = random_coupling(prob.mu, rng);

    SECTION("degenerate blend weights") {
        REQUIRE(check_cc_like(pi1, pi2, 0.0, {0.0, 1.0, 5.0}, prob) <= 1e-15);
        REQUIRE(check_cc_like(pi1, pi2, 1.0, {0.0, 1.0, 5.0}, prob) <= 1e-15);
    }
    SECTION("interior blend on a larger instance") {
        std::mt19937_64 rng4(103);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<Vec> points(4);
        for (auto& p : points) p = {unif(rng4), unif(rng4)};
        const CostMatrix cost =
            cost_from_metric(build_space(points, PointMetric::Euclidean), 1.0);
        Vec f{0.2, 0.9, 0.4, 0.7};
        const PrimalProblem big(f, random_measure(4, rng4), cost, 0.3);
        const Coupling a = random_coupling(big.mu, rng4);
        const Coupling b = random_coupling(big.mu, rng4);
        REQUIRE(check_cc_like(a, b, 0.37, {0.0, 1.0, 5.0}, big) <= 1e-12);
    }
}

TEST_CASE("inner minimum over plans", "[lagrangian]") {
    const PrimalProblem prob = two_point_problem(0.4);
    REQUIRE(min_over_plans(1.0, prob) == Catch::Approx(0.6).margin(1e-12));
    REQUIRE(min_over_plans(0.0, prob) == 0.0); // min f
    REQUIRE(min_over_plans(10.0, prob) == Catch::Approx(-3.0).margin(1e-12));
}

TEST_CASE("closed form agrees with the LP route", "[lagrangian]") {
    std::mt19937_64 rng(107);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const PrimalProblem prob = random_instance(rng);
        for (int s = 0; s < 3; ++s) {
            const double lam = 8.0 * unif(rng);
            REQUIRE(std::abs(min_over_plans(lam, prob) - min_over_plans_lp(lam, prob)) <=
                    1e-9);
        }
    }
}

TEST_CASE("every plan dominates the inner minimum", "[lagrangian]") {
    std::mt19937_64 rng(109);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const PrimalProblem prob = random_instance(rng);
        const Coupling pi = random_coupling(prob.mu, rng);
        const double lam = 5.0 * unif(rng);
        REQUIRE(lagrangian(pi, lam, prob) >= min_over_plans(lam, prob) - 1e-9);
    }
}

TEST_CASE("supremum over multipliers", "[lagrangian]") {
    const PrimalProblem prob = two_point_problem(0.4);

    SECTION("feasible plans return the plain objective") {
        const Coupling identity = deterministic_coupling(prob.mu, {0, 1});
        const auto sup = sup_over_lambda(identity, prob);
        REQUIRE(sup.has_value());
        REQUIRE(*sup == Catch::Approx(1.0).margin(1e-12)); // E_mu f
    }
    SECTION("a plan with the budget exactly binding") {
        const Coupling plan{Matrix::from_rows({{0, 0}, {0.4, 0.6}})};
        const auto sup = sup_over_lambda(plan, prob);
        REQUIRE(sup.has_value());
        REQUIRE(*sup == Catch::Approx(0.6).margin(1e-12));
    }
    SECTION("a violating plan is unbounded above") {
        const Coupling plan{Matrix::from_rows({{0, 0}, {0.5, 0.5}})}; // cost 0.5 > 0.4
        REQUIRE_FALSE(sup_over_lambda(plan, prob).has_value());
    }
}

TEST_CASE("minimax certification", "[lagrangian]") {
    SECTION("two-point instance") {
        const MinimaxReport report = certify_minimax(two_point_problem(0.4));
        REQUIRE(std::abs(report.gap) <= 1e-8);
        REQUIRE(report.min_sup == Catch::Approx(0.6).margin(1e-9));
        REQUIRE(report.sup_min == Catch::Approx(0.6).margin(1e-9));
        REQUIRE(report.cc_like_max_violation <= 1e-12);
        REQUIRE(report.lsc_checked);
    }
    SECTION("random instances certify") {
        std::mt19937_64 rng(113);
        for (int trial = 0; trial < 5; ++trial) {
            const MinimaxReport report = certify_minimax(random_instance(rng), 50, 1);
            REQUIRE(std::abs(report.gap) <= 1e-8);
            REQUIRE(report.cc_like_max_violation <= 1e-12);
        }
    }
    SECTION("unconstrained radius collapses both sides to min f") {
        // r beyond every possible transport cost
        const MinimaxReport report = certify_minimax(two_point_problem(5.0));
        REQUIRE(report.min_sup == Catch::Approx(0.0).margin(1e-10));
        REQUIRE(report.sup_min == Catch::Approx(0.0).margin(1e-10));
    }
    SECTION("weak duality direction of the gap") {
        std::mt19937_64 rng(127);
        for (int trial = 0; trial < 10; ++trial) {
            const MinimaxReport report = certify_minimax(random_instance(rng), 10, 2);
            REQUIRE(report.gap >= -1e-9);
        }
    }
}
