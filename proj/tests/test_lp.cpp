// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hedgebox/lp.hpp"
#include "support/lp_gen.hpp"
#include "support/lp_oracle.hpp"

using namespace hedgebox;

TEST_CASE("one-variable LP with a single bound") {
    LpProblem p(1, {1.0}, {VarKind::Free});
    p.add_inequality({1.0}, 1.0); // x >= 1
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.x[0] == Catch::Approx(1.0));
    CHECK(s.value == Catch::Approx(1.0));
    REQUIRE(s.dual_ineq.size() == 1);
    CHECK(s.dual_ineq[0] == Catch::Approx(1.0));
    CHECK(s.duality_gap <= 1e-9);
}

TEST_CASE("unbounded direction is detected") {
    LpProblem p(1, {-1.0}, {VarKind::NonNegative});
    auto s = solve_lp(p);
    CHECK(s.status == LpStatus::Unbounded);
}

TEST_CASE("two-variable LP hits the optimal face value") {
    LpProblem p(2, {1.0, 1.0}, {VarKind::NonNegative, VarKind::NonNegative});
    p.add_inequality({1.0, 1.0}, 1.0);
    p.add_inequality({1.0, -1.0}, 0.0);
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.value == Catch::Approx(1.0)); // value checked, not the point
    CHECK(s.primal_residual <= 1e-9);
    CHECK(s.cs_residual <= 1e-8);
}

TEST_CASE("infeasible system yields a verifying Farkas certificate") {
    // x + y >= 2 and -x - y >= -1 cannot both hold.
    LpProblem p(2, {0.0, 0.0}, {VarKind::NonNegative, VarKind::NonNegative});
    p.add_inequality({1.0, 1.0}, 2.0);
    p.add_inequality({-1.0, -1.0}, -1.0);
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Infeasible);
    REQUIRE(s.farkas_ineq.size() == 2);
    for (double y : s.farkas_ineq) CHECK(y >= 0.0);
    double yb = s.farkas_ineq[0] * 2.0 + s.farkas_ineq[1] * -1.0;
    CHECK(yb > 1e-9);
    for (int j = 0; j < 2; ++j) {
        double col = s.farkas_ineq[0] * 1.0 + s.farkas_ineq[1] * -1.0;
        CHECK(col <= 1e-9); // nonpositive combination on nonneg variables
    }
}

TEST_CASE("equality rows get free-signed duals and exact strong duality") {
    // min x + 2y s.t. x + y = 1, x,y >= 0 -> x = 1, value 1, eq dual 1.
    LpProblem p(2, {1.0, 2.0}, {VarKind::NonNegative, VarKind::NonNegative});
    p.add_equality({1.0, 1.0}, 1.0);
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.value == Catch::Approx(1.0));
    REQUIRE(s.dual_eq.size() == 1);
    CHECK(s.dual_eq[0] == Catch::Approx(1.0));
    CHECK(s.duality_gap <= 1e-9);
}

TEST_CASE("random LPs agree with vertex-enumeration oracle") {
    std::mt19937_64 rng(20240810);
    int optimal = 0, infeasible = 0, unbounded = 0;
    for (int t = 0; t < 120; ++t) {
        LpProblem p = lp_gen::random_pointed_lp(rng);
        auto mine = solve_lp(p);
        auto ref = lp_oracle::solve_by_enumeration(p);
        INFO("case " << t);
        REQUIRE(mine.status != LpStatus::Stalled);
        switch (ref.status) {
            case lp_oracle::Status::Optimal:
                ++optimal;
                REQUIRE(mine.status == LpStatus::Optimal);
                REQUIRE(mine.value == Catch::Approx(ref.value).margin(1e-9));
                REQUIRE(mine.primal_residual <= 1e-8);
                REQUIRE(mine.duality_gap <= 1e-8 * (1.0 + std::abs(mine.value)));
                break;
            case lp_oracle::Status::Infeasible:
                ++infeasible;
                REQUIRE(mine.status == LpStatus::Infeasible);
                break;
            case lp_oracle::Status::Unbounded:
                ++unbounded;
                REQUIRE(mine.status == LpStatus::Unbounded);
                break;
        }
    }
    // The generator is tuned to exercise all three outcomes.
    CHECK(optimal > 10);
    CHECK(infeasible > 5);
    CHECK(unbounded > 5);
}

TEST_CASE("degenerate ties do not cycle") {
    // Klee-Minty style stress in 3 variables plus duplicated rows.
    LpProblem p(3, {-100.0, -10.0, -1.0},
                {VarKind::NonNegative, VarKind::NonNegative, VarKind::NonNegative});
    p.add_inequality({-1.0, 0.0, 0.0}, -1.0);
    p.add_inequality({-20.0, -1.0, 0.0}, -100.0);
    p.add_inequality({-200.0, -20.0, -1.0}, -10000.0);
    p.add_inequality({-1.0, 0.0, 0.0}, -1.0);
    auto s = solve_lp(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.value == Catch::Approx(-10000.0));
}
