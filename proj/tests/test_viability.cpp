// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include "hedgebox/viability.hpp"

using namespace hedgebox;

namespace {

Market call_market() {
    StateSpace unit({0.0}, {1.0});
    return Market::with_riskless(unit, {PayoffExpr::constant(1.0) + PayoffExpr::coord(0)}, {1.5});
}

} // namespace

TEST_CASE("marketed coordinates recover replicating portfolios") {
    Market m = call_market();
    Grid grid(m.space(), 17);

    auto fit1 = marketed_coordinates(m, m.payoff(1), grid);
    REQUIRE(fit1.marketed);
    CHECK(fit1.coefficients[0] == Catch::Approx(0.0).margin(1e-9));
    CHECK(fit1.coefficients[1] == Catch::Approx(1.0).margin(1e-9));

    auto combo = PayoffExpr::constant(2.0) + PayoffExpr::scale(3.0, m.payoff(1));
    auto fit2 = marketed_coordinates(m, combo, grid);
    REQUIRE(fit2.marketed);
    CHECK(fit2.coefficients[0] == Catch::Approx(2.0).margin(1e-9));
    CHECK(fit2.coefficients[1] == Catch::Approx(3.0).margin(1e-9));

    auto kinked = PayoffExpr::pos_part(m.payoff(1) - PayoffExpr::constant(1.5));
    auto fit3 = marketed_coordinates(m, kinked, grid);
    CHECK_FALSE(fit3.marketed);
    CHECK(fit3.residual > 1e-6);
}

TEST_CASE("price functional values marketed payoffs and flags others") {
    Market m = call_market();
    Grid grid(m.space(), 17);
    PriceFunctional phi(m);

    CHECK(phi(Portfolio({2.0, -1.0})) == Catch::Approx(0.5));
    auto v = phi.value_of(PayoffExpr::scale(2.0, m.payoff(1)), grid);
    REQUIRE(v.marketed);
    CHECK(v.value == Catch::Approx(3.0).margin(1e-8));
    CHECK(phi.consistency_gap(grid) <= 1e-10);
}

TEST_CASE("extension exists for the call market and matches the functional") {
    Market m = call_market();
    Grid grid(m.space(), 17);
    auto res = build_extension(m, grid);
    REQUIRE(res.viable);
    REQUIRE(res.extension.has_value());
    CHECK((*res.extension)(m.payoff(1)) == Catch::Approx(1.5).margin(1e-8));
    CHECK((*res.extension)(PayoffExpr::constant(0.3)) == Catch::Approx(0.3).margin(1e-10));
    CHECK((*res.extension)(PayoffExpr::constant(0.0)) == 0.0);

    auto rep = verify_extension(*res.extension, m, 50);
    CHECK(rep.max_marketed_deviation <= 1e-8);
    CHECK(rep.min_bump_value > 0.0);
    CHECK(rep.max_linearity_deviation <= 1e-12);
    CHECK(rep.portfolio_trials == 50);
    CHECK(rep.bump_trials == 50);
}

TEST_CASE("riskless-only market is viable and prices constants") {
    StateSpace unit({0.0}, {1.0});
    Market m(unit, {PayoffExpr::constant(1.0)}, {1.0});
    Grid grid(unit, 9);
    auto res = build_extension(m, grid);
    REQUIRE(res.viable);
    CHECK((*res.extension)(PayoffExpr::constant(0.7)) == Catch::Approx(0.7).margin(1e-10));
}

TEST_CASE("arbitrage market is inviable with a certificate") {
    StateSpace unit({0.0}, {1.0});
    Market bad =
        Market::with_riskless(unit, {PayoffExpr::constant(1.0) + PayoffExpr::coord(0)}, {2.5});
    Grid grid(unit, 11);
    auto res = build_extension(bad, grid);
    REQUIRE_FALSE(res.viable);
    CHECK_FALSE(res.extension.has_value());
    REQUIRE(res.verdict.certificate.has_value());
    CHECK(res.verdict.certificate->witness_payoff >= 1e-6);
}

TEST_CASE("explicit bump hits the support") {
    Market m = call_market();
    Grid grid(m.space(), 17);
    auto res = build_extension(m, grid);
    REQUIRE(res.viable);
    // Tent of radius 0.1 around 0.5: some grid atom lies inside.
    auto bump = PayoffExpr::pos_part(
        PayoffExpr::constant(0.1) -
        PayoffExpr::abs_of(PayoffExpr::coord(0) - PayoffExpr::constant(0.5)));
    CHECK((*res.extension)(bump) > 0.0);
}
