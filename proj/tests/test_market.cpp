// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hedgebox/market.hpp"
#include "hedgebox/measure.hpp"

using namespace hedgebox;

namespace {

Market call_market() {
    StateSpace unit({0.0}, {1.0});
    auto s1 = PayoffExpr::constant(1.0) + PayoffExpr::coord(0);
    return Market::with_riskless(unit, {s1}, {1.5});
}

} // namespace

TEST_CASE("market enforces the riskless normalization") {
    StateSpace unit({0.0}, {1.0});
    auto s1 = PayoffExpr::coord(0);

    CHECK_NOTHROW(Market::with_riskless(unit, {s1}, {0.4}));
    CHECK_THROWS_AS(Market(unit, {PayoffExpr::constant(2.0), s1}, {1.0, 0.4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Market(unit, {PayoffExpr::constant(1.0), s1}, {0.9, 0.4}),
                    std::invalid_argument);
    CHECK_THROWS_AS(Market::with_riskless(unit, {s1}, {-0.1}), std::invalid_argument);
}

TEST_CASE("portfolio cost is the inner product with prices") {
    StateSpace unit({0.0}, {1.0});
    auto s1 = PayoffExpr::constant(1.0) + PayoffExpr::coord(0);
    auto s2 = PayoffExpr::pos_part(PayoffExpr::coord(0) - PayoffExpr::constant(0.5));
    Market m = Market::with_riskless(unit, {s1, s2}, {1.5, 0.25});

    CHECK(portfolio_cost(m, Portfolio({2.0, 0.0, 0.0})) == Catch::Approx(2.0));
    CHECK(portfolio_cost(m, Portfolio({-1.5, 1.0, 0.0})) == Catch::Approx(0.0));
    CHECK(portfolio_cost(m, Portfolio({0.0, 1.0, -2.0})) == Catch::Approx(1.0));
    CHECK_THROWS_AS(portfolio_cost(m, Portfolio({1.0})), std::invalid_argument);
}

TEST_CASE("portfolio payoff composes pointwise") {
    Market m = call_market();

    auto riskless = portfolio_payoff(m, Portfolio({1.0, 0.0}));
    CHECK(riskless.evaluate({0.37}) == Catch::Approx(1.0));

    auto coordlike = portfolio_payoff(m, Portfolio({-1.0, 1.0}));
    for (double w : {0.0, 0.25, 0.9})
        CHECK(coordlike.evaluate({w}) == Catch::Approx(w).margin(1e-15));

    auto zero = portfolio_payoff(m, Portfolio({0.0, 0.0}));
    CHECK(zero.evaluate({0.6}) == 0.0);
}

TEST_CASE("portfolio payoff is linear in the holdings") {
    Market m = call_market();
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int t = 0; t < 200; ++t) {
        Portfolio pi({u(rng), u(rng)}), psi({u(rng), u(rng)});
        const double a = u(rng), b = u(rng);
        Portfolio combo({a * pi[0] + b * psi[0], a * pi[1] + b * psi[1]});
        State w{0.5 * (1.0 + std::tanh(u(rng)))};
        const double lhs = portfolio_payoff(m, combo).evaluate(w);
        const double rhs = a * portfolio_payoff(m, pi).evaluate(w) +
                           b * portfolio_payoff(m, psi).evaluate(w);
        REQUIRE(lhs == Catch::Approx(rhs).margin(1e-12 * (1.0 + std::abs(rhs))));
    }
}

TEST_CASE("returns vanish in expectation exactly when moments match prices") {
    StateSpace unit({0.0}, {1.0});
    auto s1 = PayoffExpr::constant(1.0) + PayoffExpr::coord(0);
    Market m = Market::with_riskless(unit, {s1}, {1.5});

    auto rs = returns(m);
    REQUIRE(rs.size() == 1);
    for (double w : {0.0, 0.25, 1.0})
        CHECK(rs[0].evaluate({w}) == Catch::Approx(w - 0.5).margin(1e-15));

    Market flat = Market::with_riskless(unit, {PayoffExpr::constant(2.0)}, {2.0});
    auto rflat = returns(flat);
    CHECK(rflat[0].evaluate({0.3}) == Catch::Approx(0.0).margin(1e-15));

    Market lin = Market::with_riskless(unit, {PayoffExpr::coord(0)}, {0.4});
    CHECK(returns(lin)[0].evaluate({0.9}) == Catch::Approx(0.5).margin(1e-15));

    // Property: for random atomic probability measures, the worst return
    // moment equals the worst price-moment error.
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int t = 0; t < 100; ++t) {
        std::vector<Atom> atoms;
        double mass = 0.0;
        for (int i = 0; i < 5; ++i) {
            const double w = 0.05 + u01(rng);
            atoms.push_back({State{u01(rng)}, w});
            mass += w;
        }
        for (auto& a : atoms) a.weight /= mass;
        AtomicMeasure mu(atoms);
        const double ret_moment = std::abs(mu.integrate(rs[0]));
        const double price_gap = std::abs(mu.integrate(m.payoff(1)) - m.price(1));
        REQUIRE(ret_moment == Catch::Approx(price_gap).margin(1e-12));
    }
}

TEST_CASE("independent sub-basis keeps low indices and prices redundancy") {
    StateSpace unit({0.0}, {1.0});
    auto x = PayoffExpr::coord(0);
    Grid grid(unit, 9);

    SECTION("consistent collinear asset is flagged redundant") {
        Market m = Market::with_riskless(unit, {x, PayoffExpr::scale(2.0, x)}, {0.4, 0.8});
        auto r = independent_subbasis(m, grid);
        CHECK(r.basis == std::vector<std::size_t>{0, 1});
        REQUIRE(r.redundant.size() == 1);
        CHECK(r.redundant[0].index == 2);
        CHECK(r.redundant[0].price_consistent);
        CHECK(r.redundant[0].price_gap <= 1e-10);
    }

    SECTION("independent pair is kept whole") {
        Market m = Market::with_riskless(unit, {x}, {0.4});
        auto r = independent_subbasis(m, grid);
        CHECK(r.basis == std::vector<std::size_t>{0, 1});
        CHECK(r.redundant.empty());
    }

    SECTION("price-inconsistent redundancy reports the gap") {
        Market m = Market::with_riskless(unit, {x, PayoffExpr::scale(2.0, x)}, {0.4, 0.9});
        auto r = independent_subbasis(m, grid);
        REQUIRE(r.redundant.size() == 1);
        CHECK_FALSE(r.redundant[0].price_consistent);
        CHECK(r.redundant[0].price_gap == Catch::Approx(0.1).margin(1e-10));
    }
}
