// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "hedgebox/state_space.hpp"

using namespace hedgebox;

TEST_CASE("dense sequence starts at the midpoint and refines dyadically") {
    StateSpace unit({0.0}, {1.0});

    auto one = dense_sequence(unit, 1);
    REQUIRE(one.size() == 1);
    REQUIRE(one[0][0] == Catch::Approx(0.5).margin(0.0));

    auto three = dense_sequence(unit, 3);
    REQUIRE(three.size() == 3);
    CHECK(three[0][0] == Catch::Approx(0.5));
    CHECK(three[1][0] == Catch::Approx(0.25));
    CHECK(three[2][0] == Catch::Approx(0.75));
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = i + 1; j < 3; ++j)
            CHECK(max_metric(three[i], three[j]) >= 0.25);
}

TEST_CASE("dense sequence stays inside multi-dimensional boxes") {
    StateSpace square({0.0, 0.0}, {1.0, 1.0});
    auto pts = dense_sequence(square, 5);
    REQUIRE(pts.size() == 5);
    for (const auto& p : pts) CHECK(square.contains(p));
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            CHECK(max_metric(pts[i], pts[j]) > 0.0);
}

TEST_CASE("dense sequence is deterministic and exactly clipped") {
    StateSpace box({-1.5, 2.0}, {0.5, 7.0});
    auto a = dense_sequence(box, 64);
    auto b = dense_sequence(box, 64);
    REQUIRE(a == b); // bit-identical
    for (const auto& p : a) CHECK(box.contains(p));
    CHECK_THROWS_AS(dense_sequence(box, 0), std::invalid_argument);
}

TEST_CASE("fill distance of simple samples") {
    StateSpace unit({0.0}, {1.0});
    CHECK(fill_distance(unit, {State{0.0}, State{1.0}}) == Catch::Approx(0.5).margin(1e-3));
    CHECK(fill_distance(unit, {State{0.5}}) == Catch::Approx(0.5).margin(1e-3));

    StateSpace wide({0.0}, {2.0});
    Grid g21(wide, 21);
    CHECK(fill_distance(wide, g21.states()) == Catch::Approx(0.05).margin(1e-3));

    CHECK_THROWS_AS(fill_distance(unit, {}), std::invalid_argument);
}

TEST_CASE("fill distance matches brute force on random samples") {
    std::mt19937_64 rng(7);
    StateSpace box({0.0, -1.0}, {2.0, 1.0});
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::vector<State> pts;
    for (int i = 0; i < 37; ++i)
        pts.push_back({2.0 * u01(rng), -1.0 + 2.0 * u01(rng)});

    const Grid lattice = audit_grid(box, 41, 41 * 41);
    double brute = 0.0;
    for (std::size_t i = 0; i < lattice.size(); ++i) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) nearest = std::min(nearest, max_metric(lattice.point(i), p));
        brute = std::max(brute, nearest);
    }
    CHECK(fill_distance(box, pts, 41, 41 * 41) == Catch::Approx(brute).margin(1e-14));
}

TEST_CASE("fill distance of the dense sequence is nonincreasing and vanishes") {
    StateSpace unit({0.0}, {1.0});
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n = 1; n <= 1024; n *= 2) {
        const double fd = fill_distance(unit, dense_sequence(unit, n));
        CHECK(fd <= prev + 1e-15);
        prev = fd;
    }
    CHECK(prev <= 1.0 / 1024.0 + 1e-3);
}

TEST_CASE("grids enumerate row-major with exact endpoints") {
    StateSpace box({0.0, 10.0}, {1.0, 20.0});
    Grid g(box, {3, 2});
    REQUIRE(g.size() == 6);
    // dimension 0 slowest
    CHECK(g.point(0) == State{0.0, 10.0});
    CHECK(g.point(1) == State{0.0, 20.0});
    CHECK(g.point(2) == State{0.5, 10.0});
    CHECK(g.point(5) == State{1.0, 20.0});
    CHECK_THROWS_AS(Grid(box, {1, 2}), std::invalid_argument);
}

TEST_CASE("refine_around stays within the ball and the box") {
    StateSpace unit({0.0}, {1.0});
    Grid g3(unit, 3);

    for (const auto& p : refine_around(g3, {0.5}, 0.25)) {
        CHECK(p[0] >= 0.25);
        CHECK(p[0] <= 0.75);
    }

    Grid g2(unit, 2);
    auto clipped = refine_around(g2, {0.0}, 0.1);
    REQUIRE_FALSE(clipped.empty());
    for (const auto& p : clipped) {
        CHECK(p[0] >= 0.0);
        CHECK(p[0] <= 0.1);
    }

    StateSpace square({0.0, 0.0}, {1.0, 1.0});
    Grid gs(square, 3);
    State center{0.5, 0.5};
    auto ball = refine_around(gs, center, 0.25);
    REQUIRE(ball.size() > 1);
    for (const auto& p : ball) CHECK(max_metric(p, center) <= 0.25 + 1e-12);
}

TEST_CASE("box vertices enumerate all corners") {
    StateSpace square({0.0, -1.0}, {1.0, 1.0});
    auto vs = square.vertices();
    REQUIRE(vs.size() == 4);
    for (const auto& v : vs) CHECK(square.contains(v));
}
