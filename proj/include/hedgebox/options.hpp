// SPDX-License-Identifier: Apache-2.0
//
// One knob surface shared by the arbitrage check, the hedging solvers, the
// viability extension, and the CLI.

#pragma once

#include <cmath>
#include <cstddef>

#include "hedgebox/lp.hpp"

namespace hedgebox {

struct SolverOptions {
    std::size_t grid_per_dim = 33;       // default scan / moment grid resolution
    double feas_tol = 1e-8;              // absolute constraint-violation tolerance
    double cs_tol = 1e-8;                // complementary-slackness tolerance
    double strict_tol = 1e-6;            // strict-positivity threshold for witnesses
    double eps_pos = 1e-9;               // total strict-positivity floor, spread over atoms
    std::size_t max_cuts = 500;          // cutting-plane iteration cap
    int polish_rounds = 3;               // local halving rounds after each grid scan
    double guard_bound = 1e6;            // |portfolio|_inf guard box
    std::size_t audit_per_dim = 2001;    // certificate audit lattice resolution
    std::size_t audit_total_cap = 100'000;
    std::size_t claim_audit_states = 10'000;
    LpOptions lp;

    double gap_tol(double value) const { return 1e-8 * (1.0 + std::abs(value)); }
};

} // namespace hedgebox
