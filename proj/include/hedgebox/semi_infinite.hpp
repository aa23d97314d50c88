// SPDX-License-Identifier: Apache-2.0
//
// Semi-infinite linear programming by exchange: finitely many variables, one
// inequality row per state of a compact box. Each round solves the LP
// restricted to the rows found so far, asks the separation oracle (a grid
// scan of the violation expression plus local polish) for the most violated
// state, and adds that row until no violation beyond tolerance remains.
//
// Row order inside the restricted LP is the contract: state rows first, in
// discovery order, then the 2n guard rows; dual multipliers line up with
// `row_states`, which is how the dual measure is read off.

#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "hedgebox/measure.hpp"
#include "hedgebox/options.hpp"
#include "hedgebox/payoff.hpp"
#include "hedgebox/state_space.hpp"

namespace hedgebox {

struct SemiInfiniteProblem {
    std::size_t num_vars;
    std::vector<double> objective; // minimize objective . x, x free
    StateSpace space;
    Grid scan_grid;
    /// Row generator: state -> (a, b) meaning a . x >= b.
    std::function<std::pair<std::vector<double>, double>(const State&)> row;
    /// Violation expression for a candidate x: its value at a state equals
    /// a(state) . x - b(state); the oracle minimizes it.
    std::function<PayoffExpr(const std::vector<double>&)> violation;

    SemiInfiniteProblem(std::size_t n, std::vector<double> c, StateSpace sp, Grid scan)
        : num_vars(n), objective(std::move(c)), space(std::move(sp)), scan_grid(std::move(scan)) {}
};

enum class SipStatus { Converged, NotConverged };

struct SipIterationRecord {
    std::size_t cut = 0;
    double value = 0.0;
    double violation = 0.0;
    State added;
};

struct SipResult {
    SipStatus status = SipStatus::NotConverged;
    LpSolution lp;
    double value = 0.0;
    std::vector<State> row_states;  // aligned with lp.dual_ineq[0 .. row_states)
    std::vector<State> active_states;
    double certified_violation = 0.0; // min of the violation over the audit lattice
    State worst_state;
    std::size_t cuts = 0;
    bool guard_active = false;
    std::vector<SipIterationRecord> trace;
};

namespace detail {

inline GridMin polished_min(const PayoffExpr& expr, const Grid& scan, const SolverOptions& opt) {
    GridMin best = grid_min(expr, scan);
    const std::size_t k = scan.space().dimension();
    std::vector<double> spacing(k);
    for (std::size_t i = 0; i < k; ++i) spacing[i] = scan.spacing(i);
    for (int round = 0; round < opt.polish_rounds; ++round) {
        double radius = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            spacing[i] /= 2.0;
            radius = std::max(radius, 2.0 * spacing[i]);
        }
        const auto local = local_lattice(scan.space(), best.state, radius, spacing);
        const GridMin cand = min_over(expr, local);
        if (cand.value < best.value) {
            best.value = cand.value;
            best.state = cand.state;
        }
    }
    return best;
}

} // namespace detail

/// Run the exchange loop. Throws std::logic_error if a restricted LP is
/// infeasible or unbounded: the guard box rules both out for well-posed
/// hedging problems.
inline SipResult solve_semi_infinite(const SemiInfiniteProblem& sip, const SolverOptions& opt = {}) {
    if (sip.num_vars == 0 || sip.objective.size() != sip.num_vars)
        throw std::invalid_argument("solve_semi_infinite: bad problem dimensions");
    const std::size_t n = sip.num_vars;
    const std::size_t k = sip.space.dimension();

    SipResult res;

    // Seed rows: every box vertex plus the first 2k+1 dense-sequence states.
    for (auto& v : sip.space.vertices()) res.row_states.push_back(std::move(v));
    for (auto& q : dense_sequence(sip.space, 2 * k + 1)) {
        bool dup = false;
        for (const auto& s : res.row_states)
            if (max_metric(s, q) < 1e-14) dup = true;
        if (!dup) res.row_states.push_back(std::move(q));
    }

    const std::vector<VarKind> kinds(n, VarKind::Free);
    std::optional<LpSolution> best;

    for (std::size_t iter = 0; iter < opt.max_cuts; ++iter) {
        LpProblem lp(n, sip.objective, kinds);
        for (const auto& s : res.row_states) {
            auto [a, b] = sip.row(s);
            lp.add_inequality(std::move(a), b);
        }
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> lo(n, 0.0), hi(n, 0.0);
            lo[j] = 1.0;
            hi[j] = -1.0;
            lp.add_inequality(std::move(lo), -opt.guard_bound);
            lp.add_inequality(std::move(hi), -opt.guard_bound);
        }
        LpSolution sol = solve_lp(lp, opt.lp);
        if (sol.status == LpStatus::Infeasible || sol.status == LpStatus::Unbounded)
            throw std::logic_error("solve_semi_infinite: restricted LP lost the guard box");
        if (sol.status == LpStatus::Stalled) {
            res.status = SipStatus::NotConverged;
            if (best) res.lp = *best;
            res.cuts = iter;
            return res;
        }
        best = sol;
        res.cuts = iter + 1;

        const PayoffExpr viol = sip.violation(sol.x);
        const GridMin worst = detail::polished_min(viol, sip.scan_grid, opt);
        res.trace.push_back({iter, sol.value, worst.value, worst.state});

        if (worst.value >= -opt.feas_tol) {
            res.status = SipStatus::Converged;
            break;
        }
        bool dup = false;
        for (const auto& s : res.row_states)
            if (max_metric(s, worst.state) < 1e-14) dup = true;
        if (dup) {
            // The most violated state is already a row; no progress possible.
            res.status = SipStatus::NotConverged;
            break;
        }
        res.row_states.push_back(worst.state);
    }

    res.lp = *best;
    res.value = res.lp.value;

    // Guard activity: a nonzero multiplier on a guard row breaks the dual
    // reading, so it demotes the status.
    const std::size_t guard_begin = res.row_states.size();
    for (std::size_t g = guard_begin; g < res.lp.dual_ineq.size(); ++g) {
        if (std::abs(res.lp.dual_ineq[g]) > opt.cs_tol) {
            res.guard_active = true;
            res.status = SipStatus::NotConverged;
        }
    }
    for (double xj : res.lp.x)
        if (std::abs(std::abs(xj) - opt.guard_bound) <= opt.feas_tol) res.guard_active = true;

    // Certify the final iterate against the audit lattice.
    const PayoffExpr final_viol = sip.violation(res.lp.x);
    const Grid audit = audit_grid(sip.space, opt.audit_per_dim, opt.audit_total_cap);
    const GridMin certified = grid_min(final_viol, audit);
    res.certified_violation = certified.value;
    res.worst_state = certified.state;
    if (certified.value < -opt.feas_tol) res.status = SipStatus::NotConverged;

    for (std::size_t i = 0; i < res.row_states.size() && i < res.lp.dual_ineq.size(); ++i)
        if (res.lp.dual_ineq[i] > 1e-12) res.active_states.push_back(res.row_states[i]);
    return res;
}

/// Read the dual multipliers on the state rows as an atomic measure. For a
/// market with the riskless normalization the mass lands at 1 via the dual
/// stationarity of the riskless column.
inline AtomicMeasure extract_dual_measure(const LpSolution& sol,
                                          const std::vector<State>& row_states,
                                          double cs_tol = 1e-8) {
    if (sol.status != LpStatus::Optimal)
        throw std::invalid_argument("extract_dual_measure: needs an optimal LP solution");
    if (row_states.size() > sol.dual_ineq.size())
        throw std::invalid_argument("extract_dual_measure: more states than dual rows");
    std::vector<Atom> atoms;
    for (std::size_t i = 0; i < row_states.size(); ++i) {
        const double w = sol.dual_ineq[i];
        if (w < -cs_tol)
            throw std::logic_error("extract_dual_measure: negative multiplier beyond tolerance");
        if (w > 1e-12) atoms.push_back({row_states[i], w});
    }
    return AtomicMeasure(std::move(atoms));
}

} // namespace hedgebox
