// SPDX-License-Identifier: Apache-2.0
//
// Arbitrage detection with verifiable certificates, both directions: either
// a portfolio with zero cost, nonnegative audited payoff, and a strictly
// positive witness, or a martingale measure with strictly positive weight on
// every grid atom. The decision is a finite moment LP on the grid; its
// Farkas certificate, when infeasible, is exactly the arbitrage portfolio.

#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "hedgebox/market.hpp"
#include "hedgebox/measure.hpp"
#include "hedgebox/options.hpp"

namespace hedgebox {

struct ArbitrageCertificate {
    Portfolio portfolio;
    double cost = 0.0;                // pi . f, held at zero by construction
    State witness;                    // grid atom with maximal payoff
    double witness_payoff = 0.0;      // >= strict_tol
    double lattice_min_payoff = 0.0;  // >= -feas_tol over the audit lattice
};

/// Thrown by consumers that require an arbitrage-free market.
class arbitrage_detected : public std::runtime_error {
public:
    explicit arbitrage_detected(ArbitrageCertificate cert)
        : std::runtime_error("market admits an arbitrage"), certificate(std::move(cert)) {}
    ArbitrageCertificate certificate;
};

enum class FtapStatus { ArbitrageFree, Arbitrage, NeedsRefinement };

struct FtapVerdict {
    FtapStatus status = FtapStatus::NeedsRefinement;
    std::optional<AtomicMeasure> measure;            // ArbitrageFree branch
    bool fully_supported = false;                    // every grid atom above the floor
    std::vector<State> zero_weight_states;           // forced-null grid regions, if any
    std::optional<ArbitrageCertificate> certificate; // Arbitrage branch
    std::optional<State> refinement_state;           // offending state on NeedsRefinement
    std::vector<std::size_t> grid_resolution;
    double grid_fill_distance = 0.0;
};

struct MeasureReport {
    double mass_error = 0.0;
    std::vector<double> moment_errors; // one per risky asset
    double max_moment_error = 0.0;
    double min_weight = 0.0;
    double fill_distance = 0.0;
    bool atoms_in_box = true;
};

/// The canonical full-support reference measure: weight 2^-i on the i-th
/// dense-sequence state, renormalized to mass one.
inline AtomicMeasure reference_measure(const StateSpace& space, std::size_t n) {
    if (n < 1) throw std::invalid_argument("reference_measure: n must be >= 1");
    if (n > 1000) throw std::invalid_argument("reference_measure: weights underflow beyond n=1000");
    const auto states = dense_sequence(space, n);
    const double norm = 1.0 - std::ldexp(1.0, -int(n));
    std::vector<Atom> atoms;
    atoms.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        atoms.push_back({states[i], std::ldexp(1.0, -int(i) - 1) / norm});
    return AtomicMeasure(std::move(atoms));
}

/// Tilt a probability measure by the density 1/(1+M) with M the running
/// maximum of the risky payoffs, then renormalize; weights stay positive and
/// large payoffs are damped.
inline AtomicMeasure integrability_reweight(const AtomicMeasure& mu, const Market& m) {
    if (!mu.is_probability(1e-9))
        throw std::invalid_argument("integrability_reweight: expects a probability measure");
    std::vector<Atom> atoms = mu.atoms();
    for (auto& a : atoms) {
        double peak = 0.0;
        for (std::size_t d = 1; d < m.num_assets(); ++d)
            peak = std::max(peak, m.payoff(d).evaluate(a.state));
        a.weight /= 1.0 + std::max(peak, 0.0);
    }
    return AtomicMeasure(std::move(atoms)).normalized();
}

/// Mass, per-asset moment errors, minimum weight, and the fill distance of
/// the support: the full diagnostic for a candidate martingale measure.
inline MeasureReport verify_measure(const Market& m, const AtomicMeasure& mu,
                                    const SolverOptions& opt = {}) {
    MeasureReport rep;
    rep.mass_error = std::abs(mu.mass() - 1.0);
    rep.min_weight = mu.min_weight();
    for (std::size_t d = 1; d < m.num_assets(); ++d) {
        const double err = std::abs(mu.integrate(m.payoff(d)) - m.price(d));
        rep.moment_errors.push_back(err);
        rep.max_moment_error = std::max(rep.max_moment_error, err);
    }
    for (const auto& a : mu.atoms())
        if (!m.space().contains(a.state)) rep.atoms_in_box = false;
    if (!mu.empty())
        rep.fill_distance =
            fill_distance(m.space(), mu.support(), opt.audit_per_dim, opt.audit_total_cap);
    return rep;
}

namespace detail {

// Moment LP on the grid with a per-atom lower bound: weights w >= floor with
// sum w = 1 and sum w S_d = f_d. Variables are the shifted weights.
inline LpProblem moment_lp(const std::vector<std::vector<double>>& payoff_samples,
                           const std::vector<double>& prices, std::size_t n_atoms,
                           double floor_per_atom, std::vector<double> objective) {
    LpProblem lp(n_atoms, std::move(objective),
                 std::vector<VarKind>(n_atoms, VarKind::NonNegative));
    std::vector<double> ones(n_atoms, 1.0);
    lp.add_equality(ones, 1.0 - floor_per_atom * double(n_atoms));
    for (std::size_t d = 1; d < prices.size(); ++d) {
        double shift = 0.0;
        for (std::size_t j = 0; j < n_atoms; ++j) shift += payoff_samples[d][j];
        lp.add_equality(payoff_samples[d], prices[d] - floor_per_atom * shift);
    }
    return lp;
}

inline std::vector<double> weights_from(const LpSolution& sol, double floor_per_atom) {
    std::vector<double> w = sol.x;
    for (double& v : w) v = std::max(v, 0.0) + floor_per_atom;
    return w;
}

} // namespace detail

/// Decide arbitrage on the grid. Returns the measure branch (full grid
/// support when the floored moment LP is feasible, otherwise the maximal
/// support with the forced-null atoms annotated), the arbitrage branch built
/// from the Farkas certificate of the moment system, or NeedsRefinement when
/// the grid is too coarse for either certificate to verify.
inline FtapVerdict check_arbitrage(const Market& m, const Grid& grid,
                                   const SolverOptions& opt = {}) {
    if (!(grid.space() == m.space()))
        throw std::invalid_argument("check_arbitrage: grid/market space mismatch");
    const std::size_t n = grid.size();
    const std::size_t assets = m.num_assets();

    FtapVerdict verdict;
    verdict.grid_resolution = grid.resolution();

    std::vector<State> atoms(n);
    for (std::size_t j = 0; j < n; ++j) atoms[j] = grid.point(j);
    verdict.grid_fill_distance =
        fill_distance(m.space(), atoms, opt.audit_per_dim, opt.audit_total_cap);

    std::vector<std::vector<double>> samples(assets, std::vector<double>(n));
    for (std::size_t d = 0; d < assets; ++d)
        for (std::size_t j = 0; j < n; ++j) samples[d][j] = m.payoff(d).evaluate(atoms[j]);

    auto build_measure = [&](const std::vector<double>& w) {
        std::vector<Atom> list;
        list.reserve(n);
        for (std::size_t j = 0; j < n; ++j)
            if (w[j] > 0.0) list.push_back({atoms[j], w[j]});
        return AtomicMeasure(std::move(list));
    };
    auto moments_ok = [&](const std::vector<double>& w) {
        double mass = 0.0;
        for (std::size_t j = 0; j < n; ++j) mass += w[j];
        if (std::abs(mass - 1.0) > opt.feas_tol) return false;
        for (std::size_t d = 1; d < assets; ++d) {
            double mom = 0.0;
            for (std::size_t j = 0; j < n; ++j) mom += w[j] * samples[d][j];
            if (std::abs(mom - m.price(d)) > opt.feas_tol) return false;
        }
        return true;
    };

    const double floor_per_atom = opt.eps_pos / double(n);
    const std::vector<double> zeros(n, 0.0);

    LpSolution floored = solve_lp(detail::moment_lp(samples, m.prices(), n, floor_per_atom, zeros),
                                  opt.lp);
    if (floored.status == LpStatus::Optimal) {
        const auto w = detail::weights_from(floored, floor_per_atom);
        if (moments_ok(w)) {
            verdict.status = FtapStatus::ArbitrageFree;
            verdict.measure = build_measure(w);
            verdict.fully_supported = true;
            return verdict;
        }
        verdict.status = FtapStatus::NeedsRefinement;
        return verdict;
    }
    if (floored.status != LpStatus::Infeasible) {
        verdict.status = FtapStatus::NeedsRefinement;
        return verdict;
    }

    // The floor may be the only obstruction; retry without it and keep
    // enlarging the support until the forced-null set stabilizes.
    LpSolution plain = solve_lp(detail::moment_lp(samples, m.prices(), n, 0.0, zeros), opt.lp);
    if (plain.status == LpStatus::Optimal) {
        std::vector<std::vector<double>> support_solutions{detail::weights_from(plain, 0.0)};
        std::vector<bool> null_atom(n, false);
        for (std::size_t j = 0; j < n; ++j) null_atom[j] = support_solutions[0][j] <= 1e-12;
        for (int round = 0; round < 64; ++round) {
            std::vector<double> obj(n, 0.0);
            bool any = false;
            for (std::size_t j = 0; j < n; ++j)
                if (null_atom[j]) {
                    obj[j] = -1.0; // maximize mass on the current null set
                    any = true;
                }
            if (!any) break;
            LpSolution push =
                solve_lp(detail::moment_lp(samples, m.prices(), n, 0.0, obj), opt.lp);
            if (push.status != LpStatus::Optimal || -push.value <= 1e-12) break;
            const auto w = detail::weights_from(push, 0.0);
            bool shrunk = false;
            for (std::size_t j = 0; j < n; ++j)
                if (null_atom[j] && w[j] > 1e-12) {
                    null_atom[j] = false;
                    shrunk = true;
                }
            if (!shrunk) break;
            support_solutions.push_back(w);
        }
        std::vector<double> avg(n, 0.0);
        for (const auto& w : support_solutions)
            for (std::size_t j = 0; j < n; ++j) avg[j] += w[j] / double(support_solutions.size());
        if (moments_ok(avg)) {
            verdict.status = FtapStatus::ArbitrageFree;
            verdict.measure = build_measure(avg);
            verdict.fully_supported = false;
            for (std::size_t j = 0; j < n; ++j)
                if (null_atom[j]) verdict.zero_weight_states.push_back(atoms[j]);
            return verdict;
        }
        verdict.status = FtapStatus::NeedsRefinement;
        return verdict;
    }
    if (plain.status != LpStatus::Infeasible) {
        verdict.status = FtapStatus::NeedsRefinement;
        return verdict;
    }

    // Farkas multipliers of the unfloored moment system: the mass-row
    // multiplier prices the riskless asset, the moment-row multipliers the
    // risky ones. Negating gives a portfolio with nonnegative grid payoff
    // and strictly negative cost; shifting the riskless slot zeroes the cost.
    const std::vector<double>& y = plain.farkas_eq;
    Portfolio pi(std::vector<double>(assets, 0.0));
    pi[0] = -y[0];
    for (std::size_t d = 1; d < assets; ++d) pi[d] = -y[d];
    pi[0] -= portfolio_cost(m, pi);

    double grid_max = -std::numeric_limits<double>::infinity();
    std::size_t witness_idx = 0;
    for (std::size_t j = 0; j < n; ++j) {
        double v = 0.0;
        for (std::size_t d = 0; d < assets; ++d) v += pi[d] * samples[d][j];
        if (v > grid_max) {
            grid_max = v;
            witness_idx = j;
        }
    }
    if (!(grid_max > 0.0)) {
        verdict.status = FtapStatus::NeedsRefinement;
        return verdict;
    }
    double norm_inf = 0.0;
    for (std::size_t d = 0; d < assets; ++d) norm_inf = std::max(norm_inf, std::abs(pi[d]));
    const double lambda = std::min(1.0 / grid_max, opt.guard_bound / std::max(norm_inf, 1e-300));
    for (std::size_t d = 0; d < assets; ++d) pi[d] *= lambda;

    ArbitrageCertificate cert;
    cert.portfolio = pi;
    cert.cost = portfolio_cost(m, pi);
    cert.witness = atoms[witness_idx];
    const PayoffExpr payoff = portfolio_payoff(m, pi);
    cert.witness_payoff = payoff.evaluate(cert.witness);
    const Grid audit = audit_grid(m.space(), opt.audit_per_dim, opt.audit_total_cap);
    const GridMin lattice_min = grid_min(payoff, audit);
    cert.lattice_min_payoff = lattice_min.value;

    if (cert.cost > opt.feas_tol || cert.lattice_min_payoff < -opt.feas_tol ||
        cert.witness_payoff < opt.strict_tol) {
        verdict.status = FtapStatus::NeedsRefinement;
        verdict.refinement_state = lattice_min.state;
        return verdict;
    }
    verdict.status = FtapStatus::Arbitrage;
    verdict.certificate = std::move(cert);
    return verdict;
}

} // namespace hedgebox
