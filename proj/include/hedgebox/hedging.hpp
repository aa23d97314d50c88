// SPDX-License-Identifier: Apache-2.0
//
// Superhedging, subhedging, no-arbitrage price intervals, and the numerical
// strong-duality report: the cheapest dominating portfolio and the dual
// martingale measure price the claim to the same number, and the price
// interval they bound contains every no-arbitrage price.

#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>

#include "hedgebox/ftap.hpp"
#include "hedgebox/semi_infinite.hpp"

namespace hedgebox {

enum class HedgeSide { Super, Sub };

struct HedgeResult {
    HedgeSide side = HedgeSide::Super;
    SipStatus status = SipStatus::NotConverged;
    Portfolio portfolio;
    double price = 0.0; // portfolio . prices
    AtomicMeasure dual_measure;
    MeasureReport dual_report;
    double duality_gap = 0.0;          // |price - int H d(dual measure)|
    double certified_violation = 0.0;  // min hedge slack over the audit lattice
    std::size_t iterations = 0;
    bool guard_active = false;
    std::vector<SipIterationRecord> trace;
};

struct PriceInterval {
    double lower = 0.0; // most expensive subhedge
    double upper = 0.0; // cheapest superhedge
    bool replicable = false;
};

enum class PriceVerdictKind { NoArbitragePrice, ArbitragePrice, BoundaryInconclusive };

struct PriceVerdict {
    PriceVerdictKind kind = PriceVerdictKind::BoundaryInconclusive;
    PriceInterval interval;
    std::optional<FtapVerdict> extended; // evidence from the extended market
};

namespace detail {

inline std::string cache_key(const Market& m, const SolverOptions& opt) {
    std::ostringstream os;
    os.precision(17);
    os << m.signature() << "|g" << opt.grid_per_dim << "|f" << opt.feas_tol << "|e"
       << opt.eps_pos;
    return os.str();
}

} // namespace detail

/// check_arbitrage memoized on the market fingerprint; pricing many claims
/// against one market re-runs the precondition only once.
inline FtapVerdict cached_arbitrage_check(const Market& m, const SolverOptions& opt = {}) {
    static std::mutex mu;
    static std::map<std::string, FtapVerdict> cache;
    const std::string key = detail::cache_key(m, opt);
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    FtapVerdict v = check_arbitrage(m, Grid(m.space(), opt.grid_per_dim), opt);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, v);
    return v;
}

namespace detail {

inline void require_arbitrage_free(const Market& m, const SolverOptions& opt) {
    const FtapVerdict v = cached_arbitrage_check(m, opt);
    if (v.status == FtapStatus::Arbitrage) throw arbitrage_detected(*v.certificate);
    if (v.status == FtapStatus::NeedsRefinement)
        throw std::runtime_error("hedging: arbitrage check needs a finer grid");
}

inline HedgeResult run_hedge(const Market& m, const Claim& claim, HedgeSide side,
                             const SolverOptions& opt) {
    if (!(claim.space() == m.space()))
        throw std::invalid_argument("hedging: claim and market state spaces differ");
    require_arbitrage_free(m, opt);

    const std::size_t assets = m.num_assets();
    const double sign = side == HedgeSide::Super ? 1.0 : -1.0;

    std::vector<double> objective(assets);
    for (std::size_t d = 0; d < assets; ++d) objective[d] = sign * m.price(d);
    SemiInfiniteProblem sp(assets, std::move(objective), m.space(),
                           Grid(m.space(), opt.grid_per_dim));
    sp.row =[&m, &claim, sign, assets](const State& s) {
        std::vector<double> a(assets);
        for (std::size_t d = 0; d < assets; ++d) a[d] = sign * m.payoff(d).evaluate(s);
        return std::make_pair(std::move(a), sign * claim(s));
    };
    sp.violation = [&m, &claim, sign, assets](const std::vector<double>& x) {
        Portfolio pi{x};
        PayoffExpr hedge = portfolio_payoff(m, pi);
        return sign > 0 ? hedge - claim.expr() : claim.expr() - hedge;
    };

    const SipResult sip = solve_semi_infinite(sp, opt);

    HedgeResult out;
    out.side = side;
    out.status = sip.status;
    out.portfolio = Portfolio{sip.lp.x};
    out.price = portfolio_cost(m, out.portfolio);
    out.certified_violation = sip.certified_violation;
    out.iterations = sip.cuts;
    out.guard_active = sip.guard_active;
    out.trace = sip.trace;
    if (sip.lp.status == LpStatus::Optimal) {
        out.dual_measure = extract_dual_measure(sip.lp, sip.row_states, opt.cs_tol);
        out.dual_report = verify_measure(m, out.dual_measure, opt);
        out.duality_gap = std::abs(out.price - out.dual_measure.integrate(claim.expr()));
    }
    return out;
}

} // namespace detail

/// Cheapest portfolio dominating the claim in every state.
inline HedgeResult superhedge(const Market& m, const Claim& claim, const SolverOptions& opt = {}) {
    return detail::run_hedge(m, claim, HedgeSide::Super, opt);
}

/// Most expensive portfolio dominated by the claim in every state.
inline HedgeResult subhedge(const Market& m, const Claim& claim, const SolverOptions& opt = {}) {
    return detail::run_hedge(m, claim, HedgeSide::Sub, opt);
}

/// [subhedge value, superhedge value]; the endpoints bound every
/// no-arbitrage price and collapse exactly for replicable claims.
inline PriceInterval price_interval(const Market& m, const Claim& claim,
                                    const SolverOptions& opt = {}) {
    const HedgeResult lo = subhedge(m, claim, opt);
    const HedgeResult hi = superhedge(m, claim, opt);
    PriceInterval out;
    out.lower = lo.price;
    out.upper = hi.price;
    const double scale = std::max(std::abs(out.lower), std::abs(out.upper));
    out.replicable = std::abs(out.upper - out.lower) <= 10.0 * opt.gap_tol(scale);
    return out;
}

/// Decide whether h is a no-arbitrage price for the claim: run the arbitrage
/// check on the market extended by (H, h) and cross-check against the strict
/// interior of the price interval; near the endpoints the question is below
/// grid resolution and comes back BoundaryInconclusive.
inline PriceVerdict is_no_arbitrage_price(const Market& m, const Claim& claim, double h,
                                          const SolverOptions& opt = {}) {
    PriceVerdict out;
    out.interval = price_interval(m, claim, opt);
    const double scale =
        std::max({std::abs(out.interval.lower), std::abs(out.interval.upper), std::abs(h)});
    const double margin = 100.0 * opt.gap_tol(scale);

    if (std::abs(h - out.interval.lower) <= margin ||
        std::abs(h - out.interval.upper) <= margin) {
        out.kind = PriceVerdictKind::BoundaryInconclusive;
        return out;
    }
    if (h < 0.0) {
        // A nonnegative claim bought at a negative price pays for itself.
        out.kind = PriceVerdictKind::ArbitragePrice;
        return out;
    }

    const FtapVerdict ext =
        check_arbitrage(m.extended(claim.expr(), h), Grid(m.space(), opt.grid_per_dim), opt);
    out.extended = ext;
    const bool inside = h > out.interval.lower + margin && h < out.interval.upper - margin;
    const bool outside = h < out.interval.lower - margin || h > out.interval.upper + margin;
    if (ext.status == FtapStatus::ArbitrageFree && !outside)
        out.kind = PriceVerdictKind::NoArbitragePrice;
    else if (ext.status == FtapStatus::Arbitrage && !inside)
        out.kind = PriceVerdictKind::ArbitragePrice;
    else
        out.kind = PriceVerdictKind::BoundaryInconclusive;
    return out;
}

} // namespace hedgebox
