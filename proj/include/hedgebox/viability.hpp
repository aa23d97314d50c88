// SPDX-License-Identifier: Apache-2.0
//
// The economic side of no arbitrage: the price functional on the marketed
// subspace and its strictly positive extension built from a full-support
// martingale measure. A market admitting such an extension is viable.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <random>

#include "hedgebox/ftap.hpp"
#include "hedgebox/market.hpp"

namespace hedgebox {

struct MarketedFit {
    bool marketed = false;
    Portfolio coefficients; // replicating portfolio when marketed
    double residual = 0.0;  // grid least-squares residual
};

/// Least-squares fit of a payoff onto the asset span sampled on the grid;
/// marketed when the residual is negligible against the sample norm.
inline MarketedFit marketed_coordinates(const Market& m, const PayoffExpr& payoff,
                                        const Grid& grid, double rtol = 1e-8) {
    if (grid.size() <= m.num_assets())
        throw std::invalid_argument("marketed_coordinates: grid needs more points than assets");
    const std::size_t n = grid.size();
    const std::size_t assets = m.num_assets();
    Eigen::MatrixXd P(n, assets);
    Eigen::VectorXd target(n);
    for (std::size_t j = 0; j < n; ++j) {
        const State s = grid.point(j);
        for (std::size_t d = 0; d < assets; ++d) P(long(j), long(d)) = m.payoff(d).evaluate(s);
        target(long(j)) = payoff.evaluate(s);
    }
    Eigen::VectorXd coef = P.colPivHouseholderQr().solve(target);
    MarketedFit fit;
    fit.residual = (P * coef - target).norm();
    fit.marketed = fit.residual <= rtol * std::max(target.norm(), 1.0);
    if (fit.marketed) fit.coefficients = Portfolio{std::vector<double>(coef.data(), coef.data() + coef.size())};
    return fit;
}

/// The price functional phi on the marketed subspace: phi(pi . S) = pi . f.
/// Well-defined under no arbitrage; the consistency gap quantifies how far
/// redundant assets deviate from their replication price.
class PriceFunctional {
public:
    explicit PriceFunctional(Market m) : market_(std::move(m)) {}

    const Market& market() const { return market_; }

    double operator()(const Portfolio& pi) const { return portfolio_cost(market_, pi); }

    struct Valuation {
        bool marketed = false;
        double value = 0.0;
        double residual = 0.0;
    };

    Valuation value_of(const PayoffExpr& payoff, const Grid& grid) const {
        const MarketedFit fit = marketed_coordinates(market_, payoff, grid);
        Valuation v;
        v.marketed = fit.marketed;
        v.residual = fit.residual;
        if (fit.marketed) v.value = portfolio_cost(market_, fit.coefficients);
        return v;
    }

    double consistency_gap(const Grid& grid) const {
        double gap = 0.0;
        for (const auto& r : independent_subbasis(market_, grid).redundant)
            gap = std::max(gap, r.price_gap);
        return gap;
    }

private:
    Market market_;
};

/// The extension Phi(X) = int X dmu for a fixed measure; linear in X and
/// strictly positive on payoffs that are nonnegative with mass on an atom.
class ExtensionFunctional {
public:
    explicit ExtensionFunctional(AtomicMeasure mu) : mu_(std::move(mu)) {}

    double operator()(const PayoffExpr& payoff) const { return mu_.integrate(payoff); }

    const AtomicMeasure& measure() const { return mu_; }

private:
    AtomicMeasure mu_;
};

struct ViabilityResult {
    bool viable = false;
    std::optional<ExtensionFunctional> extension; // viable branch
    FtapVerdict verdict;                          // underlying evidence either way
};

/// Build the strictly positive extension of the price functional from the
/// arbitrage check's martingale measure; an arbitrage branch means the
/// market is not viable and the certificate is the proof.
inline ViabilityResult build_extension(const Market& m, const Grid& grid,
                                       const SolverOptions& opt = {}) {
    ViabilityResult out;
    out.verdict = check_arbitrage(m, grid, opt);
    if (out.verdict.status == FtapStatus::ArbitrageFree) {
        out.viable = true;
        out.extension = ExtensionFunctional(*out.verdict.measure);
    }
    return out;
}

struct ExtensionReport {
    double max_marketed_deviation = 0.0; // worst |Phi(pi.S) - pi.f|
    double min_bump_value = std::numeric_limits<double>::infinity();
    double max_linearity_deviation = 0.0;
    std::size_t portfolio_trials = 0;
    std::size_t bump_trials = 0;
};

/// Spot-check the extension: agreement with the price functional on random
/// portfolios, strict positivity on random cell bumps centred at support
/// atoms, and linearity.
inline ExtensionReport verify_extension(const ExtensionFunctional& ext, const Market& m,
                                        std::size_t trials = 50,
                                        std::uint64_t seed = 0x5eedu) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t assets = m.num_assets();
    ExtensionReport rep;

    for (std::size_t t = 0; t < trials; ++t) {
        Portfolio pi{std::vector<double>(assets)};
        for (std::size_t d = 0; d < assets; ++d) pi[d] = u(rng);
        const double dev = std::abs(ext(portfolio_payoff(m, pi)) - portfolio_cost(m, pi));
        rep.max_marketed_deviation = std::max(rep.max_marketed_deviation, dev);
        ++rep.portfolio_trials;
    }

    const auto& atoms = ext.measure().atoms();
    if (!atoms.empty()) {
        double radius = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m.space().dimension(); ++i)
            radius = std::min(radius, m.space().width(i));
        radius /= 16.0;
        std::uniform_int_distribution<std::size_t> pick(0, atoms.size() - 1);
        for (std::size_t t = 0; t < trials; ++t) {
            const State& c = atoms[pick(rng)].state;
            PayoffExpr dist = PayoffExpr::abs_of(PayoffExpr::coord(0) -
                                                 PayoffExpr::constant(c[0]));
            for (std::size_t i = 1; i < c.size(); ++i)
                dist = PayoffExpr::max_of(
                    dist, PayoffExpr::abs_of(PayoffExpr::coord(i) - PayoffExpr::constant(c[i])));
            const PayoffExpr bump =
                PayoffExpr::pos_part(PayoffExpr::constant(radius) - dist);
            rep.min_bump_value = std::min(rep.min_bump_value, ext(bump));
            ++rep.bump_trials;
        }
    }

    for (std::size_t t = 0; t < trials; ++t) {
        Portfolio pa{std::vector<double>(assets)}, pb{std::vector<double>(assets)};
        for (std::size_t d = 0; d < assets; ++d) {
            pa[d] = u(rng);
            pb[d] = u(rng);
        }
        const double a = u(rng), b = u(rng);
        const PayoffExpr X = portfolio_payoff(m, pa);
        const PayoffExpr Y = portfolio_payoff(m, pb);
        const PayoffExpr combo = PayoffExpr::scale(a, X) + PayoffExpr::scale(b, Y);
        const double lhs = ext(combo);
        const double rhs = a * ext(X) + b * ext(Y);
        rep.max_linearity_deviation = std::max(
            rep.max_linearity_deviation, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
    }
    return rep;
}

} // namespace hedgebox
