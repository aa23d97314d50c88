// SPDX-License-Identifier: Apache-2.0
//
// One-period market (f, S): D+1 assets with continuous payoffs and time-0
// prices under the riskless normalization S_0 = 1, f_0 = 1. Portfolios,
// returns, and the linearly independent sub-basis live here.

#pragma once

#include <Eigen/Dense>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hedgebox/payoff.hpp"
#include "hedgebox/state_space.hpp"

namespace hedgebox {

/// Asset holdings, one entry per asset including the riskless slot 0.
struct Portfolio {
    std::vector<double> holdings;

    Portfolio() = default;
    explicit Portfolio(std::vector<double> h) : holdings(std::move(h)) {}

    std::size_t size() const { return holdings.size(); }
    double operator[](std::size_t i) const { return holdings[i]; }
    double& operator[](std::size_t i) { return holdings[i]; }
};

class Market {
public:
    /// Full asset list; asset 0 must be the riskless Const(1) at price 1.
    Market(StateSpace space, std::vector<PayoffExpr> payoffs, std::vector<double> prices)
        : space_(std::move(space)), payoffs_(std::move(payoffs)), prices_(std::move(prices)) {
        if (payoffs_.empty() || payoffs_.size() != prices_.size())
            throw std::invalid_argument("Market: payoff and price lists must match and be nonempty");
        const auto* s0 = payoffs_[0].root();
        if (s0->kind != NodeKind::Const || s0->value != 1.0 || prices_[0] != 1.0)
            throw std::invalid_argument("Market: asset 0 must be the riskless payoff 1 at price 1");
        for (double f : prices_)
            if (!(f >= 0.0)) throw std::invalid_argument("Market: prices must be nonnegative");
        for (const auto& p : payoffs_)
            if (p.min_dimension() > space_.dimension())
                throw std::invalid_argument("Market: payoff references a coordinate outside the box");
    }

    /// Convenience factory: prepends the riskless asset to a risky list.
    static Market with_riskless(StateSpace space, std::vector<PayoffExpr> risky,
                                std::vector<double> risky_prices) {
        std::vector<PayoffExpr> payoffs;
        payoffs.reserve(risky.size() + 1);
        payoffs.push_back(PayoffExpr::constant(1.0));
        for (auto& p : risky) payoffs.push_back(std::move(p));
        std::vector<double> prices;
        prices.reserve(risky_prices.size() + 1);
        prices.push_back(1.0);
        for (double f : risky_prices) prices.push_back(f);
        return Market(std::move(space), std::move(payoffs), std::move(prices));
    }

    const StateSpace& space() const { return space_; }
    std::size_t num_assets() const { return payoffs_.size(); }
    std::size_t num_risky() const { return payoffs_.size() - 1; }
    const PayoffExpr& payoff(std::size_t d) const { return payoffs_[d]; }
    const std::vector<PayoffExpr>& payoffs() const { return payoffs_; }
    double price(std::size_t d) const { return prices_[d]; }
    const std::vector<double>& prices() const { return prices_; }

    /// Market with one extra asset appended; used for extended-market pricing.
    Market extended(PayoffExpr payoff, double price) const {
        auto p = payoffs_;
        auto f = prices_;
        p.push_back(std::move(payoff));
        f.push_back(price);
        return Market(space_, std::move(p), std::move(f));
    }

    /// Structural fingerprint of (space, payoffs, prices); bit-exact.
    std::string signature() const {
        std::ostringstream os;
        os.precision(17);
        os << "box[";
        for (std::size_t i = 0; i < space_.dimension(); ++i)
            os << space_.lo()[i] << ":" << space_.hi()[i] << (i + 1 < space_.dimension() ? "," : "");
        os << "]";
        for (std::size_t d = 0; d < payoffs_.size(); ++d)
            os << "|" << prices_[d] << "~" << payoffs_[d].to_string();
        return os.str();
    }

private:
    StateSpace space_;
    std::vector<PayoffExpr> payoffs_;
    std::vector<double> prices_;
};

inline void check_dimensions(const Market& m, const Portfolio& pi) {
    if (pi.size() != m.num_assets())
        throw std::invalid_argument("Portfolio: holding count must match asset count");
}

/// Time-0 cost of the portfolio, pi . f.
inline double portfolio_cost(const Market& m, const Portfolio& pi) {
    check_dimensions(m, pi);
    double c = 0.0;
    for (std::size_t d = 0; d < pi.size(); ++d) c += pi[d] * m.price(d);
    return c;
}

/// The payoff expression sum_d pi_d S_d.
inline PayoffExpr portfolio_payoff(const Market& m, const Portfolio& pi) {
    check_dimensions(m, pi);
    PayoffExpr acc = PayoffExpr::scale(pi[0], m.payoff(0));
    for (std::size_t d = 1; d < pi.size(); ++d)
        acc = acc + PayoffExpr::scale(pi[d], m.payoff(d));
    return acc;
}

/// Price-centred returns R_d = S_d - f_d, d = 1..D. A probability measure mu
/// has zero expected returns exactly when it prices every asset: the moment
/// condition int R_d dmu = 0 is equivalent to int S_d dmu = f_d.
inline std::vector<PayoffExpr> returns(const Market& m) {
    std::vector<PayoffExpr> out;
    out.reserve(m.num_risky());
    for (std::size_t d = 1; d < m.num_assets(); ++d)
        out.push_back(m.payoff(d) - PayoffExpr::constant(m.price(d)));
    return out;
}

struct RedundantAsset {
    std::size_t index = 0;
    std::vector<double> replication; // coefficients over the basis assets, in basis order
    double price_gap = 0.0;          // |f_index - replication . f_basis|
    bool price_consistent = true;    // gap within tolerance; false is an arbitrage finding
};

struct SubbasisResult {
    std::vector<std::size_t> basis; // always contains 0; increasing order
    std::vector<RedundantAsset> redundant;
};

/// Maximal linearly independent asset subset measured on the grid, preferring
/// low indices; redundant assets are priced against their replication and a
/// price gap beyond tolerance is reported as a finding, not an exception.
inline SubbasisResult independent_subbasis(const Market& m, const Grid& grid,
                                           double rank_rtol = 1e-10, double price_tol = 1e-8) {
    if (!(grid.space() == m.space()))
        throw std::invalid_argument("independent_subbasis: grid/market space mismatch");
    if (grid.size() < m.num_assets())
        throw std::invalid_argument("independent_subbasis: grid needs at least D+1 points");

    const std::size_t n = grid.size();
    const std::size_t assets = m.num_assets();
    Eigen::MatrixXd samples(n, assets);
    for (std::size_t j = 0; j < n; ++j) {
        const State s = grid.point(j);
        for (std::size_t d = 0; d < assets; ++d) samples(j, d) = m.payoff(d).evaluate(s);
    }
    double scale = 0.0;
    for (std::size_t d = 0; d < assets; ++d) scale = std::max(scale, samples.col(d).norm());

    SubbasisResult out;
    out.basis.push_back(0);
    Eigen::MatrixXd selected = samples.col(0);
    for (std::size_t d = 1; d < assets; ++d) {
        Eigen::VectorXd target = samples.col(d);
        Eigen::VectorXd coef = selected.colPivHouseholderQr().solve(target);
        const double resid = (selected * coef - target).norm();
        if (resid > rank_rtol * scale) {
            out.basis.push_back(d);
            selected.conservativeResize(Eigen::NoChange, selected.cols() + 1);
            selected.col(selected.cols() - 1) = target;
        } else {
            RedundantAsset r;
            r.index = d;
            r.replication.assign(coef.data(), coef.data() + coef.size());
            double replicated_price = 0.0;
            for (Eigen::Index i = 0; i < coef.size(); ++i)
                replicated_price += coef(i) * m.price(out.basis[std::size_t(i)]);
            r.price_gap = std::abs(m.price(d) - replicated_price);
            r.price_consistent = r.price_gap <= price_tol;
            out.redundant.push_back(std::move(r));
        }
    }
    return out;
}

} // namespace hedgebox
