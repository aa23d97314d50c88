// SPDX-License-Identifier: Apache-2.0
//
// Payoff expression trees: continuous functions on a box state space built
// from a closed set of node kinds, with exact evaluation, conservative
// interval bounds, and grid minimization for separation oracles.

#pragma once

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

#include "hedgebox/state_space.hpp"

namespace hedgebox {

enum class NodeKind { Const, Coord, Add, Sub, Mul, Scale, Min, Max, PosPart, Abs, Exp };

/// Conservative enclosure [lo, hi] of an expression's range over a box.
struct Interval {
    double lo;
    double hi;
};

namespace detail {

struct ExprNode {
    NodeKind kind;
    double value = 0.0;      // Const payload / Scale factor
    std::size_t coord = 0;   // Coord payload
    std::shared_ptr<const ExprNode> a;
    std::shared_ptr<const ExprNode> b;
    std::size_t min_dim = 0; // smallest state dimension this node evaluates against
};

} // namespace detail

/// Immutable expression tree denoting a continuous function on the box.
/// Every node kind preserves continuity, so continuity holds by construction.
class PayoffExpr {
    using NodePtr = std::shared_ptr<const detail::ExprNode>;

public:
    static PayoffExpr constant(double c) {
        require_finite(c, "constant");
        return make(NodeKind::Const, c, 0, nullptr, nullptr);
    }

    static PayoffExpr coord(std::size_t i) { return make(NodeKind::Coord, 0.0, i, nullptr, nullptr); }

    friend PayoffExpr operator+(const PayoffExpr& x, const PayoffExpr& y) {
        return make(NodeKind::Add, 0.0, 0, x.root_, y.root_);
    }
    friend PayoffExpr operator-(const PayoffExpr& x, const PayoffExpr& y) {
        return make(NodeKind::Sub, 0.0, 0, x.root_, y.root_);
    }
    friend PayoffExpr operator*(const PayoffExpr& x, const PayoffExpr& y) {
        return make(NodeKind::Mul, 0.0, 0, x.root_, y.root_);
    }
    friend PayoffExpr operator*(double c, const PayoffExpr& x) { return scale(c, x); }

    static PayoffExpr scale(double c, const PayoffExpr& x) {
        require_finite(c, "scale");
        return make(NodeKind::Scale, c, 0, x.root_, nullptr);
    }
    static PayoffExpr min_of(const PayoffExpr& x, const PayoffExpr& y) {
        return make(NodeKind::Min, 0.0, 0, x.root_, y.root_);
    }
    static PayoffExpr max_of(const PayoffExpr& x, const PayoffExpr& y) {
        return make(NodeKind::Max, 0.0, 0, x.root_, y.root_);
    }
    static PayoffExpr pos_part(const PayoffExpr& x) {
        return make(NodeKind::PosPart, 0.0, 0, x.root_, nullptr);
    }
    static PayoffExpr abs_of(const PayoffExpr& x) {
        return make(NodeKind::Abs, 0.0, 0, x.root_, nullptr);
    }
    static PayoffExpr exp_of(const PayoffExpr& x) {
        return make(NodeKind::Exp, 0.0, 0, x.root_, nullptr);
    }

    /// Smallest state dimension this expression can be evaluated against.
    std::size_t min_dimension() const { return root_->min_dim; }

    double operator()(const State& s) const { return evaluate(s); }

    double evaluate(const State& s) const {
        if (s.size() < root_->min_dim)
            throw std::invalid_argument("PayoffExpr: state dimension too small for expression");
        const double v = eval(root_.get(), s);
        if (!std::isfinite(v))
            throw std::domain_error("PayoffExpr: non-finite value; expression unsuitable for this box");
        return v;
    }

    /// Interval-arithmetic enclosure of the range over the box; sound but not tight.
    Interval bounds(const StateSpace& space) const {
        if (space.dimension() < root_->min_dim)
            throw std::invalid_argument("PayoffExpr: box dimension too small for expression");
        Interval r = hull(root_.get(), space);
        if (!std::isfinite(r.lo) || !std::isfinite(r.hi))
            throw std::domain_error("PayoffExpr: interval bound not finite on this box");
        return r;
    }

    double sup_bound(const StateSpace& space) const { return bounds(space).hi; }
    double inf_bound(const StateSpace& space) const { return bounds(space).lo; }

    /// S-expression rendering; doubles as a structural fingerprint.
    std::string to_string() const {
        std::ostringstream os;
        os.precision(17);
        print(root_.get(), os);
        return os.str();
    }

    const detail::ExprNode* root() const { return root_.get(); }

private:
    explicit PayoffExpr(NodePtr r) : root_(std::move(r)) {}

    static void require_finite(double c, const char* where) {
        if (!std::isfinite(c)) throw std::invalid_argument(std::string("PayoffExpr: non-finite ") + where);
    }

    static PayoffExpr make(NodeKind kind, double value, std::size_t coord, NodePtr a, NodePtr b) {
        auto n = std::make_shared<detail::ExprNode>();
        n->kind = kind;
        n->value = value;
        n->coord = coord;
        n->min_dim = kind == NodeKind::Coord ? coord + 1 : 0;
        if (a) n->min_dim = std::max(n->min_dim, a->min_dim);
        if (b) n->min_dim = std::max(n->min_dim, b->min_dim);
        n->a = std::move(a);
        n->b = std::move(b);
        return PayoffExpr(std::move(n));
    }

    static double eval(const detail::ExprNode* n, const State& s) {
        switch (n->kind) {
            case NodeKind::Const: return n->value;
            case NodeKind::Coord: return s[n->coord];
            case NodeKind::Add: return eval(n->a.get(), s) + eval(n->b.get(), s);
            case NodeKind::Sub: return eval(n->a.get(), s) - eval(n->b.get(), s);
            case NodeKind::Mul: return eval(n->a.get(), s) * eval(n->b.get(), s);
            case NodeKind::Scale: return n->value * eval(n->a.get(), s);
            case NodeKind::Min: return std::min(eval(n->a.get(), s), eval(n->b.get(), s));
            case NodeKind::Max: return std::max(eval(n->a.get(), s), eval(n->b.get(), s));
            case NodeKind::PosPart: return std::max(eval(n->a.get(), s), 0.0);
            case NodeKind::Abs: return std::abs(eval(n->a.get(), s));
            case NodeKind::Exp: return std::exp(eval(n->a.get(), s));
        }
        throw std::logic_error("PayoffExpr: unknown node kind");
    }

    static Interval hull(const detail::ExprNode* n, const StateSpace& sp) {
        switch (n->kind) {
            case NodeKind::Const: return {n->value, n->value};
            case NodeKind::Coord: return {sp.lo()[n->coord], sp.hi()[n->coord]};
            case NodeKind::Add: {
                auto x = hull(n->a.get(), sp), y = hull(n->b.get(), sp);
                return {x.lo + y.lo, x.hi + y.hi};
            }
            case NodeKind::Sub: {
                auto x = hull(n->a.get(), sp), y = hull(n->b.get(), sp);
                return {x.lo - y.hi, x.hi - y.lo};
            }
            case NodeKind::Mul: {
                auto x = hull(n->a.get(), sp), y = hull(n->b.get(), sp);
                const double p1 = x.lo * y.lo, p2 = x.lo * y.hi, p3 = x.hi * y.lo, p4 = x.hi * y.hi;
                return {std::min(std::min(p1, p2), std::min(p3, p4)),
                        std::max(std::max(p1, p2), std::max(p3, p4))};
            }
            case NodeKind::Scale: {
                auto x = hull(n->a.get(), sp);
                return n->value >= 0.0 ? Interval{n->value * x.lo, n->value * x.hi}
                                       : Interval{n->value * x.hi, n->value * x.lo};
            }
            case NodeKind::Min: {
                auto x = hull(n->a.get(), sp), y = hull(n->b.get(), sp);
                return {std::min(x.lo, y.lo), std::min(x.hi, y.hi)};
            }
            case NodeKind::Max: {
                auto x = hull(n->a.get(), sp), y = hull(n->b.get(), sp);
                return {std::max(x.lo, y.lo), std::max(x.hi, y.hi)};
            }
            case NodeKind::PosPart: {
                auto x = hull(n->a.get(), sp);
                return {std::max(x.lo, 0.0), std::max(x.hi, 0.0)};
            }
            case NodeKind::Abs: {
                auto x = hull(n->a.get(), sp);
                if (x.lo >= 0.0) return x;
                if (x.hi <= 0.0) return {-x.hi, -x.lo};
                return {0.0, std::max(-x.lo, x.hi)};
            }
            case NodeKind::Exp: {
                auto x = hull(n->a.get(), sp);
                return {std::exp(x.lo), std::exp(x.hi)};
            }
        }
        throw std::logic_error("PayoffExpr: unknown node kind");
    }

    static void print(const detail::ExprNode* n, std::ostringstream& os) {
        switch (n->kind) {
            case NodeKind::Const: os << "(const " << n->value << ")"; return;
            case NodeKind::Coord: os << "(coord " << n->coord << ")"; return;
            case NodeKind::Add: os << "(add "; break;
            case NodeKind::Sub: os << "(sub "; break;
            case NodeKind::Mul: os << "(mul "; break;
            case NodeKind::Scale: os << "(scale " << n->value << " "; break;
            case NodeKind::Min: os << "(min "; break;
            case NodeKind::Max: os << "(max "; break;
            case NodeKind::PosPart: os << "(posp "; break;
            case NodeKind::Abs: os << "(abs "; break;
            case NodeKind::Exp: os << "(exp "; break;
        }
        print(n->a.get(), os);
        if (n->b) {
            os << " ";
            print(n->b.get(), os);
        }
        os << ")";
    }

    NodePtr root_;
};

/// Result of minimizing an expression over a finite set of states.
struct GridMin {
    State state;
    std::size_t index = 0;
    double value = 0.0;
};

/// State attaining the minimum of `expr` over the grid, ties broken toward
/// the lowest enumeration index. This is the separation oracle's grid scan:
/// feed it the violation expression and the minimizer is the most violated state.
inline GridMin grid_min(const PayoffExpr& expr, const Grid& grid) {
    GridMin best;
    best.value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        State s = grid.point(i);
        const double v = expr.evaluate(s);
        if (v < best.value) {
            best.value = v;
            best.index = i;
            best.state = std::move(s);
        }
    }
    return best;
}

/// Minimum over an explicit list of states, ties toward the lowest index.
inline GridMin min_over(const PayoffExpr& expr, const std::vector<State>& states) {
    GridMin best;
    best.value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < states.size(); ++i) {
        const double v = expr.evaluate(states[i]);
        if (v < best.value) {
            best.value = v;
            best.index = i;
            best.state = states[i];
        }
    }
    return best;
}

/// A nonnegative contingent claim: a payoff expression validated to be >= 0
/// on its state space. Static interval proof when available, otherwise a
/// lattice audit; a negative audit rejects the claim at construction.
class Claim {
public:
    static constexpr double kNonnegTol = 1e-12;

    Claim(PayoffExpr expr, StateSpace space, std::size_t audit_states = 10'000)
        : expr_(std::move(expr)), space_(std::move(space)) {
        const Interval b = expr_.bounds(space_);
        if (b.lo >= -kNonnegTol) return;
        const Grid lattice = audit_grid(space_, audit_states, audit_states);
        const GridMin worst = grid_min(expr_, lattice);
        if (worst.value < -kNonnegTol)
            throw std::invalid_argument("Claim: payoff audited negative at a lattice state");
    }

    const PayoffExpr& expr() const { return expr_; }
    const StateSpace& space() const { return space_; }

    double operator()(const State& s) const { return expr_.evaluate(s); }

private:
    PayoffExpr expr_;
    StateSpace space_;
};

} // namespace hedgebox
