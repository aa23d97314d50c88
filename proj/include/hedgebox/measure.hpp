// SPDX-License-Identifier: Apache-2.0
//
// Finite atomic measures: lists of (state, nonnegative weight) atoms, the
// computational stand-in for countably additive measures on the box.

#pragma once

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hedgebox/payoff.hpp"
#include "hedgebox/state_space.hpp"

namespace hedgebox {

struct Atom {
    State state;
    double weight = 0.0;
};

/// Finite nonnegative atomic measure. Probability measures are the ones with
/// total mass 1; helpers below normalize and integrate expressions.
class AtomicMeasure {
public:
    AtomicMeasure() = default;

    explicit AtomicMeasure(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
        for (auto& a : atoms_) {
            if (a.weight < -1e-12) throw std::invalid_argument("AtomicMeasure: negative weight");
            if (a.weight < 0.0) a.weight = 0.0;
        }
    }

    const std::vector<Atom>& atoms() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    double mass() const {
        double m = 0.0;
        for (const auto& a : atoms_) m += a.weight;
        return m;
    }

    double min_weight() const {
        double w = std::numeric_limits<double>::infinity();
        for (const auto& a : atoms_) w = std::min(w, a.weight);
        return atoms_.empty() ? 0.0 : w;
    }

    bool is_probability(double tol = 1e-12) const { return std::abs(mass() - 1.0) <= tol; }

    double integrate(const PayoffExpr& f) const {
        double s = 0.0;
        for (const auto& a : atoms_) s += a.weight * f.evaluate(a.state);
        return s;
    }

    /// Same atoms rescaled to total mass 1.
    AtomicMeasure normalized() const {
        const double m = mass();
        if (!(m > 0.0)) throw std::domain_error("AtomicMeasure: cannot normalize zero mass");
        std::vector<Atom> out = atoms_;
        for (auto& a : out) a.weight /= m;
        return AtomicMeasure(std::move(out));
    }

    std::vector<State> support() const {
        std::vector<State> s;
        s.reserve(atoms_.size());
        for (const auto& a : atoms_)
            if (a.weight > 0.0) s.push_back(a.state);
        return s;
    }

private:
    std::vector<Atom> atoms_;
};

} // namespace hedgebox
