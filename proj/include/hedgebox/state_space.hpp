// SPDX-License-Identifier: Apache-2.0
//
// Compact box state spaces with the max-metric, deterministic dense
// sampling sequences, and lattice grids used by every other module.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace hedgebox {

/// A point of the state space, one coordinate per dimension.
using State = std::vector<double>;

/// Chebyshev (max-coordinate) distance between two states.
inline double max_metric(const State& a, const State& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

/// A compact axis-aligned box [lo, hi] in R^k equipped with the max-metric.
class StateSpace {
public:
    StateSpace(std::vector<double> lo, std::vector<double> hi)
        : lo_(std::move(lo)), hi_(std::move(hi)) {
        if (lo_.empty() || lo_.size() != hi_.size())
            throw std::invalid_argument("StateSpace: lo/hi must be nonempty and of equal length");
        for (std::size_t i = 0; i < lo_.size(); ++i)
            if (!(lo_[i] < hi_[i]))
                throw std::invalid_argument("StateSpace: requires lo[i] < hi[i] in every dimension");
    }

    std::size_t dimension() const { return lo_.size(); }
    const std::vector<double>& lo() const { return lo_; }
    const std::vector<double>& hi() const { return hi_; }
    double width(std::size_t i) const { return hi_[i] - lo_[i]; }

    bool contains(const State& s) const {
        if (s.size() != dimension()) return false;
        for (std::size_t i = 0; i < s.size(); ++i)
            if (s[i] < lo_[i] || s[i] > hi_[i]) return false;
        return true;
    }

    /// Clamp a state into the box, coordinate by coordinate.
    State clip(State s) const {
        for (std::size_t i = 0; i < s.size(); ++i)
            s[i] = std::clamp(s[i], lo_[i], hi_[i]);
        return s;
    }

    /// The 2^k corner states of the box.
    std::vector<State> vertices() const {
        const std::size_t k = dimension();
        if (k > 24) throw std::invalid_argument("StateSpace: vertex enumeration beyond 24 dims");
        std::vector<State> out;
        out.reserve(std::size_t{1} << k);
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
            State v(k);
            for (std::size_t i = 0; i < k; ++i)
                v[i] = (mask >> i) & 1 ? hi_[i] : lo_[i];
            out.push_back(std::move(v));
        }
        return out;
    }

    friend bool operator==(const StateSpace& a, const StateSpace& b) {
        return a.lo_ == b.lo_ && a.hi_ == b.hi_;
    }

private:
    std::vector<double> lo_;
    std::vector<double> hi_;
};

/// A finite lattice over a box: n_i >= 2 equispaced levels per dimension,
/// enumerated row-major with dimension 0 slowest.
class Grid {
public:
    Grid(StateSpace space, std::vector<std::size_t> resolution)
        : space_(std::move(space)), res_(std::move(resolution)) {
        if (res_.size() != space_.dimension())
            throw std::invalid_argument("Grid: resolution length must match dimension");
        size_ = 1;
        for (std::size_t n : res_) {
            if (n < 2) throw std::invalid_argument("Grid: needs at least 2 levels per dimension");
            if (size_ > std::size_t{1} << 40) throw std::invalid_argument("Grid: too many points");
            size_ *= n;
        }
    }

    /// Uniform resolution in every dimension.
    Grid(StateSpace space, std::size_t per_dim)
        : Grid(std::move(space), std::vector<std::size_t>(space.dimension(), per_dim)) {}

    const StateSpace& space() const { return space_; }
    const std::vector<std::size_t>& resolution() const { return res_; }
    std::size_t size() const { return size_; }

    double spacing(std::size_t dim) const { return space_.width(dim) / double(res_[dim] - 1); }

    /// Lattice level j of n in dimension `dim`; endpoints land on lo/hi exactly.
    double level(std::size_t dim, std::size_t j) const {
        if (j == 0) return space_.lo()[dim];
        if (j + 1 == res_[dim]) return space_.hi()[dim];
        return space_.lo()[dim] + double(j) * space_.width(dim) / double(res_[dim] - 1);
    }

    State point(std::size_t index) const {
        const std::size_t k = space_.dimension();
        State s(k);
        for (std::size_t i = k; i-- > 0;) {
            s[i] = level(i, index % res_[i]);
            index /= res_[i];
        }
        return s;
    }

    std::vector<State> states() const {
        std::vector<State> out;
        out.reserve(size_);
        for (std::size_t i = 0; i < size_; ++i) out.push_back(point(i));
        return out;
    }

private:
    StateSpace space_;
    std::vector<std::size_t> res_;
    std::size_t size_;
};

namespace detail {

/// Base-2 radical inverse: reflects the binary digits of m about the point.
inline double radical_inverse(std::uint64_t m) {
    double r = 0.0, f = 0.5;
    while (m != 0) {
        if (m & 1) r += f;
        f *= 0.5;
        m >>= 1;
    }
    return r;
}

} // namespace detail

/// The i-th state (1-based) of the deterministic dense sequence: the bits of
/// the index are dealt round-robin across dimensions and each dimension's
/// sub-integer is mapped through the dyadic radical inverse, so every
/// dimension runs its own midpoint-refinement sequence.
inline State dense_state(const StateSpace& space, std::uint64_t index) {
    const std::size_t k = space.dimension();
    std::vector<std::uint64_t> sub(k, 0);
    std::uint64_t m = index;
    for (std::size_t bit = 0; m != 0; ++bit, m >>= 1)
        if (m & 1) sub[bit % k] |= std::uint64_t{1} << (bit / k);
    State s(k);
    for (std::size_t i = 0; i < k; ++i)
        s[i] = space.lo()[i] + space.width(i) * detail::radical_inverse(sub[i]);
    return space.clip(std::move(s));
}

/// First n elements of the dense sequence.
inline std::vector<State> dense_sequence(const StateSpace& space, std::size_t n) {
    if (n < 1) throw std::invalid_argument("dense_sequence: n must be >= 1");
    std::vector<State> out;
    out.reserve(n);
    for (std::size_t i = 1; i <= n; ++i) out.push_back(dense_state(space, i));
    return out;
}

/// An equispaced audit lattice with roughly `per_dim` levels per dimension,
/// shrunk uniformly so the total point count stays within `total_cap`.
inline Grid audit_grid(const StateSpace& space, std::size_t per_dim = 2001,
                       std::size_t total_cap = 1'000'000) {
    const std::size_t k = space.dimension();
    std::size_t n = std::max<std::size_t>(2, per_dim);
    auto total = [&](std::size_t m) {
        double t = 1.0;
        for (std::size_t i = 0; i < k; ++i) t *= double(m);
        return t;
    };
    while (n > 2 && total(n) > double(total_cap)) --n;
    return Grid(space, n);
}

namespace detail {

/// Exact nearest-sample Chebyshev distances via a bucket grid with expanding
/// shell search; equivalent to the brute-force scan but near O(1) per query.
class NearestSampleIndex {
public:
    NearestSampleIndex(const StateSpace& space, const std::vector<State>& samples)
        : space_(&space), samples_(&samples) {
        const std::size_t k = space.dimension();
        const auto n = samples.size();
        buckets_per_dim_ = std::max<std::size_t>(
            1, std::size_t(std::floor(std::pow(double(n), 1.0 / double(k)))));
        buckets_per_dim_ = std::min<std::size_t>(buckets_per_dim_, 64);
        min_cell_ = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i)
            min_cell_ = std::min(min_cell_, space.width(i) / double(buckets_per_dim_));
        for (std::size_t s = 0; s < n; ++s)
            table_[key(cell(samples[s]))].push_back(s);
    }

    double distance(const State& q) const {
        const std::size_t k = space_->dimension();
        const auto qc = cell(q);
        double best = std::numeric_limits<double>::infinity();
        const std::size_t max_shell = buckets_per_dim_;
        for (std::size_t r = 0; r <= max_shell; ++r) {
            if (best <= (r == 0 ? 0.0 : double(r - 1) * min_cell_)) break;
            scan_shell(q, qc, r, best);
        }
        if (!std::isfinite(best)) {
            for (const auto& s : *samples_) best = std::min(best, max_metric(q, s));
        }
        return best;
    }

private:
    std::vector<std::int64_t> cell(const State& s) const {
        const std::size_t k = space_->dimension();
        std::vector<std::int64_t> c(k);
        for (std::size_t i = 0; i < k; ++i) {
            double t = (s[i] - space_->lo()[i]) / space_->width(i) * double(buckets_per_dim_);
            c[i] = std::clamp<std::int64_t>(std::int64_t(t), 0, std::int64_t(buckets_per_dim_) - 1);
        }
        return c;
    }

    std::uint64_t key(const std::vector<std::int64_t>& c) const {
        std::uint64_t h = 1469598103934665603ull;
        for (auto v : c) {
            h ^= std::uint64_t(v);
            h *= 1099511628211ull;
        }
        return h;
    }

    void scan_bucket(const State& q, const std::vector<std::int64_t>& c, double& best) const {
        auto it = table_.find(key(c));
        if (it == table_.end()) return;
        for (std::size_t s : it->second)
            best = std::min(best, max_metric(q, (*samples_)[s]));
    }

    void scan_shell(const State& q, const std::vector<std::int64_t>& qc, std::size_t r,
                    double& best) const {
        const std::size_t k = space_->dimension();
        std::vector<std::int64_t> c(k);
        std::vector<std::int64_t> off(k, -std::int64_t(r));
        while (true) {
            std::int64_t linf = 0;
            for (std::size_t i = 0; i < k; ++i) linf = std::max(linf, std::abs(off[i]));
            if (linf == std::int64_t(r)) {
                bool inside = true;
                for (std::size_t i = 0; i < k; ++i) {
                    c[i] = qc[i] + off[i];
                    if (c[i] < 0 || c[i] >= std::int64_t(buckets_per_dim_)) inside = false;
                }
                if (inside) scan_bucket(q, c, best);
            }
            std::size_t d = 0;
            while (d < k && off[d] == std::int64_t(r)) off[d++] = -std::int64_t(r);
            if (d == k) break;
            ++off[d];
        }
    }

    const StateSpace* space_;
    const std::vector<State>* samples_;
    std::size_t buckets_per_dim_;
    double min_cell_;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> table_;
};

} // namespace detail

/// Largest distance from any audit-lattice point to its nearest sample; the
/// computational surrogate for how densely `points` covers the box.
inline double fill_distance(const StateSpace& space, const std::vector<State>& points,
                            std::size_t audit_per_dim = 2001,
                            std::size_t audit_total_cap = 1'000'000) {
    if (points.empty()) throw std::invalid_argument("fill_distance: needs at least one point");
    const Grid lattice = audit_grid(space, audit_per_dim, audit_total_cap);
    detail::NearestSampleIndex index(space, points);
    double worst = 0.0;
    for (std::size_t i = 0; i < lattice.size(); ++i)
        worst = std::max(worst, index.distance(lattice.point(i)));
    return worst;
}

/// Sub-lattice of `spacing`-stepped states within the max-metric ball of
/// radius `radius` around `center`, clipped to the box.
inline std::vector<State> local_lattice(const StateSpace& space, const State& center,
                                        double radius, const std::vector<double>& spacing) {
    const std::size_t k = space.dimension();
    if (center.size() != k) throw std::invalid_argument("local_lattice: dimension mismatch");
    if (!(radius > 0.0)) throw std::invalid_argument("local_lattice: radius must be positive");
    std::vector<std::vector<double>> levels(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double h = spacing[i];
        const auto steps = std::int64_t(std::floor(radius / h + 1e-12));
        for (std::int64_t t = -steps; t <= steps; ++t) {
            double x = std::clamp(center[i] + double(t) * h, space.lo()[i], space.hi()[i]);
            if (x >= center[i] - radius - 1e-15 && x <= center[i] + radius + 1e-15)
                if (levels[i].empty() || x > levels[i].back())
                    levels[i].push_back(x);
        }
        if (levels[i].empty()) levels[i].push_back(std::clamp(center[i], space.lo()[i], space.hi()[i]));
    }
    std::vector<State> out;
    std::vector<std::size_t> idx(k, 0);
    while (true) {
        State s(k);
        for (std::size_t i = 0; i < k; ++i) s[i] = levels[i][idx[i]];
        out.push_back(std::move(s));
        std::size_t d = k;
        while (d-- > 0) {
            if (++idx[d] < levels[d].size()) break;
            idx[d] = 0;
            if (d == 0) return out;
        }
    }
}

/// Local refinement around a grid point: the ball of the given radius sampled
/// at double the grid's resolution, clipped to the box.
inline std::vector<State> refine_around(const Grid& grid, const State& center, double radius) {
    std::vector<double> half(grid.space().dimension());
    for (std::size_t i = 0; i < half.size(); ++i) half[i] = grid.spacing(i) / 2.0;
    return local_lattice(grid.space(), center, radius, half);
}

} // namespace hedgebox
