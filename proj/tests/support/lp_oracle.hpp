// SPDX-License-Identifier: Apache-2.0
//
// Brute-force LP reference, independent of the simplex kernel: enumerate all
// candidate vertices (n-subsets of tight constraints), keep the feasible
// ones, and take the best objective. Unboundedness is decided exactly by
// enumerating the normalized recession polytope.
//
// Validity requires a pointed feasible region. The random suites guarantee
// this by making every variable nonnegative or giving free variables an
// explicit lower-bound row, so all recession directions satisfy d >= 0.

#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "hedgebox/lp.hpp"

namespace lp_oracle {

enum class Status { Optimal, Infeasible, Unbounded };

struct Result {
    Status status = Status::Infeasible;
    double value = 0.0;
    std::vector<double> x;
};

namespace detail {

struct Row {
    std::vector<double> a;
    double b = 0.0;
    bool equality = false;
};

inline bool feasible(const std::vector<Row>& rows, const Eigen::VectorXd& x, double tol) {
    for (const auto& r : rows) {
        double ax = 0.0;
        for (std::size_t j = 0; j < r.a.size(); ++j) ax += r.a[j] * x(long(j));
        if (r.equality ? std::abs(ax - r.b) > tol : ax < r.b - tol) return false;
    }
    return true;
}

// Minimize c.x over the rows by tight-set enumeration. Returns nullopt when
// no feasible vertex exists (for pointed regions: infeasible).
inline std::optional<Result> best_vertex(const std::vector<Row>& rows,
                                         const std::vector<double>& c, double tol) {
    const std::size_t n = c.size();
    std::vector<std::size_t> eq_idx, in_idx;
    for (std::size_t i = 0; i < rows.size(); ++i)
        (rows[i].equality ? eq_idx : in_idx).push_back(i);
    if (eq_idx.size() > n) {
        // Overdetermined equalities: still try every combination of the
        // remaining slots (zero of them); fall through with k = 0.
    }
    const std::size_t k = n >= eq_idx.size() ? n - eq_idx.size() : 0;
    if (k > in_idx.size() && eq_idx.size() < n) return std::nullopt;

    std::optional<Result> best;
    std::vector<std::size_t> pick(k);
    for (std::size_t i = 0; i < k; ++i) pick[i] = i;
    const bool any_combo = k <= in_idx.size();
    Eigen::MatrixXd M(eq_idx.size() + k, n);
    Eigen::VectorXd rhs(eq_idx.size() + k);
    std::size_t r0 = 0;
    for (std::size_t i : eq_idx) {
        for (std::size_t j = 0; j < n; ++j) M(long(r0), long(j)) = rows[i].a[j];
        rhs(long(r0)) = rows[i].b;
        ++r0;
    }
    while (any_combo) {
        std::size_t r = r0;
        for (std::size_t t = 0; t < k; ++t) {
            const auto& row = rows[in_idx[pick[t]]];
            for (std::size_t j = 0; j < n; ++j) M(long(r), long(j)) = row.a[j];
            rhs(long(r)) = row.b;
            ++r;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        lu.setThreshold(1e-10);
        if (lu.rank() == long(n)) {
            Eigen::VectorXd x = lu.solve(rhs);
            if ((M * x - rhs).cwiseAbs().maxCoeff() <= 1e-7 && feasible(rows, x, tol)) {
                double v = 0.0;
                for (std::size_t j = 0; j < n; ++j) v += c[j] * x(long(j));
                if (!best || v < best->value) {
                    Result res;
                    res.status = Status::Optimal;
                    res.value = v;
                    res.x.assign(x.data(), x.data() + x.size());
                    best = res;
                }
            }
        }
        // next combination
        std::size_t t = k;
        bool done = k == 0;
        while (t-- > 0) {
            if (pick[t] + (k - t) < in_idx.size()) {
                ++pick[t];
                for (std::size_t u = t + 1; u < k; ++u) pick[u] = pick[u - 1] + 1;
                break;
            }
            if (t == 0) done = true;
        }
        if (done) break;
    }
    return best;
}

} // namespace detail

inline Result solve_by_enumeration(const hedgebox::LpProblem& p, double tol = 1e-7) {
    using detail::Row;
    const std::size_t n = p.num_vars;

    std::vector<Row> rows;
    for (std::size_t i = 0; i < p.ineq_lhs.size(); ++i)
        rows.push_back({p.ineq_lhs[i], p.ineq_rhs[i], false});
    for (std::size_t i = 0; i < p.eq_lhs.size(); ++i)
        rows.push_back({p.eq_lhs[i], p.eq_rhs[i], true});
    for (std::size_t j = 0; j < n; ++j) {
        if (p.kinds[j] != hedgebox::VarKind::NonNegative) continue;
        Row r;
        r.a.assign(n, 0.0);
        r.a[j] = 1.0;
        rows.push_back(std::move(r));
    }

    auto feas = detail::best_vertex(rows, p.objective, tol);
    if (!feas) {
        Result r;
        r.status = Status::Infeasible;
        return r;
    }

    // Recession polytope: homogeneous rows, d >= 0 in every coordinate
    // (pointedness guarantee), normalized by sum d = 1. Nonnegative
    // variables already contributed their d_j >= 0 row above.
    std::vector<Row> rec;
    for (const auto& r : rows) rec.push_back({r.a, 0.0, r.equality});
    for (std::size_t j = 0; j < n; ++j) {
        if (p.kinds[j] == hedgebox::VarKind::NonNegative) continue;
        Row r;
        r.a.assign(n, 0.0);
        r.a[j] = 1.0;
        rec.push_back(std::move(r));
    }
    Row norm;
    norm.a.assign(n, 1.0);
    norm.b = 1.0;
    norm.equality = true;
    rec.push_back(std::move(norm));

    auto dir = detail::best_vertex(rec, p.objective, tol);
    if (dir && dir->value < -1e-9) {
        Result r;
        r.status = Status::Unbounded;
        return r;
    }
    return *feas;
}

} // namespace lp_oracle
