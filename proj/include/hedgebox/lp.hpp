// SPDX-License-Identifier: Apache-2.0
//
// Dense finite linear programming: a two-phase full-tableau simplex over
//
//     minimize c.x   subject to   A x >= b,  E x = g,  x_j >= 0 (j nonneg)
//
// with per-row dual multipliers at optimality and a Farkas certificate on
// infeasibility. Pivoting is Dantzig for a burn-in, then Bland's rule for
// anti-cycling; identical inputs always produce identical runs.

#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hedgebox {

enum class VarKind { Free, NonNegative };

enum class LpStatus { Optimal, Infeasible, Unbounded, Stalled };

struct LpProblem {
    std::size_t num_vars = 0;
    std::vector<double> objective;              // minimize objective . x
    std::vector<VarKind> kinds;                 // one per variable
    std::vector<std::vector<double>> ineq_lhs;  // rows a with a . x >= rhs
    std::vector<double> ineq_rhs;
    std::vector<std::vector<double>> eq_lhs;    // rows e with e . x = rhs
    std::vector<double> eq_rhs;

    LpProblem(std::size_t n, std::vector<double> c, std::vector<VarKind> k)
        : num_vars(n), objective(std::move(c)), kinds(std::move(k)) {
        if (n == 0 || objective.size() != n || kinds.size() != n)
            throw std::invalid_argument("LpProblem: inconsistent dimensions");
        for (double v : objective) require_finite(v);
    }

    void add_inequality(std::vector<double> a, double rhs) {
        check_row(a, rhs);
        ineq_lhs.push_back(std::move(a));
        ineq_rhs.push_back(rhs);
    }

    void add_equality(std::vector<double> e, double rhs) {
        check_row(e, rhs);
        eq_lhs.push_back(std::move(e));
        eq_rhs.push_back(rhs);
    }

private:
    void check_row(const std::vector<double>& a, double rhs) const {
        if (a.size() != num_vars) throw std::invalid_argument("LpProblem: row length mismatch");
        for (double v : a) require_finite(v);
        require_finite(rhs);
    }
    static void require_finite(double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("LpProblem: non-finite entry");
    }
};

struct LpSolution {
    LpStatus status = LpStatus::Stalled;
    std::vector<double> x;
    double value = 0.0;
    std::vector<double> dual_ineq;    // one per inequality row, >= 0 at optimality
    std::vector<double> dual_eq;      // one per equality row, free sign
    std::vector<double> farkas_ineq;  // infeasibility certificate rows (>= 0)
    std::vector<double> farkas_eq;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double cs_residual = 0.0;
    double duality_gap = 0.0;
    std::size_t iterations = 0;
};

struct LpOptions {
    double pivot_tol = 1e-9;          // entering/pivot element threshold
    double feas_tol = 1e-9;           // phase-1 residual treated as feasible
    std::size_t dantzig_iters = 64;   // burn-in before switching to Bland's rule
    std::size_t max_iterations = 50'000;
};

namespace detail {

// Standard-form workspace. Column order: structural (free variables split
// into a +/- pair), then one slack per inequality row, then one artificial
// per row that needs one; rows are sign-normalized so every rhs is >= 0.
class SimplexTableau {
public:
    SimplexTableau(const LpProblem& p, const LpOptions& opt) : p_(p), opt_(opt) { build(); }

    LpSolution solve() {
        LpSolution sol;
        // Phase 1: minimize the artificial mass to find a feasible basis.
        set_costs(phase1_costs_);
        switch (run(sol)) {
            case RunOutcome::IterLimit:
            case RunOutcome::Unbounded: // cannot happen with a bounded-below phase-1 objective
                sol.status = LpStatus::Stalled;
                return sol;
            case RunOutcome::Converged:
                break;
        }
        if (objective_value() > opt_.feas_tol * (1.0 + rhs_scale_)) {
            sol.status = LpStatus::Infeasible;
            extract_duals(phase1_costs_, sol.farkas_ineq, sol.farkas_eq);
            for (double& y : sol.farkas_ineq) y = std::max(y, 0.0);
            return sol;
        }
        drive_out_artificials();
        // Phase 2: the real objective.
        set_costs(phase2_costs_);
        switch (run(sol)) {
            case RunOutcome::IterLimit:
                sol.status = LpStatus::Stalled;
                return sol;
            case RunOutcome::Unbounded:
                sol.status = LpStatus::Unbounded;
                return sol;
            case RunOutcome::Converged:
                break;
        }
        sol.status = LpStatus::Optimal;
        extract_primal(sol);
        extract_duals(phase2_costs_, sol.dual_ineq, sol.dual_eq);
        for (double& y : sol.dual_ineq)
            if (y < 0.0 && y > -opt_.feas_tol * 10) y = 0.0;
        compute_residuals(sol);
        return sol;
    }

private:
    enum class RunOutcome { Converged, Unbounded, IterLimit };

    void build() {
        const std::size_t n = p_.num_vars;
        m_ineq_ = p_.ineq_lhs.size();
        m_eq_ = p_.eq_lhs.size();
        m_ = m_ineq_ + m_eq_;

        // Structural column layout: (variable, sign) pairs.
        for (std::size_t j = 0; j < n; ++j) {
            col_var_.push_back({j, +1.0});
            if (p_.kinds[j] == VarKind::Free) col_var_.push_back({j, -1.0});
        }
        n_struct_ = col_var_.size();
        slack_col_.assign(m_, npos);
        art_col_.assign(m_, npos);

        rowsign_.assign(m_, 1.0);
        rhs_scale_ = 0.0;
        Eigen::VectorXd rhs(m_);
        for (std::size_t i = 0; i < m_; ++i) {
            const double b = i < m_ineq_ ? p_.ineq_rhs[i] : p_.eq_rhs[i - m_ineq_];
            rowsign_[i] = b < 0.0 ? -1.0 : 1.0;
            rhs(i) = rowsign_[i] * b;
            rhs_scale_ = std::max(rhs_scale_, std::abs(b));
        }

        std::size_t ncols = n_struct_;
        for (std::size_t i = 0; i < m_ineq_; ++i) slack_col_[i] = ncols++;
        for (std::size_t i = 0; i < m_; ++i) {
            const bool slack_can_start = i < m_ineq_ && rowsign_[i] < 0.0;
            if (!slack_can_start) art_col_[i] = ncols++;
        }
        ncols_ = ncols;

        T_.setZero(m_, ncols_ + 1);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::vector<double>& row = i < m_ineq_ ? p_.ineq_lhs[i] : p_.eq_lhs[i - m_ineq_];
            for (std::size_t c = 0; c < n_struct_; ++c)
                T_(i, c) = rowsign_[i] * col_var_[c].second * row[col_var_[c].first];
            if (i < m_ineq_) T_(i, slack_col_[i]) = -rowsign_[i];
            if (art_col_[i] != npos) T_(i, art_col_[i]) = 1.0;
            T_(i, ncols_) = rhs(i);
        }

        basis_.assign(m_, 0);
        for (std::size_t i = 0; i < m_; ++i)
            basis_[i] = art_col_[i] != npos ? art_col_[i] : slack_col_[i];

        phase1_costs_.setZero(ncols_);
        for (std::size_t i = 0; i < m_; ++i)
            if (art_col_[i] != npos) phase1_costs_(art_col_[i]) = 1.0;
        phase2_costs_.setZero(ncols_);
        for (std::size_t c = 0; c < n_struct_; ++c)
            phase2_costs_(c) = col_var_[c].second * p_.objective[col_var_[c].first];

        is_artificial_.assign(ncols_, false);
        for (std::size_t i = 0; i < m_; ++i)
            if (art_col_[i] != npos) is_artificial_[art_col_[i]] = true;
    }

    // Reduced costs z_j = c_j - c_B . T_j for the current basis; z_(ncols) is
    // minus the current objective value.
    void set_costs(const Eigen::VectorXd& costs) {
        costs_ = costs;
        z_.setZero(ncols_ + 1);
        z_.head(ncols_) = costs_.transpose();
        for (std::size_t i = 0; i < m_; ++i) {
            const double cb = costs_(basis_[i]);
            if (cb != 0.0) z_ -= cb * T_.row(i);
        }
    }

    double objective_value() const { return -z_(ncols_); }

    RunOutcome run(LpSolution& sol) {
        for (std::size_t iter = 0;; ++iter) {
            if (sol.iterations >= opt_.max_iterations) return RunOutcome::IterLimit;
            ++sol.iterations;
            const bool bland = iter >= opt_.dantzig_iters;

            // Entering column: artificials start basic and never re-enter.
            std::size_t enter = npos;
            double best = -opt_.pivot_tol;
            for (std::size_t c = 0; c < ncols_; ++c) {
                if (is_artificial_[c]) continue;
                if (z_(c) < best) {
                    enter = c;
                    if (bland) break;
                    best = z_(c);
                }
            }
            if (enter == npos) return RunOutcome::Converged;

            // Ratio test; ties kick artificials out first, then lowest basis
            // index, so runs are reproducible and Bland's guarantee applies.
            std::size_t leave = npos;
            double best_ratio = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = T_(i, enter);
                if (a <= opt_.pivot_tol) continue;
                const double ratio = std::max(T_(i, ncols_), 0.0) / a;
                if (leave == npos) {
                    leave = i;
                    best_ratio = ratio;
                    continue;
                }
                const double eps = 1e-12 * (1.0 + best_ratio);
                if (ratio < best_ratio - eps) {
                    leave = i;
                    best_ratio = ratio;
                } else if (ratio <= best_ratio + eps && prefer_leaving(i, leave)) {
                    leave = i;
                    best_ratio = std::min(best_ratio, ratio);
                }
            }
            if (leave == npos) return RunOutcome::Unbounded;
            pivot(leave, enter);
        }
    }

    bool prefer_leaving(std::size_t cand, std::size_t incumbent) const {
        const bool ca = is_artificial_[basis_[cand]];
        const bool ia = is_artificial_[basis_[incumbent]];
        if (ca != ia) return ca;
        return basis_[cand] < basis_[incumbent];
    }

    void pivot(std::size_t r, std::size_t q) {
        T_.row(r) /= T_(r, q);
        for (std::size_t i = 0; i < m_; ++i) {
            if (i == r) continue;
            const double f = T_(i, q);
            if (f != 0.0) T_.row(i) -= f * T_.row(r);
        }
        const double zf = z_(q);
        if (zf != 0.0) z_ -= zf * T_.row(r);
        basis_[r] = q;
    }

    // Pivot zero-valued basic artificials onto real columns where possible;
    // rows with no eligible pivot are redundant and keep their artificial.
    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (!is_artificial_[basis_[i]]) continue;
            for (std::size_t c = 0; c < ncols_; ++c) {
                if (is_artificial_[c]) continue;
                if (std::abs(T_(i, c)) > opt_.pivot_tol * 10) {
                    pivot(i, c);
                    break;
                }
            }
        }
    }

    void extract_primal(LpSolution& sol) const {
        sol.x.assign(p_.num_vars, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t c = basis_[i];
            if (c < n_struct_) sol.x[col_var_[c].first] += col_var_[c].second * T_(i, ncols_);
        }
        double v = 0.0;
        for (std::size_t j = 0; j < p_.num_vars; ++j) v += p_.objective[j] * sol.x[j];
        sol.value = v;
    }

    // Row multipliers y = c_B B^{-1} read off the probe column of each row:
    // the artificial column is exactly e_i and the slack column is
    // (-rowsign_i) e_i, so y_i falls out of z without an extra solve.
    void extract_duals(const Eigen::VectorXd& costs, std::vector<double>& out_ineq,
                       std::vector<double>& out_eq) const {
        std::vector<double> y(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            double y_norm;
            if (art_col_[i] != npos) {
                const std::size_t c = art_col_[i];
                y_norm = costs(c) - z_(c);
            } else {
                const std::size_t c = slack_col_[i];
                y_norm = -(costs(c) - z_(c)) * rowsign_[i];
            }
            y[i] = rowsign_[i] * y_norm; // back to the user's row orientation
        }
        out_ineq.assign(y.begin(), y.begin() + long(m_ineq_));
        out_eq.assign(y.begin() + long(m_ineq_), y.end());
    }

    void compute_residuals(LpSolution& sol) const {
        double pr = 0.0;
        for (std::size_t i = 0; i < m_ineq_; ++i) {
            double ax = 0.0;
            for (std::size_t j = 0; j < p_.num_vars; ++j) ax += p_.ineq_lhs[i][j] * sol.x[j];
            pr = std::max(pr, p_.ineq_rhs[i] - ax);
            sol.cs_residual =
                std::max(sol.cs_residual, std::abs(sol.dual_ineq[i] * (ax - p_.ineq_rhs[i])));
        }
        for (std::size_t i = 0; i < m_eq_; ++i) {
            double ex = 0.0;
            for (std::size_t j = 0; j < p_.num_vars; ++j) ex += p_.eq_lhs[i][j] * sol.x[j];
            pr = std::max(pr, std::abs(ex - p_.eq_rhs[i]));
        }
        for (std::size_t j = 0; j < p_.num_vars; ++j)
            if (p_.kinds[j] == VarKind::NonNegative) pr = std::max(pr, -sol.x[j]);
        sol.primal_residual = pr;

        double dual_obj = 0.0;
        for (std::size_t i = 0; i < m_ineq_; ++i) dual_obj += sol.dual_ineq[i] * p_.ineq_rhs[i];
        for (std::size_t i = 0; i < m_eq_; ++i) dual_obj += sol.dual_eq[i] * p_.eq_rhs[i];
        sol.duality_gap = std::abs(sol.value - dual_obj);

        double dr = 0.0;
        for (std::size_t j = 0; j < p_.num_vars; ++j) {
            double aty = 0.0;
            for (std::size_t i = 0; i < m_ineq_; ++i) aty += sol.dual_ineq[i] * p_.ineq_lhs[i][j];
            for (std::size_t i = 0; i < m_eq_; ++i) aty += sol.dual_eq[i] * p_.eq_lhs[i][j];
            const double rc = p_.objective[j] - aty;
            if (p_.kinds[j] == VarKind::NonNegative) {
                dr = std::max(dr, -rc);
                sol.cs_residual = std::max(sol.cs_residual, std::abs(sol.x[j] * rc));
            } else {
                dr = std::max(dr, std::abs(rc));
            }
        }
        sol.dual_residual = dr;
    }

    static constexpr std::size_t npos = std::size_t(-1);

    const LpProblem& p_;
    const LpOptions& opt_;
    std::size_t m_ineq_ = 0, m_eq_ = 0, m_ = 0;
    std::size_t n_struct_ = 0, ncols_ = 0;
    std::vector<std::pair<std::size_t, double>> col_var_; // structural col -> (var, sign)
    std::vector<std::size_t> slack_col_, art_col_;
    std::vector<double> rowsign_;
    std::vector<bool> is_artificial_;
    std::vector<std::size_t> basis_;
    Eigen::MatrixXd T_;    // m x (ncols+1), last column is the rhs
    Eigen::RowVectorXd z_; // reduced costs; z_(ncols) = -objective
    Eigen::VectorXd costs_, phase1_costs_, phase2_costs_;
    double rhs_scale_ = 0.0;
};

} // namespace detail

/// Solve a finite LP. Optimal solutions carry dual multipliers and residuals;
/// infeasible ones carry a Farkas certificate y with y.A vanishing on free
/// variables, nonpositive on nonnegative ones, and y.b > 0.
inline LpSolution solve_lp(const LpProblem& p, const LpOptions& opt = {}) {
    detail::SimplexTableau tab(p, opt);
    return tab.solve();
}

} // namespace hedgebox
