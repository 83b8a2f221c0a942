#include "qbound/simplex.hpp"

#include <cmath>
#include <stdexcept>

namespace qbound::lp {

namespace {

constexpr double kTol = 1e-9;
constexpr int kStallLimit = 50;
constexpr int kMaxIterations = 200000;

struct Tableau {
    int rows = 0;
    int cols = 0;  // structural + slack + artificial columns, then rhs
    int n_struct = 0;
    int n_slack = 0;
    std::vector<double> t;  // rows x (cols + 1)
    std::vector<int> basis;
    std::vector<double> cost;   // current phase costs, length cols
    std::vector<bool> frozen;   // columns barred from entering

    double& at(int i, int j) { return t[static_cast<std::size_t>(i) * (cols + 1) + j]; }
    double at(int i, int j) const { return t[static_cast<std::size_t>(i) * (cols + 1) + j]; }
    double& rhs(int i) { return at(i, cols); }
    double rhs(int i) const { return at(i, cols); }
    int art_col(int row) const { return n_struct + n_slack + row; }
};

double reduced_cost(const Tableau& tb, int j) {
    double z = 0.0;
    for (int i = 0; i < tb.rows; ++i) {
        const double cb = tb.cost[tb.basis[i]];
        if (cb != 0.0) z += cb * tb.at(i, j);
    }
    return tb.cost[j] - z;
}

void pivot(Tableau& tb, int row, int col) {
    const double p = tb.at(row, col);
    const double inv = 1.0 / p;
    for (int j = 0; j <= tb.cols; ++j) tb.at(row, j) *= inv;
    for (int i = 0; i < tb.rows; ++i) {
        if (i == row) continue;
        const double f = tb.at(i, col);
        if (f == 0.0) continue;
        for (int j = 0; j <= tb.cols; ++j) tb.at(i, j) -= f * tb.at(row, j);
    }
    tb.basis[row] = col;
}

double phase_objective(const Tableau& tb) {
    double v = 0.0;
    for (int i = 0; i < tb.rows; ++i) v += tb.cost[tb.basis[i]] * tb.rhs(i);
    return v;
}

/// Runs the simplex loop for the current phase costs. Returns false when the
/// problem is unbounded in this phase.
bool run_phase(Tableau& tb, int& iterations) {
    bool bland = false;
    int stall = 0;
    double last_obj = phase_objective(tb);
    for (;;) {
        if (++iterations > kMaxIterations)
            throw std::runtime_error("simplex: iteration limit exceeded");

        // entering column
        int enter = -1;
        double best_rc = kTol;
        for (int j = 0; j < tb.cols; ++j) {
            if (tb.frozen[j]) continue;
            const double rc = reduced_cost(tb, j);
            if (bland) {
                if (rc > kTol) { enter = j; break; }
            } else if (rc > best_rc) {
                best_rc = rc;
                enter = j;
            }
        }
        if (enter < 0) return true;  // optimal for this phase

        // ratio test; ties resolved toward the smallest basis index
        int leave = -1;
        double best_ratio = 0.0;
        for (int i = 0; i < tb.rows; ++i) {
            const double a = tb.at(i, enter);
            if (a <= kTol) continue;
            const double ratio = tb.rhs(i) / a;
            if (leave < 0 || ratio < best_ratio - kTol ||
                (ratio < best_ratio + kTol && tb.basis[i] < tb.basis[leave])) {
                leave = i;
                best_ratio = ratio;
            }
        }
        if (leave < 0) return false;  // unbounded direction

        pivot(tb, leave, enter);

        const double obj = phase_objective(tb);
        if (obj > last_obj + kTol) {
            stall = 0;
        } else if (!bland && ++stall >= kStallLimit) {
            bland = true;  // anti-cycling from here on
        }
        last_obj = obj;
    }
}

}  // namespace

Solution solve(const Problem& problem) {
    const int n = problem.n_vars;
    const int m_eq = static_cast<int>(problem.eq_rows.size());
    const int m_ub = static_cast<int>(problem.ub_rows.size());
    const int m = m_eq + m_ub;
    if (static_cast<int>(problem.objective.size()) != n)
        throw std::invalid_argument("simplex: objective size mismatch");

    Tableau tb;
    tb.rows = m;
    tb.n_struct = n;
    tb.n_slack = m_ub;
    tb.cols = n + m_ub + m;
    tb.t.assign(static_cast<std::size_t>(m) * (tb.cols + 1), 0.0);
    tb.basis.resize(m);
    tb.frozen.assign(tb.cols, false);

    for (int i = 0; i < m; ++i) {
        const bool is_eq = i < m_eq;
        const auto& row = is_eq ? problem.eq_rows[i] : problem.ub_rows[i - m_eq];
        double b = is_eq ? problem.eq_rhs[i] : problem.ub_rhs[i - m_eq];
        if (static_cast<int>(row.size()) != n)
            throw std::invalid_argument("simplex: constraint row size mismatch");
        const double sign = b < 0.0 ? -1.0 : 1.0;
        for (int j = 0; j < n; ++j) tb.at(i, j) = sign * row[j];
        if (!is_eq) tb.at(i, n + (i - m_eq)) = sign;  // slack
        tb.at(i, tb.art_col(i)) = 1.0;
        tb.rhs(i) = sign * b;
        tb.basis[i] = tb.art_col(i);
    }

    Solution sol;

    // phase 1: drive the artificial variables to zero
    tb.cost.assign(tb.cols, 0.0);
    for (int i = 0; i < m; ++i) tb.cost[tb.art_col(i)] = -1.0;
    // once an artificial leaves the basis it must not come back
    for (int i = 0; i < m; ++i) tb.frozen[tb.art_col(i)] = true;
    // (frozen columns can still be basic; they only cannot re-enter)
    run_phase(tb, sol.iterations);
    if (phase_objective(tb) < -1e-7) {
        sol.status = Status::infeasible;
        return sol;
    }

    // pivot basic artificials out where possible; all-zero rows are redundant
    for (int i = 0; i < m; ++i) {
        if (tb.basis[i] < tb.art_col(0)) continue;
        for (int j = 0; j < n + m_ub; ++j) {
            if (std::abs(tb.at(i, j)) > kTol) {
                pivot(tb, i, j);
                break;
            }
        }
    }

    // phase 2: original objective
    tb.cost.assign(tb.cols, 0.0);
    for (int j = 0; j < n; ++j) tb.cost[j] = problem.objective[j];
    if (!run_phase(tb, sol.iterations)) {
        sol.status = Status::unbounded;
        return sol;
    }

    sol.status = Status::optimal;
    sol.x.assign(n, 0.0);
    for (int i = 0; i < m; ++i)
        if (tb.basis[i] < n) sol.x[tb.basis[i]] = tb.rhs(i);
    sol.objective = 0.0;
    for (int j = 0; j < n; ++j) sol.objective += problem.objective[j] * sol.x[j];

    // dual self-check: y_i = -reduced_cost(artificial_i); gap = |c.x - y.b|
    double dual_obj = 0.0;
    for (int i = 0; i < m; ++i) {
        const double y = -reduced_cost(tb, tb.art_col(i));
        double b = i < m_eq ? problem.eq_rhs[i] : problem.ub_rhs[i - m_eq];
        if (b < 0.0) b = -b;  // rows were sign-normalized above
        dual_obj += y * b;
    }
    sol.duality_gap = std::abs(sol.objective - dual_obj);
    return sol;
}

}  // namespace qbound::lp
