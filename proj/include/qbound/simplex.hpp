#pragma once

#include <vector>

namespace qbound::lp {

/// maximize objective . x  subject to
///   eq_rows[i] . x == eq_rhs[i]
///   ub_rows[i] . x <= ub_rhs[i]
///   x >= 0
struct Problem {
    int n_vars = 0;
    std::vector<std::vector<double>> eq_rows;
    std::vector<double> eq_rhs;
    std::vector<std::vector<double>> ub_rows;
    std::vector<double> ub_rhs;
    std::vector<double> objective;
};

enum class Status { optimal, infeasible, unbounded };

struct Solution {
    Status status = Status::infeasible;
    double objective = 0.0;
    std::vector<double> x;
    /// |primal - dual| objective difference at termination (self-check).
    double duality_gap = 0.0;
    int iterations = 0;
};

/// Dense two-phase simplex. Dantzig pricing with a permanent switch to
/// Bland's rule after a stall, which guarantees termination. Feasibility
/// and optimality tolerances are 1e-9.
Solution solve(const Problem& problem);

}  // namespace qbound::lp
