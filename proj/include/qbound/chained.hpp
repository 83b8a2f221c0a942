#pragma once

#include <map>
#include <span>
#include <vector>

#include "qbound/qudit.hpp"

namespace qbound {

/// Which modular difference of a d x d outcome table to average.
/// y_minus_x_shifted computes <[Y - X - 1]>, the wraparound convention that
/// relabels Alice's outcomes x -> x + 1 on the (A=1, B=N) slice.
enum class DiffMode { x_minus_y, y_minus_x, y_minus_x_shifted };

/// <[.]> = sum_k k P([.] = k) with [.] taken modulo d.
/// The table must be normalized within 1e-9; throws otherwise.
double modular_expectation(std::span<const double> table, int dim, DiffMode mode);

/// I_N together with its 2N chained terms, ordered
/// <[X_1-Y_1]>, <[Y_1-X_2]>, ..., <[X_N-Y_N]>, <[Y_N-X_1-1]>.
struct ChainedBellValue {
    int dim = 0;
    int n_settings = 0;
    double value = 0.0;
    std::vector<double> per_term;
};

/// Sums the 2N chained terms over setting pairs (i,i) and (i+1,i), closing
/// the chain with the shifted (A=1, B=N) term.
ChainedBellValue evaluate_in(const JointTable& joint);

/// Exact quantum I_N of the maximally entangled state |psi_d> at N settings.
double ideal_in(int d, int n);

/// gamma = pi^2/(4 d^2) * sum_{j=1}^{d-1} j / sin^2(pi j / d); the large-N
/// quantum value is I_N = 2 gamma / N + O(1/N^2).
double gamma_constant(int d);

struct ScanPoint {
    double value = 0.0;
    double std_err = 0.0;  // 0 for exact values
};

/// min_N of a scan; argmin_n ties break toward smaller N.
struct MinimumScan {
    int dim = 0;
    std::map<int, ScanPoint> scanned;
    int argmin_n = 0;
    double i_star = 0.0;
};

MinimumScan scan_minimum(int dim, const std::map<int, ScanPoint>& values);

}  // namespace qbound
