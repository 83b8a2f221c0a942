#include "qbound/chained.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qbound {

double modular_expectation(std::span<const double> table, int dim, DiffMode mode) {
    if (dim < 2) throw std::invalid_argument("modular_expectation: dimension must be >= 2");
    if (table.size() != static_cast<std::size_t>(dim) * dim)
        throw std::invalid_argument("modular_expectation: table size mismatch");
    double sum = 0.0;
    for (double p : table) {
        if (p < -kTableTol) throw std::invalid_argument("modular_expectation: negative probability");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kTableTol)
        throw std::invalid_argument("modular_expectation: table is not normalized");

    double acc = 0.0;
    for (int x = 0; x < dim; ++x) {
        for (int y = 0; y < dim; ++y) {
            int diff = 0;
            switch (mode) {
                case DiffMode::x_minus_y: diff = x - y; break;
                case DiffMode::y_minus_x: diff = y - x; break;
                case DiffMode::y_minus_x_shifted: diff = y - x - 1; break;
            }
            const int k = ((diff % dim) + dim) % dim;
            acc += k * table[static_cast<std::size_t>(x) * dim + y];
        }
    }
    return acc;
}

ChainedBellValue evaluate_in(const JointTable& joint) {
    const int d = joint.dim;
    const int n = joint.n_settings;

    ChainedBellValue result;
    result.dim = d;
    result.n_settings = n;
    result.per_term.reserve(2 * static_cast<std::size_t>(n));

    for (int i = 1; i <= n; ++i) {
        result.per_term.push_back(modular_expectation(joint.slice(i, i), d, DiffMode::x_minus_y));
        if (i < n) {
            result.per_term.push_back(
                modular_expectation(joint.slice(i + 1, i), d, DiffMode::y_minus_x));
        } else {
            result.per_term.push_back(
                modular_expectation(joint.slice(1, n), d, DiffMode::y_minus_x_shifted));
        }
    }
    for (double t : result.per_term) result.value += t;
    return result;
}

double ideal_in(int d, int n) {
    return evaluate_in(born_joint_table(make_maximally_entangled(d), SettingsFamily(d, n))).value;
}

double gamma_constant(int d) {
    if (d < 2) throw std::invalid_argument("gamma_constant: dimension must be >= 2");
    double sum = 0.0;
    for (int j = 1; j < d; ++j) {
        const double s = std::sin(std::numbers::pi * j / d);
        sum += j / (s * s);
    }
    return std::numbers::pi * std::numbers::pi / (4.0 * d * d) * sum;
}

MinimumScan scan_minimum(int dim, const std::map<int, ScanPoint>& values) {
    if (values.empty()) throw std::invalid_argument("scan_minimum: empty scan");
    MinimumScan scan;
    scan.dim = dim;
    scan.scanned = values;
    scan.argmin_n = values.begin()->first;
    scan.i_star = values.begin()->second.value;
    // std::map iterates N ascending, so strict < keeps the smaller N on ties.
    for (const auto& [n, point] : values) {
        if (point.value < scan.i_star) {
            scan.i_star = point.value;
            scan.argmin_n = n;
        }
    }
    return scan;
}

}  // namespace qbound
