#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qbound/chained.hpp"

namespace qbound {

/// One local deterministic assignment: Alice outputs alice_map[A-1] for
/// setting A, Bob outputs bob_map[B-1]. Entries are outcomes in 0..d-1.
struct DeterministicStrategy {
    int dim = 0;
    int n_settings = 0;
    std::vector<int> alice_map;
    std::vector<int> bob_map;
};

enum class BoundModel { bell, leggett };
enum class BoundKind { analytic, brute_force };

/// A lower bound a hidden-variable model imposes on I_N.
/// n_settings == 0 means the bound holds for every N.
struct BoundReport {
    BoundModel model = BoundModel::bell;
    int dim = 0;
    int n_settings = 0;
    double bound = 0.0;
    BoundKind kind = BoundKind::analytic;
};

/// Exact I_N of a single deterministic strategy (integer-valued).
double strategy_in(const DeterministicStrategy& s);

/// Local deterministic models obey I_N >= 8(d-1)/d^3 for every N.
BoundReport bell_bound_analytic(int d);

/// Minimum of I_N over all d^(2N) deterministic strategies, enumerated in
/// lexicographic order. Guard: d^(2N) <= 10^7, else throws std::length_error.
BoundReport bell_bound_bruteforce(int d, int n);

/// I_N of a convex mixture of deterministic strategies. Computed both from
/// the mixed table and as the weighted per-strategy sum; the two routes must
/// agree within 1e-12 (linearity check) or a std::logic_error is thrown.
double mixture_in(const std::vector<std::pair<DeterministicStrategy, double>>& mixture);

/// Hidden-state models with pure-state (Malus-law) local marginals are
/// defined for two-dimensional systems only.
enum class LeggettU { fixed_in_plane, two_orthogonal_planes, uniform_sphere };

struct LeggettConfig {
    int n_settings = 1;
    LeggettU u_model = LeggettU::uniform_sphere;
};

/// fixed_in_plane -> cos(pi/2N); two_orthogonal_planes -> cos(pi/2N)/sqrt(2);
/// uniform_sphere -> 1/2 (independent of N).
BoundReport leggett_bound(const LeggettConfig& cfg);

enum class SphereDraw { uniform, aligned, orthogonal };

/// Monte Carlo average of |a . u| for a fixed unit vector a and u drawn per
/// `draw` (uniform on the sphere converges to 1/2; aligned/orthogonal are
/// the degenerate point-mass checks). Seeded and reproducible.
double mean_abs_dot_mc(long samples, std::uint64_t seed, SphereDraw draw = SphereDraw::uniform);

/// Number of standard errors by which i_star undercuts the model bound:
/// (bound - i_star) / std_err. Negative means no violation.
double violation_margin(double i_star, double std_err, const BoundReport& bound);

}  // namespace qbound
