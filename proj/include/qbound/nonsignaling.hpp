#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qbound/chained.hpp"
#include "qbound/qudit.hpp"

namespace qbound {

/// Alphabet sizes of a tripartite conditional distribution P(x,y,z | a,b,c).
/// x and y are the d-dimensional outcome alphabets, a and b index the N
/// chained settings, z/c describe the extra observer.
struct BoxDims {
    int x = 2;
    int y = 2;
    int z = 1;
    int a = 2;
    int b = 2;
    int c = 1;

    std::size_t table_size() const;
};

/// Tripartite conditional distribution over finite alphabets, stored
/// row-major over (a, b, c, x, y, z). All indices are 0-based here; the
/// bridge to JointTable maps setting index a to setting a+1.
struct NSBox {
    BoxDims dims;
    std::vector<double> table;

    NSBox() = default;
    NSBox(BoxDims d, std::vector<double> data);  // validates normalization

    std::size_t index(int a, int b, int ch, int x, int y, int zo) const;
    double p(int a, int b, int ch, int x, int y, int zo) const;

    static NSBox uniform(const BoxDims& dims);
};

/// One violated marginal-independence condition.
///   condition 1: P(x,y | a,b,c) depends on c
///   condition 2: P(x,z | a,b,c) depends on b
///   condition 3: P(y,z | a,b,c) depends on a
/// The (a,b,c) tuple names the deviating slice (compared against index 0 of
/// the offending party); magnitude is the largest entry difference.
struct Violation {
    int condition = 0;
    int a = -1;
    int b = -1;
    int c = -1;
    double magnitude = 0.0;
};

/// Empty result means the box is nonsignaling within tol.
std::vector<Violation> check_nonsignaling(const NSBox& box, double tol = kTableTol);

bool is_nonsignaling(const NSBox& box, double tol = kTableTol);

/// sum |p - q| / d over a shared alphabet; d is the X-alphabet size used as
/// the normalizer (not the joint alphabet size).
double statistical_distance(std::span<const double> p, std::span<const double> q, int d);

/// The bipartite outcome table P(x,y | A,B) of a box, marginalized over z at
/// channel ch (certified boxes do not depend on the choice).
JointTable xy_joint_table(const NSBox& box, int ch = 0);

/// Distance of P(x,z | a,c) from the uniform-times-P(z|c) product, against
/// the (d/4) I_N budget.
struct DistanceResult {
    int setting_a = 0;  // 0-based
    int setting_c = 0;
    double delta = 0.0;
    double bound = 0.0;
    double slack = 0.0;  // bound - delta; >= -1e-8 for certified boxes
};

/// For every (a, c): Delta(P_{XZ|ac}, uniform_X x P_{Z|c}) <= (d/4) i_n.
/// Requires a certified nonsignaling box; throws std::invalid_argument when
/// the hypothesis fails.
std::vector<DistanceResult> distance_bound_check(const NSBox& box, double i_n);

/// Per-setting outcome-marginal inequalities implied by the chained
/// correlations: the equality bound P(X=Y) <= 1 - |P_X(x) - P_Y(x)|, the
/// telescoped chain sum_i |P(x|A_i) - P(x|A_{i+1})| <= I_N (with the
/// wraparound relabeling), and |P(x|A) - 1/d| <= (d/4) I_N.
struct PointwiseReport {
    struct Entry {
        std::string check;
        int setting = 0;
        int outcome = 0;
        double lhs = 0.0;
        double rhs = 0.0;
    };
    double i_n = 0.0;
    std::vector<Entry> violations;

    bool ok() const { return violations.empty(); }
};

PointwiseReport pointwise_bound_check(const NSBox& box);

struct SampleWeights {
    double quantum = 0.0;
    double local = 0.0;
    double uniform = 0.0;
};

/// Certified nonsignaling box: a convex mixture of (i) a classical mixture
/// of random-Schmidt-state quantum boxes whose component label feeds z,
/// (ii) local deterministic boxes with z revealing the strategy index, and
/// (iii) the uniform box. Certification failure is a generator bug and
/// throws std::logic_error.
NSBox sample_nonsignaling(const BoxDims& dims, std::uint64_t seed);
NSBox sample_nonsignaling(const BoxDims& dims, std::uint64_t seed, const SampleWeights& weights);

/// LP over the nonsignaling polytope (c fixed to a single channel):
/// maximize sum_x sign[x] (P(x, z0 | a=0) - P(z0)/d) / d at z0 = 0 subject
/// to normalization, the marginal-independence equalities, and
/// I_N(P_{XY|AB}) <= i_cap. sign must hold d entries of +/-1.
double lp_max_delta(int d, int n, int z, double i_cap, std::span<const int> sign_pattern);

/// Max of lp_max_delta over all 2^d sign patterns.
double lp_max_delta_all_patterns(int d, int n, int z, double i_cap);

}  // namespace qbound
