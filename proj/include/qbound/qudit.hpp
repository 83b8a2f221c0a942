#pragma once

#include <complex>
#include <span>
#include <vector>

namespace qbound {

using cdouble = std::complex<double>;

// Tolerance hierarchy: construction 1e-12, table certification 1e-9.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kTableTol = 1e-9;

/// Bipartite pure state given by its Schmidt amplitudes:
/// |psi> = sum_j amps[j] |j>_A |j>_B, amps real, nonnegative, sum of squares 1.
struct SchmidtState {
    int dim = 0;
    std::vector<double> amps;

    SchmidtState(int d, std::vector<double> amplitudes);
};

/// amps = (1/sqrt(d), ..., 1/sqrt(d)); throws std::invalid_argument for d < 2.
SchmidtState make_maximally_entangled(int d);

/// The (d, N) phase-measurement family. Settings are 1-based:
/// alpha[A-1] = (A - 1/2) / N for Alice, beta[B-1] = B / N for Bob,
/// which interleave as 0 < alpha_1 < beta_1 < alpha_2 < ...
struct SettingsFamily {
    int dim = 0;
    int n_settings = 0;
    std::vector<double> alpha;
    std::vector<double> beta;

    SettingsFamily(int d, int n);
};

enum class Party { alice, bob };

/// Unit vector of one projective outcome. Entry j is
///   Alice: (1/sqrt d) exp[+(2*pi*i/d) j (outcome - alpha_A)]
///   Bob:   (1/sqrt d) exp[-(2*pi*i/d) j (outcome - beta_B)]
struct MeasurementVector {
    int dim = 0;
    std::vector<cdouble> entries;
};

/// setting is 1..N, outcome is 0..d-1; out of range throws std::out_of_range.
MeasurementVector projector_vector(Party party, const SettingsFamily& family, int setting, int outcome);

/// Conditional outcome distribution P(x, y | A, B) for every setting pair.
/// Slices are stored row-major over (A-1, B-1, x, y). Construction clamps
/// tiny negative entries to zero (magnitude above 1e-9 is an error) and
/// rescales each slice to sum exactly 1 (sums must already be 1 within 1e-9).
struct JointTable {
    int dim = 0;
    int n_settings = 0;
    std::vector<double> probs;

    JointTable() = default;
    JointTable(int d, int n, std::vector<double> data);

    /// P(x, y | A, B); A, B are 1-based settings.
    double prob(int setting_a, int setting_b, int x, int y) const;

    /// The d*d slice for (A, B), row-major over (x, y).
    std::span<const double> slice(int setting_a, int setting_b) const;

    std::size_t slice_offset(int setting_a, int setting_b) const;
};

/// Born-rule joint table for the Schmidt state measured in the family's bases:
/// P(x,y|A,B) = |sum_j amps[j] * conj(a_j) * conj(b_j)|^2.
JointTable born_joint_table(const SchmidtState& state, const SettingsFamily& family);

}  // namespace qbound
