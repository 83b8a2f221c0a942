#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qbound/chained.hpp"
#include "qbound/qudit.hpp"

namespace qbound {

enum class SpectrumShape { exponential, lorentzian };

/// Two-photon mode spectrum over modes l in [-half_width, half_width].
/// exponential: c_l ~ exp(-|l|/decay); lorentzian: c_l ~ 1/(1 + (l/decay)^2).
struct SpiralSpectrum {
    int half_width = 0;
    SpectrumShape shape = SpectrumShape::exponential;
    double decay = 1.0;
};

/// Normalized amplitudes indexed 0..2L, entry i belonging to mode l = i - L.
std::vector<double> spectrum_amplitudes(const SpiralSpectrum& spec);

/// The d modes used as the computational basis.
struct SubspaceSelection {
    int dim = 0;
    std::vector<int> modes;
};

/// Mode choices used for the coincidence measurements: sparse modes at low d
/// for extinction, adjacent modes at d = 5, 6 for rate.
SubspaceSelection default_subspace(int d);

/// Projects the spectrum onto the selected modes. Returns the renormalized
/// Schmidt state and the projection weight (probability of landing in the
/// subspace).
std::pair<SchmidtState, double> select_subspace(const SpiralSpectrum& spec,
                                                const SubspaceSelection& sel);

/// Local filtering that equalizes all amplitudes to 1/sqrt(d).
/// efficiency = d * min_j amps[j]^2 is the probability of passing the filter.
/// Throws std::invalid_argument when any selected amplitude is zero.
std::pair<SchmidtState, double> procrustean_concentrate(const SchmidtState& state);

/// Detection imperfection model: isotropic mixing with weight (1 - visibility),
/// followed by per-party outcome confusion, plus Poisson count parameters.
struct NoiseModel {
    int dim = 0;
    double visibility = 1.0;
    std::vector<double> crosstalk;  // d x d row-stochastic, row = true outcome
    double rate_scale = 1e6;        // expected coincidences per setting pair at unit efficiency
    double dark_rate = 0.0;         // accidental coincidences per setting pair

    static NoiseModel ideal(int d, double rate_scale = 1e6);
};

/// P' = visibility * P + (1 - visibility)/d^2, then the confusion table is
/// applied independently to each party's outcome; slices are renormalized.
JointTable apply_noise(const JointTable& joint, const NoiseModel& noise);

/// Coincidence counts n(x, y | A, B) with integration metadata.
struct CountRecord {
    int dim = 0;
    int n_settings = 0;
    std::vector<long long> counts;  // row-major over (A-1, B-1, x, y)
    double integration_s = 30.0;
    std::string meta;

    std::size_t index(int setting_a, int setting_b, int x, int y) const;
    long long count(int setting_a, int setting_b, int x, int y) const;
    long long slice_total(int setting_a, int setting_b) const;
};

/// Independent Poisson draws per cell with mean
/// rate_scale * P'(x,y|A,B) + dark_rate / d^2; reproducible for a seed.
CountRecord simulate_counts(const JointTable& joint, const NoiseModel& noise, std::uint64_t seed);

enum class ErrorMethod { bootstrap, gaussian };

struct Estimate {
    double value = 0.0;
    double std_err = 0.0;
    ErrorMethod method = ErrorMethod::bootstrap;
};

/// I_N from per-slice empirical frequencies. Standard error either by
/// parametric bootstrap (Poisson resampling of each cell, >= 100 resamples)
/// or by first-order propagation of independent Poisson variances.
Estimate estimate_in(const CountRecord& counts, ErrorMethod method, int resamples,
                     std::uint64_t seed);

/// Visibility for which the isotropically mixed state reaches target_in at
/// n settings: solves v*ideal + (1-v)*n*(d-1) = target_in.
double fit_visibility(int d, int n, double target_in);

/// Full pipeline: spectrum -> subspace -> concentration -> noise -> counts
/// -> per-N estimates -> minimum scan. The filter and projection efficiencies
/// scale the count rate multiplicatively.
MinimumScan run_scan_protocol(const SpiralSpectrum& spec, const SubspaceSelection& sel,
                              const NoiseModel& noise, const std::vector<int>& n_range,
                              std::uint64_t seed, ErrorMethod method = ErrorMethod::bootstrap,
                              int resamples = 1000);

/// Same pipeline, also returning the simulated count records per N.
struct ProtocolResult {
    MinimumScan scan;
    std::map<int, CountRecord> counts;
    double effective_rate = 0.0;
};

ProtocolResult run_scan_protocol_detailed(const SpiralSpectrum& spec, const SubspaceSelection& sel,
                                          const NoiseModel& noise, const std::vector<int>& n_range,
                                          std::uint64_t seed,
                                          ErrorMethod method = ErrorMethod::bootstrap,
                                          int resamples = 1000);

}  // namespace qbound
