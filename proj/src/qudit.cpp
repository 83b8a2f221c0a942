#include "qbound/qudit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qbound {

SchmidtState::SchmidtState(int d, std::vector<double> amplitudes)
    : dim(d), amps(std::move(amplitudes)) {
    if (dim < 2) throw std::invalid_argument("SchmidtState: dimension must be >= 2");
    if (static_cast<int>(amps.size()) != dim)
        throw std::invalid_argument("SchmidtState: expected " + std::to_string(dim) + " amplitudes");
    double norm2 = 0.0;
    for (double a : amps) {
        if (a < 0.0) throw std::invalid_argument("SchmidtState: amplitudes must be nonnegative");
        norm2 += a * a;
    }
    if (std::abs(norm2 - 1.0) > 1e-10)
        throw std::invalid_argument("SchmidtState: amplitudes are not normalized");
    // Snap to exact unit norm; construction tolerance is 1e-12 downstream.
    const double scale = 1.0 / std::sqrt(norm2);
    for (double& a : amps) a *= scale;
}

SchmidtState make_maximally_entangled(int d) {
    if (d < 2) throw std::invalid_argument("make_maximally_entangled: dimension must be >= 2");
    return SchmidtState(d, std::vector<double>(d, 1.0 / std::sqrt(static_cast<double>(d))));
}

SettingsFamily::SettingsFamily(int d, int n) : dim(d), n_settings(n) {
    if (dim < 2) throw std::invalid_argument("SettingsFamily: dimension must be >= 2");
    if (n_settings < 1) throw std::invalid_argument("SettingsFamily: need at least one setting");
    alpha.resize(n_settings);
    beta.resize(n_settings);
    for (int s = 1; s <= n_settings; ++s) {
        alpha[s - 1] = (s - 0.5) / n_settings;
        beta[s - 1] = static_cast<double>(s) / n_settings;
    }
}

MeasurementVector projector_vector(Party party, const SettingsFamily& family, int setting, int outcome) {
    if (setting < 1 || setting > family.n_settings)
        throw std::out_of_range("projector_vector: setting out of range");
    if (outcome < 0 || outcome >= family.dim)
        throw std::out_of_range("projector_vector: outcome out of range");

    const int d = family.dim;
    const double offset =
        party == Party::alice ? family.alpha[setting - 1] : family.beta[setting - 1];
    const double sign = party == Party::alice ? 1.0 : -1.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(d));

    MeasurementVector v;
    v.dim = d;
    v.entries.resize(d);
    for (int j = 0; j < d; ++j) {
        const double phase = sign * 2.0 * std::numbers::pi / d * j * (outcome - offset);
        v.entries[j] = cdouble{scale * std::cos(phase), scale * std::sin(phase)};
    }
    return v;
}

JointTable::JointTable(int d, int n, std::vector<double> data)
    : dim(d), n_settings(n), probs(std::move(data)) {
    if (dim < 2 || n_settings < 1) throw std::invalid_argument("JointTable: bad dimensions");
    const std::size_t expected =
        static_cast<std::size_t>(n_settings) * n_settings * dim * dim;
    if (probs.size() != expected) throw std::invalid_argument("JointTable: wrong table size");

    const std::size_t cells = static_cast<std::size_t>(dim) * dim;
    for (int a = 0; a < n_settings; ++a) {
        for (int b = 0; b < n_settings; ++b) {
            double* slice = probs.data() + (static_cast<std::size_t>(a) * n_settings + b) * cells;
            double sum = 0.0;
            for (std::size_t i = 0; i < cells; ++i) {
                if (slice[i] < -kTableTol)
                    throw std::invalid_argument("JointTable: negative probability beyond tolerance");
                if (slice[i] < 0.0) slice[i] = 0.0;
                sum += slice[i];
            }
            if (std::abs(sum - 1.0) > kTableTol)
                throw std::invalid_argument("JointTable: slice is not normalized");
            for (std::size_t i = 0; i < cells; ++i) slice[i] /= sum;
        }
    }
}

std::size_t JointTable::slice_offset(int setting_a, int setting_b) const {
    if (setting_a < 1 || setting_a > n_settings || setting_b < 1 || setting_b > n_settings)
        throw std::out_of_range("JointTable: setting out of range");
    return (static_cast<std::size_t>(setting_a - 1) * n_settings + (setting_b - 1)) *
           static_cast<std::size_t>(dim) * dim;
}

double JointTable::prob(int setting_a, int setting_b, int x, int y) const {
    if (x < 0 || x >= dim || y < 0 || y >= dim)
        throw std::out_of_range("JointTable: outcome out of range");
    return probs[slice_offset(setting_a, setting_b) + static_cast<std::size_t>(x) * dim + y];
}

std::span<const double> JointTable::slice(int setting_a, int setting_b) const {
    return {probs.data() + slice_offset(setting_a, setting_b),
            static_cast<std::size_t>(dim) * dim};
}

JointTable born_joint_table(const SchmidtState& state, const SettingsFamily& family) {
    if (state.dim != family.dim)
        throw std::invalid_argument("born_joint_table: state and family dimensions differ");

    const int d = state.dim;
    const int n = family.n_settings;

    // Cache projector vectors: one per (party, setting, outcome).
    std::vector<MeasurementVector> alice(static_cast<std::size_t>(n) * d);
    std::vector<MeasurementVector> bob(static_cast<std::size_t>(n) * d);
    for (int s = 1; s <= n; ++s) {
        for (int o = 0; o < d; ++o) {
            alice[static_cast<std::size_t>(s - 1) * d + o] =
                projector_vector(Party::alice, family, s, o);
            bob[static_cast<std::size_t>(s - 1) * d + o] =
                projector_vector(Party::bob, family, s, o);
        }
    }

    std::vector<double> data(static_cast<std::size_t>(n) * n * d * d);
    std::size_t idx = 0;
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            for (int x = 0; x < d; ++x) {
                const auto& va = alice[static_cast<std::size_t>(a) * d + x].entries;
                for (int y = 0; y < d; ++y) {
                    const auto& vb = bob[static_cast<std::size_t>(b) * d + y].entries;
                    cdouble amp{0.0, 0.0};
                    for (int j = 0; j < d; ++j)
                        amp += state.amps[j] * std::conj(va[j]) * std::conj(vb[j]);
                    data[idx++] = std::norm(amp);
                }
            }
        }
    }
    return JointTable(d, n, std::move(data));
}

}  // namespace qbound
