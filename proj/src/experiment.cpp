#include "qbound/experiment.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

#include "qbound/rng.hpp"

namespace qbound {

std::vector<double> spectrum_amplitudes(const SpiralSpectrum& spec) {
    if (spec.half_width < 0) throw std::invalid_argument("spectrum_amplitudes: negative half width");
    if (spec.decay <= 0.0) throw std::invalid_argument("spectrum_amplitudes: decay must be positive");
    const int L = spec.half_width;
    std::vector<double> c(2 * L + 1);
    double norm2 = 0.0;
    for (int l = -L; l <= L; ++l) {
        double v = 0.0;
        switch (spec.shape) {
            case SpectrumShape::exponential: v = std::exp(-std::abs(l) / spec.decay); break;
            case SpectrumShape::lorentzian: v = 1.0 / (1.0 + (l / spec.decay) * (l / spec.decay)); break;
        }
        c[l + L] = v;
        norm2 += v * v;
    }
    for (double& v : c) v /= std::sqrt(norm2);
    return c;
}

SubspaceSelection default_subspace(int d) {
    switch (d) {
        case 2: return {2, {-2, 2}};
        case 3: return {3, {-3, 0, 3}};
        case 4: return {4, {-4, -1, 1, 4}};
        case 5: return {5, {-2, -1, 0, 1, 2}};
        case 6: return {6, {-3, -2, -1, 1, 2, 3}};
        default: throw std::invalid_argument("default_subspace: no default for this dimension");
    }
}

std::pair<SchmidtState, double> select_subspace(const SpiralSpectrum& spec,
                                                const SubspaceSelection& sel) {
    if (sel.dim < 2 || static_cast<int>(sel.modes.size()) != sel.dim)
        throw std::invalid_argument("select_subspace: need d distinct modes");
    for (std::size_t i = 0; i < sel.modes.size(); ++i)
        for (std::size_t j = i + 1; j < sel.modes.size(); ++j)
            if (sel.modes[i] == sel.modes[j])
                throw std::invalid_argument("select_subspace: duplicate mode");

    const auto c = spectrum_amplitudes(spec);
    const int L = spec.half_width;
    std::vector<double> amps(sel.dim);
    double weight = 0.0;
    for (int j = 0; j < sel.dim; ++j) {
        const int l = sel.modes[j];
        if (l < -L || l > L)
            throw std::invalid_argument("select_subspace: mode outside the spectrum");
        amps[j] = c[l + L];
        weight += amps[j] * amps[j];
    }
    if (weight <= 0.0) throw std::invalid_argument("select_subspace: empty subspace weight");
    for (double& a : amps) a /= std::sqrt(weight);
    return {SchmidtState(sel.dim, std::move(amps)), weight};
}

std::pair<SchmidtState, double> procrustean_concentrate(const SchmidtState& state) {
    double min_amp = state.amps.front();
    for (double a : state.amps) min_amp = std::min(min_amp, a);
    if (min_amp <= 0.0)
        throw std::invalid_argument("procrustean_concentrate: zero amplitude in the subspace");
    const double efficiency = state.dim * min_amp * min_amp;
    return {make_maximally_entangled(state.dim), efficiency};
}

NoiseModel NoiseModel::ideal(int d, double rate_scale) {
    NoiseModel m;
    m.dim = d;
    m.visibility = 1.0;
    m.crosstalk.assign(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i) m.crosstalk[static_cast<std::size_t>(i) * d + i] = 1.0;
    m.rate_scale = rate_scale;
    m.dark_rate = 0.0;
    return m;
}

namespace {

void validate_noise(const NoiseModel& noise, int d) {
    if (noise.dim != d) throw std::invalid_argument("NoiseModel: dimension mismatch");
    if (noise.visibility <= 0.0 || noise.visibility > 1.0)
        throw std::invalid_argument("NoiseModel: visibility must be in (0, 1]");
    if (noise.rate_scale < 0.0 || noise.dark_rate < 0.0)
        throw std::invalid_argument("NoiseModel: rates must be nonnegative");
    if (noise.crosstalk.size() != static_cast<std::size_t>(d) * d)
        throw std::invalid_argument("NoiseModel: crosstalk must be d x d");
    for (int r = 0; r < d; ++r) {
        double sum = 0.0;
        for (int c = 0; c < d; ++c) {
            const double v = noise.crosstalk[static_cast<std::size_t>(r) * d + c];
            if (v < 0.0) throw std::invalid_argument("NoiseModel: negative crosstalk entry");
            sum += v;
        }
        if (std::abs(sum - 1.0) > kTableTol)
            throw std::invalid_argument("NoiseModel: crosstalk rows must sum to 1");
    }
}

}  // namespace

JointTable apply_noise(const JointTable& joint, const NoiseModel& noise) {
    const int d = joint.dim;
    const int n = joint.n_settings;
    validate_noise(noise, d);

    const double v = noise.visibility;
    const double iso = (1.0 - v) / (static_cast<double>(d) * d);
    const auto& k = noise.crosstalk;

    std::vector<double> out(joint.probs.size(), 0.0);
    const std::size_t cells = static_cast<std::size_t>(d) * d;
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const std::size_t off = (static_cast<std::size_t>(a) * n + b) * cells;
            for (int x = 0; x < d; ++x)
                for (int y = 0; y < d; ++y) {
                    const double p = v * joint.probs[off + static_cast<std::size_t>(x) * d + y] + iso;
                    for (int xd = 0; xd < d; ++xd) {
                        const double kx = k[static_cast<std::size_t>(x) * d + xd];
                        if (kx == 0.0) continue;
                        for (int yd = 0; yd < d; ++yd)
                            out[off + static_cast<std::size_t>(xd) * d + yd] +=
                                p * kx * k[static_cast<std::size_t>(y) * d + yd];
                    }
                }
        }
    return JointTable(d, n, std::move(out));
}

std::size_t CountRecord::index(int setting_a, int setting_b, int x, int y) const {
    if (setting_a < 1 || setting_a > n_settings || setting_b < 1 || setting_b > n_settings ||
        x < 0 || x >= dim || y < 0 || y >= dim)
        throw std::out_of_range("CountRecord: index out of range");
    return ((static_cast<std::size_t>(setting_a - 1) * n_settings + (setting_b - 1)) * dim + x) * dim +
           y;
}

long long CountRecord::count(int setting_a, int setting_b, int x, int y) const {
    return counts[index(setting_a, setting_b, x, y)];
}

long long CountRecord::slice_total(int setting_a, int setting_b) const {
    const std::size_t off = index(setting_a, setting_b, 0, 0);
    long long total = 0;
    for (std::size_t i = 0; i < static_cast<std::size_t>(dim) * dim; ++i) total += counts[off + i];
    return total;
}

CountRecord simulate_counts(const JointTable& joint, const NoiseModel& noise, std::uint64_t seed) {
    const int d = joint.dim;
    const int n = joint.n_settings;
    validate_noise(noise, d);
    const JointTable noisy = apply_noise(joint, noise);

    CountRecord rec;
    rec.dim = d;
    rec.n_settings = n;
    rec.counts.assign(static_cast<std::size_t>(n) * n * d * d, 0);

    const double dark_cell = noise.dark_rate / (static_cast<double>(d) * d);
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b) {
            // one independent stream per setting pair so that scheduling
            // cannot change the result
            auto rng = make_engine(derive_seed(seed, a, b));
            for (int x = 0; x < d; ++x)
                for (int y = 0; y < d; ++y) {
                    const double mean = noise.rate_scale * noisy.prob(a, b, x, y) + dark_cell;
                    long long c = 0;
                    if (mean > 0.0) {
                        std::poisson_distribution<long long> poisson(mean);
                        c = poisson(rng);
                    }
                    rec.counts[rec.index(a, b, x, y)] = c;
                }
        }
    return rec;
}

namespace {

JointTable frequency_table(const CountRecord& rec) {
    const int d = rec.dim;
    const int n = rec.n_settings;
    std::vector<double> data(rec.counts.size());
    for (int a = 1; a <= n; ++a)
        for (int b = 1; b <= n; ++b) {
            const long long total = rec.slice_total(a, b);
            if (total <= 0) {
                throw std::invalid_argument("estimate_in: empty (A=" + std::to_string(a) +
                                            ", B=" + std::to_string(b) + ") slice");
            }
            for (int x = 0; x < d; ++x)
                for (int y = 0; y < d; ++y) {
                    const std::size_t i = rec.index(a, b, x, y);
                    data[i] = static_cast<double>(rec.counts[i]) / static_cast<double>(total);
                }
        }
    return JointTable(d, n, std::move(data));
}

// cells of the one slice feeding each chained term, with its modular weights
struct TermSlice {
    int a = 0, b = 0;
    DiffMode mode = DiffMode::x_minus_y;
};

std::vector<TermSlice> term_slices(int n) {
    std::vector<TermSlice> t;
    t.reserve(2 * static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
        t.push_back({i, i, DiffMode::x_minus_y});
        if (i < n)
            t.push_back({i + 1, i, DiffMode::y_minus_x});
        else
            t.push_back({1, n, DiffMode::y_minus_x_shifted});
    }
    return t;
}

int modular_weight(int x, int y, int d, DiffMode mode) {
    int diff = 0;
    switch (mode) {
        case DiffMode::x_minus_y: diff = x - y; break;
        case DiffMode::y_minus_x: diff = y - x; break;
        case DiffMode::y_minus_x_shifted: diff = y - x - 1; break;
    }
    return ((diff % d) + d) % d;
}

double gaussian_std_err(const CountRecord& rec) {
    const int d = rec.dim;
    double var = 0.0;
    for (const auto& term : term_slices(rec.n_settings)) {
        const double total = static_cast<double>(rec.slice_total(term.a, term.b));
        double theta = 0.0;
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y)
                theta += modular_weight(x, y, d, term.mode) * rec.count(term.a, term.b, x, y) / total;
        // independent Poisson cells: Var(theta) = sum n_xy ((w_xy - theta)/T)^2
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y) {
                const double w = modular_weight(x, y, d, term.mode);
                const double dv = (w - theta) / total;
                var += rec.count(term.a, term.b, x, y) * dv * dv;
            }
    }
    return std::sqrt(var);
}

double bootstrap_std_err(const CountRecord& rec, int resamples, std::uint64_t seed) {
    const int n = rec.n_settings;
    std::vector<double> values;
    values.reserve(resamples);
    CountRecord draw = rec;
    for (int r = 0; r < resamples; ++r) {
        auto rng = make_engine(derive_seed(seed, 0xb00, r));
        for (int attempt = 0;; ++attempt) {
            bool ok = true;
            for (std::size_t i = 0; i < rec.counts.size(); ++i) {
                if (rec.counts[i] == 0) {
                    draw.counts[i] = 0;
                    continue;
                }
                std::poisson_distribution<long long> poisson(static_cast<double>(rec.counts[i]));
                draw.counts[i] = poisson(rng);
            }
            for (int a = 1; a <= n && ok; ++a)
                for (int b = 1; b <= n && ok; ++b) ok = draw.slice_total(a, b) > 0;
            if (ok) break;
            if (attempt > 1000)
                throw std::runtime_error("estimate_in: bootstrap cannot repopulate a slice");
        }
        values.push_back(evaluate_in(frequency_table(draw)).value);
    }
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= values.size();
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= (values.size() - 1);
    return std::sqrt(var);
}

}  // namespace

Estimate estimate_in(const CountRecord& counts, ErrorMethod method, int resamples,
                     std::uint64_t seed) {
    Estimate est;
    est.method = method;
    est.value = evaluate_in(frequency_table(counts)).value;
    if (method == ErrorMethod::bootstrap) {
        if (resamples < 100)
            throw std::invalid_argument("estimate_in: bootstrap needs at least 100 resamples");
        est.std_err = bootstrap_std_err(counts, resamples, seed);
    } else {
        est.std_err = gaussian_std_err(counts);
    }
    return est;
}

double fit_visibility(int d, int n, double target_in) {
    const double ceiling = static_cast<double>(n) * (d - 1);  // uniform-table value
    const double ideal = ideal_in(d, n);
    if (target_in <= ideal || target_in >= ceiling)
        throw std::invalid_argument("fit_visibility: target outside (ideal, uniform) range");
    const double v = (ceiling - target_in) / (ceiling - ideal);
    return v;
}

ProtocolResult run_scan_protocol_detailed(const SpiralSpectrum& spec, const SubspaceSelection& sel,
                                          const NoiseModel& noise, const std::vector<int>& n_range,
                                          std::uint64_t seed, ErrorMethod method, int resamples) {
    if (n_range.empty()) throw std::invalid_argument("run_scan_protocol: empty N range");
    auto [projected, weight] = select_subspace(spec, sel);
    auto [state, efficiency] = procrustean_concentrate(projected);

    NoiseModel effective = noise;
    effective.rate_scale = noise.rate_scale * weight * efficiency;

    ProtocolResult result;
    result.effective_rate = effective.rate_scale;
    std::map<int, ScanPoint> scan;
    for (int n : n_range) {
        const SettingsFamily family(sel.dim, n);
        const JointTable joint = born_joint_table(state, family);
        CountRecord counts = simulate_counts(joint, effective, derive_seed(seed, 0x5ca, n));
        const Estimate est = estimate_in(counts, method, resamples, derive_seed(seed, 0xe57, n));
        scan[n] = {est.value, est.std_err};
        result.counts.emplace(n, std::move(counts));
    }
    result.scan = scan_minimum(sel.dim, scan);
    return result;
}

MinimumScan run_scan_protocol(const SpiralSpectrum& spec, const SubspaceSelection& sel,
                              const NoiseModel& noise, const std::vector<int>& n_range,
                              std::uint64_t seed, ErrorMethod method, int resamples) {
    return run_scan_protocol_detailed(spec, sel, noise, n_range, seed, method, resamples).scan;
}

}  // namespace qbound
