#include "qbound/hv.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qbound/rng.hpp"

namespace qbound {

namespace {

int mod_d(int v, int d) { return ((v % d) + d) % d; }

void validate_strategy(const DeterministicStrategy& s) {
    if (s.dim < 2 || s.n_settings < 1)
        throw std::invalid_argument("DeterministicStrategy: bad dimensions");
    if (static_cast<int>(s.alice_map.size()) != s.n_settings ||
        static_cast<int>(s.bob_map.size()) != s.n_settings)
        throw std::invalid_argument("DeterministicStrategy: map size mismatch");
    for (int o : s.alice_map)
        if (o < 0 || o >= s.dim) throw std::invalid_argument("DeterministicStrategy: outcome out of range");
    for (int o : s.bob_map)
        if (o < 0 || o >= s.dim) throw std::invalid_argument("DeterministicStrategy: outcome out of range");
}

long long strategy_in_int(const DeterministicStrategy& s) {
    const int d = s.dim;
    const int n = s.n_settings;
    long long total = 0;
    for (int i = 0; i < n; ++i) {
        total += mod_d(s.alice_map[i] - s.bob_map[i], d);
        // the chain closes on Alice's first output relabeled by +1
        const int next = i + 1 < n ? s.alice_map[i + 1] : s.alice_map[0] + 1;
        total += mod_d(s.bob_map[i] - next, d);
    }
    return total;
}

}  // namespace

double strategy_in(const DeterministicStrategy& s) {
    validate_strategy(s);
    return static_cast<double>(strategy_in_int(s));
}

BoundReport bell_bound_analytic(int d) {
    if (d < 2) throw std::invalid_argument("bell_bound_analytic: dimension must be >= 2");
    return {BoundModel::bell, d, 0, 8.0 * (d - 1) / (static_cast<double>(d) * d * d),
            BoundKind::analytic};
}

BoundReport bell_bound_bruteforce(int d, int n) {
    if (d < 2 || n < 1) throw std::invalid_argument("bell_bound_bruteforce: bad arguments");
    double count = std::pow(static_cast<double>(d), 2.0 * n);
    if (count > 1e7) throw std::length_error("bell_bound_bruteforce: more than 10^7 strategies");

    DeterministicStrategy s;
    s.dim = d;
    s.n_settings = n;
    s.alice_map.assign(n, 0);
    s.bob_map.assign(n, 0);

    long long best = strategy_in_int(s);
    // odometer over (alice_map, bob_map), lexicographic with bob fastest
    auto advance = [&]() -> bool {
        for (int i = 2 * n - 1; i >= 0; --i) {
            int& digit = i < n ? s.alice_map[i] : s.bob_map[i - n];
            if (++digit < d) return true;
            digit = 0;
        }
        return false;
    };
    while (advance()) {
        const long long v = strategy_in_int(s);
        if (v < best) best = v;
    }
    return {BoundModel::bell, d, n, static_cast<double>(best), BoundKind::brute_force};
}

double mixture_in(const std::vector<std::pair<DeterministicStrategy, double>>& mixture) {
    if (mixture.empty()) throw std::invalid_argument("mixture_in: empty mixture");
    const int d = mixture.front().first.dim;
    const int n = mixture.front().first.n_settings;

    double weight_sum = 0.0;
    for (const auto& [s, w] : mixture) {
        validate_strategy(s);
        if (s.dim != d || s.n_settings != n)
            throw std::invalid_argument("mixture_in: inconsistent strategy shapes");
        if (w < 0.0) throw std::invalid_argument("mixture_in: negative weight");
        weight_sum += w;
    }
    if (std::abs(weight_sum - 1.0) > 1e-9)
        throw std::invalid_argument("mixture_in: weights must sum to 1");

    // route 1: weighted sum of per-strategy values
    double weighted = 0.0;
    for (const auto& [s, w] : mixture) weighted += w * strategy_in_int(s);

    // route 2: I_N of the mixed conditional table
    std::vector<double> data(static_cast<std::size_t>(n) * n * d * d, 0.0);
    const std::size_t cells = static_cast<std::size_t>(d) * d;
    for (const auto& [s, w] : mixture) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                data[(static_cast<std::size_t>(a) * n + b) * cells +
                     static_cast<std::size_t>(s.alice_map[a]) * d + s.bob_map[b]] += w;
    }
    const double mixed = evaluate_in(JointTable(d, n, std::move(data))).value;

    if (std::abs(mixed - weighted) > 1e-12)
        throw std::logic_error("mixture_in: linearity check failed");
    return mixed;
}

BoundReport leggett_bound(const LeggettConfig& cfg) {
    if (cfg.n_settings < 1) throw std::invalid_argument("leggett_bound: need at least one setting");
    const double c = std::cos(std::numbers::pi / (2.0 * cfg.n_settings));
    double bound = 0.0;
    switch (cfg.u_model) {
        case LeggettU::fixed_in_plane: bound = c; break;
        case LeggettU::two_orthogonal_planes: bound = c / std::sqrt(2.0); break;
        case LeggettU::uniform_sphere: bound = 0.5; break;
    }
    return {BoundModel::leggett, 2, cfg.n_settings, bound, BoundKind::analytic};
}

double mean_abs_dot_mc(long samples, std::uint64_t seed, SphereDraw draw) {
    if (samples < 1) throw std::invalid_argument("mean_abs_dot_mc: need at least one sample");
    if (draw == SphereDraw::uniform && samples < 10000)
        throw std::invalid_argument("mean_abs_dot_mc: uniform-sphere estimate needs >= 10^4 samples");
    const Vec3 a{0.0, 0.0, 1.0};
    auto rng = make_engine(seed);
    double acc = 0.0;
    for (long i = 0; i < samples; ++i) {
        Vec3 u;
        switch (draw) {
            case SphereDraw::uniform: u = random_unit_vector(rng); break;
            case SphereDraw::aligned: u = a; break;
            case SphereDraw::orthogonal: u = {1.0, 0.0, 0.0}; break;
        }
        acc += std::abs(a.dot(u));
    }
    return acc / static_cast<double>(samples);
}

double violation_margin(double i_star, double std_err, const BoundReport& bound) {
    if (std_err <= 0.0) throw std::invalid_argument("violation_margin: std_err must be positive");
    return (bound.bound - i_star) / std_err;
}

}  // namespace qbound
