// Test-only oracles, kept independent of the library's computation paths:
// the joint tables here are produced by expanding the full bipartite state
// and projector matrices (density-matrix route), not by the library's
// Schmidt-sum shortcut.
#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

using cdouble = std::complex<double>;
inline constexpr double kPi = 3.14159265358979323846;

// entries of one projective outcome vector, re-derived from scratch
inline std::vector<cdouble> phase_vector(int d, double offset, int outcome, double sign) {
    std::vector<cdouble> v(d);
    for (int j = 0; j < d; ++j) {
        const double arg = sign * 2.0 * kPi / d * j * (outcome - offset);
        v[j] = cdouble{std::cos(arg), std::sin(arg)} / std::sqrt(static_cast<double>(d));
    }
    return v;
}

/// P(x, y) = <psi| (|X><X| tensor |Y><Y|) |psi> computed via full d^2 x d^2
/// index contraction over the projector matrices.
inline double joint_prob(const std::vector<double>& amps, int d, double alpha, double beta,
                         int x, int y) {
    const auto a = phase_vector(d, alpha, x, +1.0);
    const auto b = phase_vector(d, beta, y, -1.0);
    // psi[j*d + k] = amps[j] when j == k
    cdouble acc{0.0, 0.0};
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
            for (int jp = 0; jp < d; ++jp)
                for (int kp = 0; kp < d; ++kp) {
                    if (j != k || jp != kp) continue;
                    const cdouble proj_a = a[j] * std::conj(a[jp]);
                    const cdouble proj_b = b[k] * std::conj(b[kp]);
                    acc += amps[j] * proj_a * proj_b * amps[jp];
                }
    return acc.real();
}

/// Chained correlation quantity assembled directly from oracle tables.
inline double chained_value(const std::vector<double>& amps, int d, int n) {
    std::vector<double> alpha(n), beta(n);
    for (int s = 1; s <= n; ++s) {
        alpha[s - 1] = (s - 0.5) / n;
        beta[s - 1] = static_cast<double>(s) / n;
    }
    auto mod = [d](int v) { return ((v % d) + d) % d; };
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y)
                total += mod(x - y) * joint_prob(amps, d, alpha[i], beta[i], x, y);
        const bool wrap = i + 1 == n;
        const double a_next = wrap ? alpha[0] : alpha[i + 1];
        for (int x = 0; x < d; ++x)
            for (int y = 0; y < d; ++y)
                total += mod(y - x - (wrap ? 1 : 0)) * joint_prob(amps, d, a_next, beta[i], x, y);
    }
    return total;
}

/// d = 2 closed form 2N sin^2(pi / 4N), validated against chained_value.
inline double closed_form_d2(int n) {
    const double s = std::sin(kPi / (4.0 * n));
    return 2.0 * n * s * s;
}

}  // namespace oracle
