#pragma once

#include <cstdint>
#include <random>

namespace qbound {

/// splitmix64 step; used to derive independent stream seeds from a master
/// seed so that parallel work items stay reproducible regardless of order.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed for the sub-stream identified by (tag_a, tag_b).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t tag_a, std::uint64_t tag_b = 0) {
    std::uint64_t s = master ^ (0x517cc1b727220a95ULL * (tag_a + 1)) ^ (0x2545f4914f6cdd1dULL * (tag_b + 1));
    return splitmix64(s);
}

inline std::mt19937_64 make_engine(std::uint64_t seed) {
    return std::mt19937_64{seed};
}

struct Vec3 {
    double x = 0, y = 0, z = 0;
    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
};

/// Uniform point on the unit sphere (uniform azimuth, uniform cos-polar).
inline Vec3 random_unit_vector(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double cos_theta = 2.0 * unit(rng) - 1.0;
    const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
    const double phi = 2.0 * 3.14159265358979323846 * unit(rng);
    return {sin_theta * std::cos(phi), sin_theta * std::sin(phi), cos_theta};
}

}  // namespace qbound
