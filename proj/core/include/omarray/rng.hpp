#pragma once

#include <cmath>
#include <complex>
#include <cstdint>

namespace omarray {

// Counter-based noise. Every random number is a pure function of
// (seed, realization, step, site, field), so trajectories are reproducible
// bit for bit no matter how work is scheduled across threads, and a
// resumed run regenerates exactly the sequence it would have seen.
// std::normal_distribution is implementation-defined and is not used.

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline uint64_t noise_counter(uint64_t seed, uint64_t realization, uint64_t step,
                              uint64_t site, uint64_t field) {
    uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ realization);
    h = splitmix64(h ^ step);
    h = splitmix64(h ^ site);
    h = splitmix64(h ^ field);
    return h;
}

// Box-Muller on top of the counter hash. u1 is kept in (0,1] so the log is finite.
struct GaussPair {
    double z1, z2;
};

inline GaussPair gauss_pair(uint64_t seed, uint64_t realization, uint64_t step,
                            uint64_t site, uint64_t field) {
    const uint64_t h1 = noise_counter(seed, realization, step, site, field);
    const uint64_t h2 = splitmix64(h1);
    const double u1 = static_cast<double>((h1 >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
    const double rad = std::sqrt(-2.0 * std::log(u1));
    const double ang = 2.0 * M_PI * u2;
    return {rad * std::cos(ang), rad * std::sin(ang)};
}

// One standard normal (second Box-Muller output discarded).
inline double gauss(uint64_t seed, uint64_t realization, uint64_t step,
                    uint64_t site, uint64_t field) {
    return gauss_pair(seed, realization, step, site, field).z1;
}

// Standard complex normal: <xi> = 0, <|xi|^2> = 1, <xi^2> = 0.
// Discrete white noise with <xi(t) xi*(t')> = delta(t-t') is this divided by sqrt(dt).
inline std::complex<double> cgauss(uint64_t seed, uint64_t realization, uint64_t step,
                                   uint64_t site, uint64_t field) {
    const GaussPair g = gauss_pair(seed, realization, step, site, field);
    return {g.z1 * M_SQRT1_2, g.z2 * M_SQRT1_2};
}

// Two independent uniforms, u1 in (0,1] and u2 in [0,1), for seeding tasks
// that want magnitudes and angles rather than normals.
struct UniformPair {
    double u1, u2;
};

inline UniformPair uniform_pair(uint64_t seed, uint64_t realization, uint64_t step,
                                uint64_t site, uint64_t field) {
    const uint64_t h1 = noise_counter(seed, realization, step, site, field);
    const uint64_t h2 = splitmix64(h1);
    const double u1 = static_cast<double>((h1 >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
    return {u1, u2};
}

} // namespace omarray
