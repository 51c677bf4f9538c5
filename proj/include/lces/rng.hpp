#pragma once

#include <cstdint>
#include <cmath>

#include "lces/specfun.hpp"

// Deterministic, splittable random number generation. Every stochastic
// routine in the library takes an explicit RngStream so that runs are
// reproducible bit-for-bit and replicas can be seeded independently
// (replica i uses mix_seed(seed, i)), which keeps parallel execution
// schedule-independent.

namespace lces {

// splitmix64 finalizer: bijective 64-bit mixer with good avalanche.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive an independent stream seed from a base seed and a stream key.
constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) {
    const std::uint64_t golden = 0x9e3779b97f4a7c15ULL;
    return mix64(mix64(seed + golden * (2 * key + 1)) + golden);
}

class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform on the open interval (0,1): 53-bit mantissa offset by half an ulp,
    // so downstream quantile transforms never see 0 or 1.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Standard normal via quantile inversion (keeps the draw count per
    // variate fixed at one, which makes streams easy to reason about).
    double normal() { return specfun::normal_quantile(uniform01()); }

    // Gamma(shape, 1) by Marsaglia-Tsang squeeze; shape < 1 handled by the
    // boost Gamma(a) = Gamma(a+1) * U^{1/a}.
    double gamma(double shape) {
        if (shape <= 0.0)
            throw std::domain_error("RngStream::gamma: shape must be positive");
        if (shape < 1.0) {
            const double u = uniform01();
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform01();
            if (u < 1.0 - 0.0331 * x * x * x * x)
                return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
                return d * v;
        }
    }

    double chi_square(double dof) { return 2.0 * gamma(0.5 * dof); }

    // Independent child stream keyed off the current state.
    RngStream split(std::uint64_t key) const { return RngStream(mix_seed(state_, key)); }

private:
    std::uint64_t state_;
};

} // namespace lces
