#pragma once

#include <cstdint>
#include <random>

#include "akbest/common.hpp"

namespace akbest {

/// Counter-style random stream: a (seed, stream id) pair fully determines the
/// draw sequence, bit-exactly, on every platform. Monte-Carlo trial i uses
/// stream id i, so results never depend on how trials are scheduled across
/// worker threads.
///
/// All floating-point draws are derived from raw mt19937_64 output (whose
/// sequence the standard pins down exactly); none of the distribution adaptors
/// from <random> are used because their algorithms are implementation-defined.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream)
        : engine_(mix(mix(seed ^ 0x243f6a8885a308d3ull) ^ mix(stream))) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; generates pairs, caches the spare.
    double gauss() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        // u1 in (0, 1] so the log is finite.
        const double u1 = 1.0 - uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

    /// Circularly-symmetric complex normal with E|v|^2 == 1.
    cplx cgauss() {
        const double re = gauss();
        const double im = gauss();
        return cplx(re * 0.70710678118654752440, im * 0.70710678118654752440);
    }

private:
    static std::uint64_t mix(std::uint64_t x) {
        // splitmix64 finalizer
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace akbest
