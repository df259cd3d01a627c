#pragma once
// Deterministic random streams. Every draw in the toolkit flows through
// these helpers so results depend only on the seeds written in configs,
// never on platform distributions or evaluation order.

#include <cmath>
#include <cstdint>

namespace divkit {

// splitmix64 output function (Vigna). Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Key derivation: hash-combine two words into a stream key. Used to build
// counter-based streams such as (seed, demand_index) or (seed, trial, tag).
inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b) {
    return mix64(a ^ mix64(b));
}

inline std::uint64_t mix_key(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
    return mix_key(mix_key(a, b), c);
}

// Domain tags keep unrelated streams derived from one seed decorrelated.
namespace rng_tag {
inline constexpr std::uint64_t split    = 0x53504c4954ULL;  // "SPLIT"
inline constexpr std::uint64_t init     = 0x494e4954ULL;    // "INIT"
inline constexpr std::uint64_t gen      = 0x47454eULL;      // "GEN"
inline constexpr std::uint64_t stage    = 0x5354414745ULL;  // "STAGE"
inline constexpr std::uint64_t version  = 0x56455253ULL;    // "VERS"
inline constexpr std::uint64_t pairs    = 0x50414952ULL;    // "PAIR"
inline constexpr std::uint64_t channel  = 0x4348414eULL;    // "CHAN"
}  // namespace rng_tag

// Sequential splitmix64 generator. Cheap to construct, so the idiom is one
// Rng per independent unit of work (per demand, per version, per trial).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // Uniform in [0, 1), 53 bits of precision.
    double next_unit() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform in (0, 1]; safe as a log() argument.
    double next_unit_open() {
        return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
    }

    // Uniform integer in [0, n). Lemire multiply-shift.
    std::uint64_t next_below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller; consumes exactly two uniforms.
    double next_gaussian() {
        double u1 = next_unit_open();
        double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    bool next_bernoulli(double p) { return next_unit() < p; }

private:
    std::uint64_t state_;
};

}  // namespace divkit
