#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace seisflat {

// Error taxonomy. validation_error maps to CLI exit code 1, numeric_error
// (and its subclasses) to exit code 2.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class validation_error : public error {
public:
    using error::error;
};

class dimension_error : public validation_error {
public:
    using validation_error::validation_error;
};

class format_error : public validation_error {
public:
    using validation_error::validation_error;
};

class config_error : public validation_error {
public:
    using validation_error::validation_error;
};

class deformation_error : public validation_error {
public:
    using validation_error::validation_error;
};

// Parameters outside the hypothesis of the stability bound.
class hypothesis_error : public validation_error {
public:
    using validation_error::validation_error;
};

class numeric_error : public error {
public:
    using error::error;
};

class degenerate_error : public numeric_error {
public:
    using numeric_error::numeric_error;
};

// ---------------------------------------------------------------------------
// Deterministic RNG: splitmix64.
//
// The k-th draw of stream `seed` is mix64(seed + (k+1)*golden64). Counter
// addressing makes every consumer order-independent, so seeded outputs are
// bit-stable no matter how loops are arranged.
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t golden64 = 0x9E3779B97F4A7C15ull;

[[nodiscard]] constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

[[nodiscard]] constexpr std::uint64_t splitmix_at(std::uint64_t seed, std::uint64_t k) {
    return mix64(seed + (k + 1) * golden64);
}

// Map 64 random bits to (0, 1]; never returns 0, so log() is safe.
[[nodiscard]] inline double unit_open(std::uint64_t bits) {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

// Standard normal draw for counter `k` of stream `seed` (Box-Muller).
[[nodiscard]] inline double gaussian_at(std::uint64_t seed, std::uint64_t k) {
    const double u1 = unit_open(splitmix_at(seed, 2 * k));
    const double u2 = unit_open(splitmix_at(seed, 2 * k + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Small sequential generator for seeded start vectors.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        state_ += golden64;
        return mix64(state_);
    }

    double next_unit() { return unit_open(next()); }

    double next_gauss() {
        const double u1 = next_unit();
        const double u2 = next_unit();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t state_;
};

}  // namespace seisflat
