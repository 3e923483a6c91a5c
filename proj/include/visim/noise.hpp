#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <utility>

namespace visim {

/// splitmix64 finalizer; stateless hashing for seeded per-item draws.
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return mix64(mix64(mix64(seed) ^ a) ^ (b * 0xd6e8feb86659fd93ULL));
}

/// Uniform double in [0, 1) from the top 53 bits.
constexpr double unit_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Small deterministic stream; identical sequence on every platform.
class SeededStream {
public:
    explicit constexpr SeededStream(std::uint64_t seed) : state_(seed) {}

    constexpr std::uint64_t next() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    constexpr double uniform() { return unit_from_bits(next()); }
    constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

/// Permutation for gradient noise, built from the seed by a Fisher-Yates
/// shuffle of 0..255 driven by SeededStream(seed), `j = next() % (i + 1)`.
class PerlinTable {
public:
    explicit PerlinTable(std::uint64_t seed) {
        std::array<int, 256> p{};
        for (int i = 0; i < 256; ++i) p[i] = i;
        SeededStream rng(seed);
        for (int i = 255; i > 0; --i) {
            const int j = static_cast<int>(rng.next() % static_cast<std::uint64_t>(i + 1));
            std::swap(p[i], p[j]);
        }
        for (int i = 0; i < 512; ++i) perm_[i] = p[i & 255];
    }

    /// Improved gradient noise; exactly 0 on integer lattice points.
    double noise(double x, double y, double z) const {
        const double fx = std::floor(x), fy = std::floor(y), fz = std::floor(z);
        const int X = static_cast<int>(static_cast<std::int64_t>(fx) & 255);
        const int Y = static_cast<int>(static_cast<std::int64_t>(fy) & 255);
        const int Z = static_cast<int>(static_cast<std::int64_t>(fz) & 255);
        x -= fx;
        y -= fy;
        z -= fz;
        const double u = fade(x), v = fade(y), w = fade(z);
        const int A = perm_[X] + Y, AA = perm_[A] + Z, AB = perm_[A + 1] + Z;
        const int B = perm_[X + 1] + Y, BA = perm_[B] + Z, BB = perm_[B + 1] + Z;
        return lerp(w,
                    lerp(v, lerp(u, grad(perm_[AA], x, y, z), grad(perm_[BA], x - 1, y, z)),
                         lerp(u, grad(perm_[AB], x, y - 1, z), grad(perm_[BB], x - 1, y - 1, z))),
                    lerp(v,
                         lerp(u, grad(perm_[AA + 1], x, y, z - 1),
                              grad(perm_[BA + 1], x - 1, y, z - 1)),
                         lerp(u, grad(perm_[AB + 1], x, y - 1, z - 1),
                              grad(perm_[BB + 1], x - 1, y - 1, z - 1))));
    }

private:
    static double fade(double t) { return t * t * t * (t * (t * 6 - 15) + 10); }
    static double lerp(double t, double a, double b) { return a + t * (b - a); }
    static double grad(int hash, double x, double y, double z) {
        const int h = hash & 15;
        const double u = h < 8 ? x : y;
        const double v = h < 4 ? y : (h == 12 || h == 14 ? x : z);
        return ((h & 1) == 0 ? u : -u) + ((h & 2) == 0 ? v : -v);
    }

    std::array<int, 512> perm_{};
};

/// Seeded fractal gradient noise over normalized coordinates.
struct NoiseField {
    std::uint64_t seed = 0;
    int octaves = 1;
    double base_frequency = 8.0;
};

/// Evaluates a NoiseField; caches the permutation table for its seed.
class NoiseSampler {
public:
    explicit NoiseSampler(const NoiseField& field)
        : field_(field), table_(std::make_shared<PerlinTable>(field.seed)) {}

    NoiseSampler(const NoiseField& field, std::shared_ptr<const PerlinTable> table)
        : field_(field), table_(std::move(table)) {}

    double operator()(double x, double y, double t) const {
        double sum = 0.0, norm = 0.0, amp = 1.0, freq = field_.base_frequency;
        for (int o = 0; o < std::max(1, field_.octaves); ++o) {
            sum += amp * table_->noise(x * freq, y * freq, t);
            norm += amp;
            amp *= 0.5;
            freq *= 2.0;
        }
        const double v = sum / norm;
        return v < -1.0 ? -1.0 : (v > 1.0 ? 1.0 : v);
    }

    const NoiseField& field() const noexcept { return field_; }

private:
    NoiseField field_;
    std::shared_ptr<const PerlinTable> table_;
};

/// Deterministic gradient noise in [-1, 1]; t offsets the domain for animation.
inline double perlin(const NoiseField& field, double x, double y, double t) {
    return NoiseSampler(field)(x, y, t);
}

}  // namespace visim
