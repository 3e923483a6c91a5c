#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>

#include "visim/frame.hpp"

namespace visim {

// Rec.709 / sRGB primaries.
inline constexpr float kLumaR = 0.2126f;
inline constexpr float kLumaG = 0.7152f;
inline constexpr float kLumaB = 0.0722f;

inline float luminance(const Rgb& c) { return kLumaR * c.r + kLumaG * c.g + kLumaB * c.b; }

inline double srgb_to_linear(double v) {
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

inline double linear_to_srgb(double v) {
    v = clamp01(v);
    return v <= 0.0031308 ? v * 12.92 : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

namespace detail {
inline const std::array<float, 256>& srgb8_decode_table() {
    static const std::array<float, 256> table = [] {
        std::array<float, 256> t{};
        for (int i = 0; i < 256; ++i) t[i] = static_cast<float>(srgb_to_linear(i / 255.0));
        return t;
    }();
    return table;
}
}  // namespace detail

inline float srgb8_to_linear(std::uint8_t v) { return detail::srgb8_decode_table()[v]; }

namespace detail {
// Linear-light values at the midpoints between adjacent 8-bit sRGB codes.
inline const std::array<double, 255>& srgb8_encode_thresholds() {
    static const std::array<double, 255> table = [] {
        std::array<double, 255> t{};
        for (int i = 0; i < 255; ++i) t[i] = srgb_to_linear((i + 0.5) / 255.0);
        return t;
    }();
    return table;
}
}  // namespace detail

/// Nearest 8-bit sRGB code; srgb8_to_linear followed by this is the identity.
inline std::uint8_t linear_to_srgb8(float v) {
    const auto& t = detail::srgb8_encode_thresholds();
    const double x = static_cast<double>(v);
    int lo = 0, hi = 255;  // answer = number of thresholds <= x
    while (lo < hi) {
        const int mid = (lo + hi) / 2;
        if (t[mid] <= x) lo = mid + 1;
        else hi = mid;
    }
    return static_cast<std::uint8_t>(lo);
}

/// Fully saturated color for a hue in turns (1.0 = 360 degrees).
inline Rgb hue_color(double turns) {
    double h = turns - std::floor(turns);
    h *= 6.0;
    const int sector = static_cast<int>(h) % 6;
    const float f = static_cast<float>(h - std::floor(h));
    switch (sector) {
        case 0: return {1.0f, f, 0.0f};
        case 1: return {1.0f - f, 1.0f, 0.0f};
        case 2: return {0.0f, 1.0f, f};
        case 3: return {0.0f, 1.0f - f, 1.0f};
        case 4: return {f, 0.0f, 1.0f};
        default: return {1.0f, 0.0f, 1.0f - f};
    }
}

/// Rotation of a color about the gray axis by `turns` of a full circle.
inline Rgb rotate_hue(const Rgb& c, double turns) {
    const double angle = turns * 2.0 * std::numbers::pi;
    const float cs = static_cast<float>(std::cos(angle));
    const float sn = static_cast<float>(std::sin(angle));
    const float k = (1.0f - cs) / 3.0f;
    const float s3 = sn * 0.57735026919f;
    const float a = cs + k;
    const float b = k - s3;
    const float d = k + s3;
    return {a * c.r + b * c.g + d * c.b,
            d * c.r + a * c.g + b * c.b,
            b * c.r + d * c.g + a * c.b};
}

}  // namespace visim
