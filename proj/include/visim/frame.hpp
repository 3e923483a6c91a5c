#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace visim {

/// Raised for any out-of-range or non-finite shader / kernel parameter.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct Rgb {
    float r = 0.0f;
    float g = 0.0f;
    float b = 0.0f;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline float clamp01(float v) { return v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v); }
inline double clamp01(double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); }

/// Exact at t = 0 and t = 1.
inline float lerp(float a, float b, float t) { return a * (1.0f - t) + b * t; }

inline Rgb lerp(const Rgb& a, const Rgb& b, float t) {
    return {lerp(a.r, b.r, t), lerp(a.g, b.g, t), lerp(a.b, b.b, t)};
}

inline Rgb clamp01(const Rgb& c) { return {clamp01(c.r), clamp01(c.g), clamp01(c.b)}; }

/// Row-major raster of linear-light RGB triples, interleaved as r,g,b floats.
class Frame {
public:
    Frame() = default;

    Frame(int width, int height, Rgb fill = {})
        : width_(width), height_(height) {
        if (width < 1 || height < 1)
            throw ParameterError("frame dimensions must be at least 1x1, got " +
                                 std::to_string(width) + "x" + std::to_string(height));
        data_.resize(static_cast<std::size_t>(width) * height * 3);
        if (fill == Rgb{}) return;
        for (std::size_t i = 0; i < data_.size(); i += 3) {
            data_[i] = fill.r;
            data_[i + 1] = fill.g;
            data_[i + 2] = fill.b;
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t pixel_count() const noexcept { return static_cast<std::size_t>(width_) * height_; }
    bool empty() const noexcept { return data_.empty(); }

    Rgb at(int x, int y) const noexcept {
        const float* p = &data_[index(x, y)];
        return {p[0], p[1], p[2]};
    }

    /// Clamp-to-edge read.
    Rgb at_clamped(int x, int y) const noexcept {
        return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
    }

    void set(int x, int y, const Rgb& c) noexcept {
        float* p = &data_[index(x, y)];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    }

    std::span<float> row(int y) noexcept {
        return {data_.data() + index(0, y), static_cast<std::size_t>(width_) * 3};
    }
    std::span<const float> row(int y) const noexcept {
        return {data_.data() + index(0, y), static_cast<std::size_t>(width_) * 3};
    }

    std::span<float> values() noexcept { return data_; }
    std::span<const float> values() const noexcept { return data_; }

    void clamp_values() noexcept {
        for (float& v : data_) v = clamp01(v);
    }

    friend bool operator==(const Frame&, const Frame&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return (static_cast<std::size_t>(y) * width_ + x) * 3;
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<float> data_;
};

/// Physical viewing setup; converts visual angle to screen pixels.
struct ViewingGeometry {
    int screen_width_px = 2560;
    int screen_height_px = 1440;
    double pixel_pitch = 0.000233;   // meters per pixel (27" 2560x1440)
    double viewing_distance = 0.60;  // meters

    void check() const {
        if (!(screen_width_px > 0 && screen_height_px > 0 && pixel_pitch > 0.0 &&
              viewing_distance > 0.0 && std::isfinite(pixel_pitch) &&
              std::isfinite(viewing_distance)))
            throw ParameterError("viewing geometry fields must all be positive and finite");
    }
};

/// Pixels subtending one degree of visual angle at the screen center.
inline double pixels_per_degree(const ViewingGeometry& g) {
    g.check();
    const double half_degree = 0.5 * std::numbers::pi / 180.0;
    return 2.0 * g.viewing_distance * std::tan(half_degree) / g.pixel_pitch;
}

/// Euclidean length without hypot's overflow guards; cheap in per-pixel loops.
inline double length(double x, double y) { return std::sqrt(x * x + y * y); }

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

}  // namespace visim
