#pragma once

#include <algorithm>
#include <cstdint>

#include "visim/frame.hpp"

namespace visim {

/// Everything gaze-contingent or temporal shaders may read besides the frame.
struct RenderContext {
    Vec2 gaze;             // pixel coordinates
    double time = 0.0;     // seconds since session start
    ViewingGeometry geometry;
    std::uint64_t seed = 0;

    /// Gaze clamped into the frame's pixel bounds.
    Vec2 gaze_in(const Frame& f) const {
        return {std::clamp(gaze.x, 0.0, static_cast<double>(f.width() - 1)),
                std::clamp(gaze.y, 0.0, static_cast<double>(f.height() - 1))};
    }
};

/// Context with gaze given in normalized [0,1]^2 screen coordinates.
inline RenderContext context_for(const Frame& f, Vec2 gaze_normalized, double time,
                                 std::uint64_t seed, const ViewingGeometry& geometry = {}) {
    RenderContext ctx;
    ctx.gaze = {std::clamp(gaze_normalized.x, 0.0, 1.0) * (f.width() - 1),
                std::clamp(gaze_normalized.y, 0.0, 1.0) * (f.height() - 1)};
    ctx.time = time;
    ctx.geometry = geometry;
    ctx.seed = seed;
    return ctx;
}

/// Pixel length corresponding to a "full-screen" size of 1.0.
inline double full_screen_px(const Frame& f) { return static_cast<double>(std::max(f.width(), f.height())); }

}  // namespace visim
