#pragma once

#include <cmath>
#include <numbers>

#include "visim/symptoms/common.hpp"
#include "visim/symptoms/optics.hpp"

namespace visim {

// ---------------------------------------------------------------------------
// Metamorphopsia
// ---------------------------------------------------------------------------

inline constexpr double kMetamorphPeak = 0.01;       // fraction of frame height
inline constexpr double kMetamorphHalfWidth = 0.02;  // fraction of frame height

/// Flat-topped bump: 1 up to half the band, cosine taper to 0 at the band edge.
inline double metamorph_profile(double u) {
    u = std::abs(u);
    if (u >= 1.0) return 0.0;
    if (u <= 0.5) return 1.0;
    return 0.5 * (1.0 + std::cos(std::numbers::pi * (u - 0.5) / 0.5));
}

/// Pixels near the horizontal and vertical lines through the gaze point are
/// pushed perpendicular to those lines.
inline Frame metamorph_pointwise(const Frame& frame, const RenderContext& ctx, const MetamorphPoint& cfg) {
    require_valid(cfg);
    if (!cfg.active) return frame;
    const double peak = kMetamorphPeak * frame.height();
    const double half_width = kMetamorphHalfWidth * frame.height();
    const Vec2 g = ctx.gaze_in(frame);
    Frame out = frame;
    for (int y = 0; y < frame.height(); ++y) {
        const double dy = peak * metamorph_profile((y - g.y) / half_width);
        for (int x = 0; x < frame.width(); ++x) {
            const double dx = peak * metamorph_profile((x - g.x) / half_width);
            if (dx == 0.0 && dy == 0.0) continue;
            out.set(x, y, clamp01(sample_bilinear(frame, x - dx, y - dy)));
        }
    }
    return out;
}

/// Whole-frame wave: horizontal shift varies with y, vertical shift with x.
inline Vec2 metamorph_overlay_shift(const MetamorphOverlay& cfg, int width, int height, double x, double y,
                                   double time) {
    const double amp = cfg.amplitude * 0.05 * std::min(width, height);
    const double tau = 2.0 * std::numbers::pi;
    return {amp * std::sin(tau * (cfg.frequency * 10.0 * y / height + cfg.speed * time)),
            amp * std::sin(tau * (cfg.frequency * 10.0 * x / width + cfg.speed * time))};
}

inline Frame metamorph_overlay(const Frame& frame, const RenderContext& ctx, const MetamorphOverlay& cfg) {
    require_valid(cfg);
    if (cfg.amplitude == 0.0) return frame;
    const int w = frame.width(), h = frame.height();
    std::vector<double> dx(h), dy(w);
    for (int y = 0; y < h; ++y) dx[y] = metamorph_overlay_shift(cfg, w, h, 0, y, ctx.time).x;
    for (int x = 0; x < w; ++x) dy[x] = metamorph_overlay_shift(cfg, w, h, x, 0, ctx.time).y;
    Frame out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) out.set(x, y, clamp01(sample_bilinear(frame, x - dx[y], y - dy[x])));
    return out;
}

// ---------------------------------------------------------------------------
// Nystagmus
// ---------------------------------------------------------------------------

/// Sawtooth offset in pixels: rises to the amplitude over `speed` seconds, then snaps back.
inline double nystagmus_offset_px(const Nystagmus& cfg, int width, double time) {
    if (cfg.speed == 0.0 || cfg.amplitude == 0.0) return 0.0;
    const double phase = time / cfg.speed;
    return cfg.amplitude / 100.0 * width * (phase - std::floor(phase));
}

inline Frame nystagmus(const Frame& frame, const RenderContext& ctx, const Nystagmus& cfg) {
    require_valid(cfg);
    const double offset = nystagmus_offset_px(cfg, frame.width(), ctx.time);
    if (offset == 0.0) return frame;
    Frame out(frame.width(), frame.height());
    for (int y = 0; y < frame.height(); ++y)
        for (int x = 0; x < frame.width(); ++x) out.set(x, y, detail::sample_row(frame, y, x - offset));
    return out;
}

// ---------------------------------------------------------------------------
// Distortion
// ---------------------------------------------------------------------------

inline constexpr double kDistortionJitterPx = 2.0;
inline constexpr double kDistortionNoiseFrequency = 16.0;

/// Radius sampled for output radius r inside a distortion of radius R.
inline double distortion_source_radius(double r, double radius, double suction) {
    if (radius <= 0.0 || r >= radius) return r;
    return radius * std::pow(r / radius, 1.0 + 4.0 * suction);
}

/// Content is drawn toward the gaze point; a gray core covers the inner radius.
inline Frame distortion(const Frame& frame, const RenderContext& ctx, const Distortion& cfg,
                        ShaderCache* cache = nullptr) {
    require_valid(cfg);
    const double full = full_screen_px(frame);
    const double radius = cfg.radius * full;
    const double inner = cfg.inner_radius * full;
    const bool remap = cfg.suction > 0.0 || cfg.noise > 0.0;
    if (radius == 0.0 || (!remap && inner == 0.0)) return frame;
    const Vec2 g = ctx.gaze_in(frame);
    const NoiseField field{detail::salted(ctx.seed, detail::NoiseSalt::distortion), 1, kDistortionNoiseFrequency};
    const NoiseSampler noise = detail::noise_for(field, cache);
    const double jitter = cfg.noise * kDistortionJitterPx;
    const Rgb gray{0.5f, 0.5f, 0.5f};
    Frame out = frame;
    const auto box = detail::box_around(frame, g, radius, radius);
    for (int y = box.y0; y <= box.y1; ++y) {
        for (int x = box.x0; x <= box.x1; ++x) {
            const double ox = x - g.x, oy = y - g.y;
            const double r = length(ox, oy);
            if (r >= radius) continue;
            if (r < inner) {
                out.set(x, y, gray);
                continue;
            }
            if (!remap) continue;
            const double scale = r > 0.0 ? distortion_source_radius(r, radius, cfg.suction) / r : 0.0;
            double sx = g.x + ox * scale;
            double sy = g.y + oy * scale;
            if (jitter > 0.0) {
                sx += jitter * noise(ox / full, oy / full, 0.5);
                sy += jitter * noise(ox / full, oy / full, 20.5);
            }
            out.set(x, y, clamp01(sample_bilinear(frame, sx, sy)));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// In-filling
// ---------------------------------------------------------------------------

inline constexpr double kInFillRing = 1.1;

/// Center of the in-filled disk: the gaze point plus a fixed screen offset.
inline Vec2 in_filling_center(const Frame& frame, const RenderContext& ctx, const InFilling& cfg) {
    const Vec2 g = ctx.gaze_in(frame);
    const double full = full_screen_px(frame);
    return {g.x + cfg.position_x * full, g.y + cfg.position_y * full};
}

/// The disk is filled from a ring just outside it, so whatever lies inside vanishes.
inline Frame in_filling(const Frame& frame, const RenderContext& ctx, const InFilling& cfg) {
    require_valid(cfg);
    const double radius = cfg.size * full_screen_px(frame);
    if (radius == 0.0) return frame;
    const Vec2 c = in_filling_center(frame, ctx, cfg);
    const double ring = kInFillRing * radius;
    Frame out = frame;
    const auto box = detail::box_around(frame, c, radius, radius);
    for (int y = box.y0; y <= box.y1; ++y) {
        for (int x = box.x0; x <= box.x1; ++x) {
            const double ox = x - c.x, oy = y - c.y;
            const double r = length(ox, oy);
            if (r >= radius) continue;
            const double ux = r > 0.0 ? ox / r : 1.0;
            const double uy = r > 0.0 ? oy / r : 0.0;
            out.set(x, y, clamp01(sample_bilinear(frame, c.x + ux * ring, c.y + uy * ring)));
        }
    }
    return out;
}

}  // namespace visim
