#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "visim/color.hpp"
#include "visim/symptoms/common.hpp"

namespace visim {

// ---------------------------------------------------------------------------
// Retinopathy / floaters
// ---------------------------------------------------------------------------

inline constexpr double kFloaterMinRadius = 2.0;
inline constexpr double kFloaterMaxRadius = 12.0;

struct FloaterBlob {
    Vec2 center;     // pixels
    double radius;   // pixels
    double shape_z;  // noise slice giving the blob its outline
};

inline double floater_radius_scale(int width, int height) { return 0.01 * std::min(width, height) / 4.0; }

/// Draw list for one frame: exactly `density` blobs. Blobs live in the eye, so
/// their positions are gaze-relative. With centering they orbit the gaze
/// point inside `circle_radius`; otherwise they drift and wrap around a
/// frame-sized window centered on the gaze.
inline std::vector<FloaterBlob> retinopathy_blobs(int width, int height, const RenderContext& ctx,
                                                  const Retinopathy& cfg) {
    const auto n = static_cast<std::size_t>(cfg.density);
    std::vector<FloaterBlob> blobs;
    blobs.reserve(n);
    const double full = std::max(width, height);
    const double min_dim = std::min(width, height);
    const double scale = floater_radius_scale(width, height) * cfg.floater_size;
    const Vec2 g{std::clamp(ctx.gaze.x, 0.0, width - 1.0), std::clamp(ctx.gaze.y, 0.0, height - 1.0)};
    const std::uint64_t base = detail::salted(ctx.seed, detail::NoiseSalt::retinopathy);
    const double tau = 2.0 * std::numbers::pi;
    for (std::size_t i = 0; i < n; ++i) {
        SeededStream rng(hash_combine(base, i));
        FloaterBlob b{};
        b.radius = rng.uniform(kFloaterMinRadius, kFloaterMaxRadius) * scale;
        b.shape_z = rng.uniform(0.0, 256.0);
        const double u0 = rng.uniform(), u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
        if (cfg.centering) {
            const double rho = cfg.circle_radius * full * std::sqrt(u0);
            const double omega = tau * 0.1 * cfg.speed * (0.5 + u2) * (u3 < 0.5 ? -1.0 : 1.0);
            const double angle = tau * u1 + omega * ctx.time;
            b.center = {g.x + rho * std::cos(angle), g.y + rho * std::sin(angle)};
        } else {
            const double speed_px = cfg.speed * 0.05 * min_dim * (0.5 + u2);
            const double heading = tau * u3;
            double ox = (u0 - 0.5) * width + speed_px * std::cos(heading) * ctx.time;
            double oy = (u1 - 0.5) * height + speed_px * std::sin(heading) * ctx.time;
            ox -= width * std::floor(ox / width + 0.5);
            oy -= height * std::floor(oy / height + 0.5);
            b.center = {g.x + ox, g.y + oy};
        }
        blobs.push_back(b);
    }
    return blobs;
}

/// Dark or light floaters with noise-shaped soft outlines.
inline Frame retinopathy(Frame frame, const RenderContext& ctx, const Retinopathy& cfg,
                         ShaderCache* cache = nullptr) {
    require_valid(cfg);
    if (cfg.density == 0.0 || cfg.opacity == 0.0) return frame;
    const auto blobs = retinopathy_blobs(frame.width(), frame.height(), ctx, cfg);
    const NoiseField field{detail::salted(ctx.seed, detail::NoiseSalt::retinopathy), 2, 1.5};
    const NoiseSampler noise = detail::noise_for(field, cache);
    const float ink = cfg.color == FloaterColor::black ? 0.0f : 1.0f;
    const Rgb ink_rgb{ink, ink, ink};
    for (const auto& b : blobs) {
        const auto box = detail::box_around(frame, b.center, b.radius, b.radius);
        for (int y = box.y0; y <= box.y1; ++y) {
            for (int x = box.x0; x <= box.x1; ++x) {
                const double dx = (x - b.center.x) / b.radius;
                const double dy = (y - b.center.y) / b.radius;
                const double d2 = dx * dx + dy * dy;
                if (d2 >= 1.0) continue;
                const double falloff = (1.0 - d2) * (1.0 - d2);
                const double shape = clamp01(0.55 + 0.75 * noise(dx, dy, b.shape_z));
                const float alpha = static_cast<float>(cfg.opacity * falloff * shape);
                if (alpha <= 0.0f) continue;
                frame.set(x, y, lerp(frame.at(x, y), ink_rgb, alpha));
            }
        }
    }
    return frame;
}

// ---------------------------------------------------------------------------
// Teichopsia
// ---------------------------------------------------------------------------

inline constexpr double kTeichAnchorOffset = 0.15;   // fraction of width, right of gaze
inline constexpr double kTeichArcRadius = 0.08;      // fraction of min(width, height)
inline constexpr double kTeichArcHalfSpan = 120.0;   // degrees
inline constexpr int kTeichVertices = 25;
inline constexpr double kTeichZigzag = 0.18;
inline constexpr double kTeichJitter = 0.04;
inline constexpr double kTeichPeriod = 1.0;          // seconds per hue cycle

struct Polyline {
    std::vector<Vec2> points;
    double half_width = 1.0;
};

/// Zigzag arc to the right of the gaze point, opening toward it.
inline Polyline teichopsia_arc(int width, int height, const RenderContext& ctx) {
    const Vec2 g{std::clamp(ctx.gaze.x, 0.0, width - 1.0), std::clamp(ctx.gaze.y, 0.0, height - 1.0)};
    const double min_dim = std::min(width, height);
    const Vec2 anchor{g.x + kTeichAnchorOffset * width, g.y};
    const double rho = kTeichArcRadius * min_dim;
    SeededStream rng(detail::salted(ctx.seed, detail::NoiseSalt::teichopsia));
    Polyline line;
    line.half_width = 0.5 * std::max(1.5, 0.008 * min_dim);
    const double span = kTeichArcHalfSpan * std::numbers::pi / 180.0;
    for (int i = 0; i < kTeichVertices; ++i) {
        const double a = -span + 2.0 * span * i / (kTeichVertices - 1);
        const double zig = (i % 2 == 0 ? 1.0 : -1.0) * kTeichZigzag;
        const double r = rho * (1.0 + zig + rng.uniform(-kTeichJitter, kTeichJitter));
        line.points.push_back({anchor.x + r * std::cos(a), anchor.y + r * std::sin(a)});
    }
    return line;
}

inline double distance_to_segment(Vec2 p, Vec2 a, Vec2 b) {
    const double vx = b.x - a.x, vy = b.y - a.y;
    const double len2 = vx * vx + vy * vy;
    double t = len2 > 0.0 ? ((p.x - a.x) * vx + (p.y - a.y) * vy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return length(p.x - (a.x + t * vx), p.y - (a.y + t * vy));
}

/// Scintillating zigzag: pixels under the arc get a rotating hue mixed with a
/// shimmering spectral color, blended in with `strength`.
inline Frame teichopsia(Frame frame, const RenderContext& ctx, const Teichopsia& cfg) {
    require_valid(cfg);
    if (cfg.strength == 0.0) return frame;
    const Polyline arc = teichopsia_arc(frame.width(), frame.height(), ctx);
    const double reach = arc.half_width + 1.0;
    double x0 = arc.points[0].x, x1 = x0, y0 = arc.points[0].y, y1 = y0;
    for (const auto& p : arc.points) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    const auto box = detail::box_around(frame, {0.5 * (x0 + x1), 0.5 * (y0 + y1)}, 0.5 * (x1 - x0) + reach,
                                        0.5 * (y1 - y0) + reach);
    const double phase = ctx.time / kTeichPeriod;
    const std::size_t segments = arc.points.size() - 1;
    for (int y = box.y0; y <= box.y1; ++y) {
        for (int x = box.x0; x <= box.x1; ++x) {
            double best = reach;
            std::size_t best_seg = 0;
            for (std::size_t s = 0; s < segments; ++s) {
                const double d = distance_to_segment({double(x), double(y)}, arc.points[s], arc.points[s + 1]);
                if (d < best) {
                    best = d;
                    best_seg = s;
                }
            }
            const double coverage = clamp01(arc.half_width + 0.5 - best);
            if (coverage <= 0.0) continue;
            const Rgb src = frame.at(x, y);
            const Rgb rotated = clamp01(rotate_hue(src, phase));
            const Rgb sparkle = hue_color(phase + static_cast<double>(best_seg) / segments);
            const Rgb mixed = lerp(rotated, sparkle, 0.5f);
            frame.set(x, y, clamp01(lerp(src, mixed, static_cast<float>(cfg.strength * coverage))));
        }
    }
    return frame;
}

}  // namespace visim
