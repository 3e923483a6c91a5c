#pragma once

#include <cmath>
#include <vector>

#include "visim/symptoms/common.hpp"

namespace visim {

/// Minor/major axis ratio of the central-loss ellipse (wider than tall).
inline constexpr double kCentralLossAxisRatio = 0.75;

// Field-loss shaders modify the frame in place. A pixel at integer
// coordinates reads level 0 only at itself (its right and lower neighbours get
// zero weight and are not yet written in raster order), so the result equals
// sampling an untouched copy.

/// Reduced level of detail inside a 4:3 ellipse at the gaze point. The center
/// reads the coarsest pyramid level and the LOD falls off smoothly to the
/// source resolution at the ellipse boundary.
inline Frame central_vision_loss(Frame frame, const RenderContext& ctx, const CentralLoss& cfg) {
    require_valid(cfg);
    if (cfg.size == 0.0) return frame;
    const double a = 0.5 * cfg.size * full_screen_px(frame);
    const double b = a * kCentralLossAxisRatio;
    const Vec2 g = ctx.gaze_in(frame);
    const MipPyramid mip(frame);
    const double max_lod = mip.coarsest_level();
    const auto box = detail::box_around(frame, g, a, b);
    const PixelGridSampler grid(mip, box.x0, box.x1 + 1, box.y0, box.y1 + 1);
    for (int y = box.y0; y <= box.y1; ++y) {
        const double dy = (y - g.y) / b;
        for (int x = box.x0; x <= box.x1; ++x) {
            const double dx = (x - g.x) / a;
            const double r2 = dx * dx + dy * dy;
            if (r2 >= 1.0) continue;
            const double lod = max_lod * (1.0 - detail::smoothstep01(std::sqrt(r2)));
            if (lod <= 0.0) continue;
            frame.set(x, y, clamp01(grid.sample(lod, x, y)));
        }
    }
    return frame;
}

/// Width of the transition band outside the tunnel, in pixels.
inline double peripheral_ramp_px(const Frame& f, double tunnel_radius) {
    return 0.5 * tunnel_radius + 0.05 * full_screen_px(f);
}

/// Tunnel vision: source resolution within the tunnel around the gaze point,
/// smoothly rising to the coarsest level of detail outside it. size = 1 gives a
/// tunnel radius equal to the frame diagonal, i.e. no loss from any gaze point.
inline Frame peripheral_vision_loss(Frame frame, const RenderContext& ctx, const PeripheralLoss& cfg) {
    require_valid(cfg);
    const double diagonal = length(frame.width(), frame.height());
    const double radius = cfg.size * diagonal;
    const Vec2 g = ctx.gaze_in(frame);
    const double far_x = std::max(g.x, frame.width() - 1 - g.x);
    const double far_y = std::max(g.y, frame.height() - 1 - g.y);
    if (length(far_x, far_y) <= radius) return frame;
    const double ramp = peripheral_ramp_px(frame, radius);
    const MipPyramid mip(frame);
    const double max_lod = mip.coarsest_level();
    const PixelGridSampler grid(mip, 0, frame.width(), 0, frame.height());
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            const double r = length(x - g.x, y - g.y);
            if (r <= radius) continue;
            const double lod = max_lod * detail::smoothstep01((r - radius) / ramp);
            if (lod <= 0.0) continue;
            frame.set(x, y, clamp01(grid.sample(lod, x, y)));
        }
    }
    return frame;
}

/// Gray disk of diameter `size` at the gaze point; `fade` widens the linear
/// falloff of its opacity toward the rim.
inline Frame foveal_darkness(Frame frame, const RenderContext& ctx, const FovealDarkness& cfg) {
    require_valid(cfg);
    if (cfg.opacity == 0.0 || cfg.size == 0.0) return frame;
    const double radius = 0.5 * cfg.size * full_screen_px(frame);
    const double inner = (1.0 - cfg.fade) * radius;
    const Vec2 g = ctx.gaze_in(frame);
    const Rgb gray{0.5f, 0.5f, 0.5f};
    const auto box = detail::box_around(frame, g, radius, radius);
    for (int y = box.y0; y <= box.y1; ++y) {
        for (int x = box.x0; x <= box.x1; ++x) {
            const double r = length(x - g.x, y - g.y);
            if (r >= radius) continue;
            const double ramp = r < inner ? 1.0 : (radius - r) / (radius - inner);
            const float alpha = static_cast<float>(cfg.opacity * ramp);
            frame.set(x, y, lerp(frame.at(x, y), gray, alpha));
        }
    }
    return frame;
}

// ---------------------------------------------------------------------------
// Flickering stars
// ---------------------------------------------------------------------------

inline constexpr double kStarSpawnRate = 4.0;   // spots per second
inline constexpr double kStarLifetime = 0.5;    // seconds
inline constexpr double kStarMaxLod = 3.0;

struct FlickerSpot {
    std::int64_t slot = 0;
    double spawn_time = 0.0;
    Vec2 center;
    double radius = 0.0;  // pixels
};

/// Spots alive at `time`. Slot k spawns one spot at a seeded instant within
/// [k/rate, (k+1)/rate); position uniform over the frame, radius in (0, R].
inline std::vector<FlickerSpot> flicker_schedule(int width, int height, const RenderContext& ctx,
                                                 const FlickeringStars& cfg) {
    std::vector<FlickerSpot> live;
    const double slot_len = 1.0 / kStarSpawnRate;
    const double max_radius = cfg.radius * std::max(width, height);
    const auto first = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(std::floor((ctx.time - kStarLifetime) / slot_len)) - 1);
    const auto last = static_cast<std::int64_t>(std::floor(ctx.time / slot_len));
    const std::uint64_t base = detail::salted(ctx.seed, detail::NoiseSalt::flicker);
    for (std::int64_t k = first; k <= last; ++k) {
        SeededStream rng(hash_combine(base, static_cast<std::uint64_t>(k)));
        FlickerSpot s;
        s.slot = k;
        s.spawn_time = (static_cast<double>(k) + rng.uniform()) * slot_len;
        s.center = {rng.uniform() * width, rng.uniform() * height};
        s.radius = max_radius * (1.0 - rng.uniform());
        if (s.spawn_time <= ctx.time && ctx.time < s.spawn_time + kStarLifetime) live.push_back(s);
    }
    return live;
}

/// Short-lived spots where the level of detail drops; fade grades the LOD
/// from the spot center to its rim.
inline Frame flickering_stars(const Frame& frame, const RenderContext& ctx, const FlickeringStars& cfg) {
    require_valid(cfg);
    if (cfg.radius == 0.0) return frame;
    const auto spots = flicker_schedule(frame.width(), frame.height(), ctx, cfg);
    if (spots.empty()) return frame;
    const MipPyramid mip(frame, static_cast<int>(kStarMaxLod));
    Frame out = frame;
    for (const auto& s : spots) {
        const auto box = detail::box_around(frame, s.center, s.radius, s.radius);
        for (int y = box.y0; y <= box.y1; ++y) {
            for (int x = box.x0; x <= box.x1; ++x) {
                const double r = length(x - s.center.x, y - s.center.y);
                if (r >= s.radius) continue;
                const double lod = kStarMaxLod * (1.0 - cfg.fade * (r / s.radius));
                if (lod <= 0.0) continue;
                out.set(x, y, clamp01(mip.sample(lod, x, y)));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Detail loss
// ---------------------------------------------------------------------------

/// Box averages over a grid with `clusters` cells along the larger axis.
inline Frame cluster_means(const Frame& frame, double cell) {
    const int nx = static_cast<int>(std::ceil(frame.width() / cell));
    const int ny = static_cast<int>(std::ceil(frame.height() / cell));
    std::vector<double> sums(static_cast<std::size_t>(nx) * ny * 3, 0.0);
    std::vector<int> counts(static_cast<std::size_t>(nx) * ny, 0);
    for (int y = 0; y < frame.height(); ++y) {
        const int cy = std::min(ny - 1, static_cast<int>((y + 0.5) / cell));
        for (int x = 0; x < frame.width(); ++x) {
            const int cx = std::min(nx - 1, static_cast<int>((x + 0.5) / cell));
            const std::size_t i = static_cast<std::size_t>(cy) * nx + cx;
            const Rgb c = frame.at(x, y);
            sums[i * 3] += c.r;
            sums[i * 3 + 1] += c.g;
            sums[i * 3 + 2] += c.b;
            ++counts[i];
        }
    }
    Frame cells(nx, ny);
    for (int cy = 0; cy < ny; ++cy) {
        for (int cx = 0; cx < nx; ++cx) {
            const std::size_t i = static_cast<std::size_t>(cy) * nx + cx;
            const double n = std::max(1, counts[i]);
            cells.set(cx, cy, {static_cast<float>(sums[i * 3] / n), static_cast<float>(sums[i * 3 + 1] / n),
                               static_cast<float>(sums[i * 3 + 2] / n)});
        }
    }
    return cells;
}

/// Mosaic: cluster means bilinearly interpolated between cluster centers.
inline Frame detail_loss(const Frame& frame, const RenderContext&, const DetailLoss& cfg) {
    require_valid(cfg);
    const double cell = full_screen_px(frame) / cfg.clusters;
    if (cell <= 1.0) return frame;
    const Frame cells = cluster_means(frame, cell);
    Frame out(frame.width(), frame.height());
    for (int y = 0; y < frame.height(); ++y) {
        const double v = (y + 0.5) / cell - 0.5;
        for (int x = 0; x < frame.width(); ++x) {
            const double u = (x + 0.5) / cell - 0.5;
            out.set(x, y, clamp01(sample_bilinear(cells, u, v)));
        }
    }
    return out;
}

}  // namespace visim
