#pragma once

#include <algorithm>
#include <cmath>

#include "visim/blur.hpp"
#include "visim/symptoms/common.hpp"

namespace visim {

/// Blur radii below this many pixels are treated as no blur at all.
inline constexpr double kMinBlurSigmaPx = 0.2;

/// Acuity of an unimpaired eye; the top of the cpd range.
inline constexpr double kNormalAcuityCpd = 30.0;

/// Blur that brings an eye resolving 30 cpd down to `cpd`: the target kernel
/// ppd/(2 cpd) minus, in quadrature, the kernel the eye already has. Zero at
/// 30 cpd, so the neutral setting is an exact identity.
inline double hyperopia_sigma_px(const ViewingGeometry& g, double cpd) {
    const double half_ppd = 0.5 * pixels_per_degree(g);
    const double target = 1.0 / (cpd * cpd), baseline = 1.0 / (kNormalAcuityCpd * kNormalAcuityCpd);
    return half_ppd * std::sqrt(std::max(0.0, target - baseline));
}

/// Acuity loss as a Gaussian blur whose width follows from cycles per degree
/// and the viewing geometry.
inline Frame hyperopia(Frame frame, const RenderContext& ctx, const Hyperopia& cfg) {
    require_valid(cfg);
    const double sigma = hyperopia_sigma_px(ctx.geometry, cfg.cpd);
    if (sigma < kMinBlurSigmaPx) return frame;
    return gaussian_blur(std::move(frame), sigma);
}

/// Bloom: the part of each channel above `threshold` is blurred and added back.
inline Frame glare(Frame frame, const RenderContext&, const Glare& cfg) {
    require_valid(cfg);
    if (cfg.intensity == 0.0 || cfg.threshold >= 1.0) return frame;
    const float th = static_cast<float>(cfg.threshold);
    const float scale = 1.0f / (1.0f - th);
    Frame mask(frame.width(), frame.height());
    bool any = false;
    {
        auto src = frame.values();
        auto dst = mask.values();
        for (std::size_t i = 0; i < src.size(); ++i) {
            const float m = std::max(src[i] - th, 0.0f) * scale;
            dst[i] = m;
            any = any || m > 0.0f;
        }
    }
    if (!any) return frame;
    const Frame bloom = gaussian_blur(std::move(mask), cfg.blur * 0.02 * frame.width());
    const float k = static_cast<float>(cfg.intensity);
    auto dst = frame.values();
    auto add = bloom.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = clamp01(dst[i] + k * add[i]);
    return frame;
}

inline constexpr float kCataractGray = 0.65f;

/// Milky lens: contrast collapses toward light gray, then a static noise
/// field displaces pixels to give a frosted look.
inline Frame cataracts(Frame milky, const RenderContext& ctx, const Cataract& cfg, ShaderCache* cache = nullptr) {
    require_valid(cfg);
    if (cfg.severity > 0.0) {
        const float t = static_cast<float>(0.6 * cfg.severity);
        for (float& v : milky.values()) v = lerp(v, kCataractGray, t);
    }
    if (cfg.frosting == 0.0) return milky;
    const int w = milky.width(), h = milky.height();
    const double min_dim = std::min(w, h);
    const double amplitude = cfg.frosting * 0.01 * min_dim;
    NoiseField field{detail::salted(ctx.seed, detail::NoiseSalt::cataract), 1, min_dim / 4.0};
    const NoiseSampler noise = detail::noise_for(field, cache);
    Frame out(w, h);
    for (int y = 0; y < h; ++y) {
        const double ny = y / min_dim;
        for (int x = 0; x < w; ++x) {
            const double nx = x / min_dim;
            const double dx = amplitude * noise(nx, ny, 0.5);
            const double dy = amplitude * noise(nx, ny, 10.5);
            out.set(x, y, clamp01(sample_bilinear(milky, x + dx, y + dy)));
        }
    }
    return out;
}

namespace detail {

/// Row sample at fractional x with linear interpolation, clamp-to-edge.
inline Rgb sample_row(const Frame& f, int y, double x) {
    const double fx = std::floor(x);
    const int x0 = static_cast<int>(fx);
    const float t = static_cast<float>(x - fx);
    const Rgb a = f.at_clamped(x0, y);
    if (t == 0.0f) return a;
    return lerp(a, f.at_clamped(x0 + 1, y), t);
}

}  // namespace detail

/// Two half-opacity copies shifted left and right by the displacement.
inline Frame double_vision(const Frame& frame, const RenderContext&, const DoubleVision& cfg) {
    require_valid(cfg);
    const double d = cfg.displacement * full_screen_px(frame);
    if (d == 0.0) return frame;
    Frame out(frame.width(), frame.height());
    for (int y = 0; y < frame.height(); ++y) {
        for (int x = 0; x < frame.width(); ++x) {
            const Rgb a = detail::sample_row(frame, y, x - d);
            const Rgb b = detail::sample_row(frame, y, x + d);
            out.set(x, y, clamp01(Rgb{0.5f * a.r + 0.5f * b.r, 0.5f * a.g + 0.5f * b.g, 0.5f * a.b + 0.5f * b.b}));
        }
    }
    return out;
}

}  // namespace visim
