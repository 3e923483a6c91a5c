#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "visim/frame.hpp"

namespace visim {

/// Bilinear read at continuous pixel coordinates (pixel i is centered on i),
/// clamp-to-edge outside the raster.
inline Rgb sample_bilinear(const Frame& f, double x, double y) {
    const double cx = std::clamp(x, 0.0, static_cast<double>(f.width() - 1));
    const double cy = std::clamp(y, 0.0, static_cast<double>(f.height() - 1));
    const int x0 = static_cast<int>(cx);
    const int y0 = static_cast<int>(cy);
    const float fx = static_cast<float>(cx - x0);
    const float fy = static_cast<float>(cy - y0);
    const int x1 = std::min(x0 + 1, f.width() - 1);
    const int y1 = std::min(y0 + 1, f.height() - 1);
    const Rgb top = lerp(f.at(x0, y0), f.at(x1, y0), fx);
    const Rgb bottom = lerp(f.at(x0, y1), f.at(x1, y1), fx);
    return lerp(top, bottom, fy);
}

/// Box-filtered mip pyramid over a frame. Level L is ceil(w/2^L) x ceil(h/2^L);
/// level 0 is the source itself, which must outlive the pyramid.
class MipPyramid {
public:
    explicit MipPyramid(const Frame& source, int max_level = -1) : source_(&source) {
        int level = 0;
        while ((current().width() > 1 || current().height() > 1) && (max_level < 0 || level < max_level)) {
            levels_.push_back(halve(current()));
            ++level;
        }
    }

    /// Index of the coarsest level built.
    int coarsest_level() const noexcept { return static_cast<int>(levels_.size()); }

    const Frame& level(int l) const { return l == 0 ? *source_ : levels_.at(l - 1); }

    /// Bilinear read of a single level at source pixel coordinates.
    Rgb sample_level(int l, double x, double y) const {
        if (l == 0) return sample_bilinear(*source_, x, y);
        const double scale = 1.0 / static_cast<double>(1u << l);
        return sample_bilinear(levels_[l - 1], (x + 0.5) * scale - 0.5, (y + 0.5) * scale - 0.5);
    }

    /// Trilinear read; lod beyond the coarsest level clamps to it.
    Rgb sample(double lod, double x, double y) const {
        lod = std::clamp(lod, 0.0, static_cast<double>(coarsest_level()));
        const int l0 = static_cast<int>(std::floor(lod));
        const double frac = lod - l0;
        if (frac == 0.0) return sample_level(l0, x, y);
        return lerp(sample_level(l0, x, y), sample_level(l0 + 1, x, y), static_cast<float>(frac));
    }

private:
    const Frame& current() const { return levels_.empty() ? *source_ : levels_.back(); }

    /// Box average of each 2x2 block; blocks cut by an odd edge average only
    /// the pixels that exist.
    static Frame halve(const Frame& prev) {
        const int w = prev.width(), h = prev.height();
        const int nw = (w + 1) / 2, nh = (h + 1) / 2;
        Frame next(nw, nh);
        const int full_w = w / 2;
        for (int y = 0; y < nh; ++y) {
            const float* a = prev.row(2 * y).data();
            const float* b = prev.row(std::min(2 * y + 1, h - 1)).data();
            const bool two_rows = 2 * y + 1 < h;
            float* o = next.row(y).data();
            const float row_scale = two_rows ? 0.25f : 0.5f;
            for (int x = 0; x < full_w; ++x) {
                for (int c = 0; c < 3; ++c) {
                    const std::size_t i = static_cast<std::size_t>(x) * 6 + c;
                    const float top = a[i] + a[i + 3];
                    o[static_cast<std::size_t>(x) * 3 + c] = (two_rows ? top + (b[i] + b[i + 3]) : top) * row_scale;
                }
            }
            if (full_w < nw) {
                for (int c = 0; c < 3; ++c) {
                    const std::size_t i = static_cast<std::size_t>(full_w) * 6 + c;
                    o[static_cast<std::size_t>(full_w) * 3 + c] = two_rows ? (a[i] + b[i]) * 0.5f : a[i];
                }
            }
        }
        return next;
    }

    const Frame* source_;
    std::vector<Frame> levels_;
};

/// Trilinear reads at integer pixel centers inside a fixed window, with each
/// level's bilinear taps precomputed per column and per row. Returns exactly
/// what MipPyramid::sample does at the same point.
class PixelGridSampler {
public:
    PixelGridSampler(const MipPyramid& mip, int x_begin, int x_end, int y_begin, int y_end)
        : coarsest_(mip.coarsest_level()), x_begin_(x_begin), y_begin_(y_begin),
          nx_(std::max(x_end - x_begin, 0)), ny_(std::max(y_end - y_begin, 0)) {
        const int levels = coarsest_ + 1;
        frames_.resize(levels);
        cols_.resize(static_cast<std::size_t>(levels) * nx_);
        rows_.resize(static_cast<std::size_t>(levels) * ny_);
        for (int l = 0; l < levels; ++l) {
            const Frame& f = mip.level(l);
            frames_[l] = &f;
            const double scale = l == 0 ? 1.0 : 1.0 / static_cast<double>(1u << l);
            for (int i = 0; i < nx_; ++i) cols_[static_cast<std::size_t>(l) * nx_ + i] = tap(x_begin + i, scale, l, f.width());
            for (int i = 0; i < ny_; ++i) rows_[static_cast<std::size_t>(l) * ny_ + i] = tap(y_begin + i, scale, l, f.height());
        }
    }

    Rgb level(int l, int x, int y) const {
        const Tap& cx = cols_[static_cast<std::size_t>(l) * nx_ + (x - x_begin_)];
        const Tap& cy = rows_[static_cast<std::size_t>(l) * ny_ + (y - y_begin_)];
        const Frame& f = *frames_[l];
        const float* r0 = f.row(cy.i0).data();
        const float* r1 = f.row(cy.i1).data();
        const std::size_t a = static_cast<std::size_t>(cx.i0) * 3, b = static_cast<std::size_t>(cx.i1) * 3;
        const Rgb top = lerp(Rgb{r0[a], r0[a + 1], r0[a + 2]}, Rgb{r0[b], r0[b + 1], r0[b + 2]}, cx.f);
        const Rgb bottom = lerp(Rgb{r1[a], r1[a + 1], r1[a + 2]}, Rgb{r1[b], r1[b + 1], r1[b + 2]}, cx.f);
        return lerp(top, bottom, cy.f);
    }

    Rgb sample(double lod, int x, int y) const {
        lod = std::clamp(lod, 0.0, static_cast<double>(coarsest_));
        const int l0 = static_cast<int>(std::floor(lod));
        const double frac = lod - l0;
        if (frac == 0.0) return level(l0, x, y);
        return lerp(level(l0, x, y), level(l0 + 1, x, y), static_cast<float>(frac));
    }

private:
    struct Tap {
        int i0, i1;
        float f;
    };

    static Tap tap(int p, double scale, int l, int n) {
        const double c = l == 0 ? static_cast<double>(p) : (p + 0.5) * scale - 0.5;
        const double cc = std::clamp(c, 0.0, static_cast<double>(n - 1));
        const int i0 = static_cast<int>(cc);
        return {i0, std::min(i0 + 1, n - 1), static_cast<float>(cc - i0)};
    }

    int coarsest_, x_begin_, y_begin_, nx_, ny_;
    std::vector<const Frame*> frames_;
    std::vector<Tap> cols_, rows_;
};

/// Sampler over the box-filtered pyramid of `frame`.
inline MipPyramid downsample_lod(const Frame& frame) { return MipPyramid(frame); }

/// Number of halvings until the frame is 1x1.
inline int coarsest_level_for(int width, int height) {
    int l = 0;
    while (width > 1 || height > 1) {
        width = (width + 1) / 2;
        height = (height + 1) / 2;
        ++l;
    }
    return l;
}

}  // namespace visim
