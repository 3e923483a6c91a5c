#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "visim/frame.hpp"
#include "visim/simd.hpp"

namespace visim {

/// Normalized Gaussian taps for offsets -r..r with r = ceil(3 sigma).
inline std::vector<float> gaussian_kernel(double sigma) {
    if (!std::isfinite(sigma) || sigma < 0.0)
        throw ParameterError("gaussian sigma must be finite and >= 0, got " + std::to_string(sigma));
    if (sigma == 0.0) return {1.0f};
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> w(2 * radius + 1);
    double sum = 0.0;
    for (int k = -radius; k <= radius; ++k) {
        w[k + radius] = std::exp(-(static_cast<double>(k) * k) / (2.0 * sigma * sigma));
        sum += w[k + radius];
    }
    std::vector<float> out(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = static_cast<float>(w[i] / sum);
    return out;
}

namespace detail {

/// Source indices and weights for output `pos` of a clamp-to-edge 1-D
/// convolution; taps that fall outside [0, n) are folded onto the edge samples.
class FoldedKernel {
public:
    explicit FoldedKernel(std::vector<float> taps) : taps_(std::move(taps)) {
        radius_ = static_cast<int>(taps_.size() / 2);
        prefix_.resize(taps_.size() + 1, 0.0);
        for (std::size_t i = 0; i < taps_.size(); ++i) prefix_[i + 1] = prefix_[i] + taps_[i];
    }

    int radius() const noexcept { return radius_; }
    const std::vector<float>& taps() const noexcept { return taps_; }

    /// Taps 0..r of the symmetric kernel (center first).
    const float* half() const noexcept { return taps_.data() + radius_; }

    void taps_at(int pos, int n, std::vector<std::pair<int, float>>& out) const {
        out.clear();
        const int lo = pos - radius_;
        const int hi = pos + radius_;
        const int first = std::max(lo, 0);
        const int last = std::min(hi, n - 1);
        for (int j = first; j <= last; ++j) out.emplace_back(j, taps_[j - lo]);
        if (lo < 0) {
            // taps for source positions lo..0 all read sample 0
            const double extra = prefix_[static_cast<std::size_t>(-lo)];
            add(out, 0, extra);
        }
        if (hi > n - 1) {
            const std::size_t from = static_cast<std::size_t>(n - lo);
            const double extra = prefix_.back() - prefix_[from];
            add(out, n - 1, extra);
        }
    }

private:
    static void add(std::vector<std::pair<int, float>>& out, int index, double extra) {
        for (auto& [j, w] : out) {
            if (j == index) {
                w = static_cast<float>(w + extra);
                return;
            }
        }
        out.emplace_back(index, static_cast<float>(extra));
    }

    std::vector<float> taps_;
    std::vector<double> prefix_;
    int radius_ = 0;
};

/// Horizontal pass over one interleaved RGB row. Short kernels run over an
/// edge-replicated copy; kernels wider than the row use folded taps.
class RowFilter {
public:
    RowFilter(const FoldedKernel& kernel, int width) : kernel_(kernel), width_(width) {
        const int r = kernel.radius();
        if (2 * r + 1 <= width) {
            padded_.resize(static_cast<std::size_t>(width + 2 * r) * 3);
            lo_.resize(r);
            hi_.resize(r);
            const float* center = padded_.data() + static_cast<std::size_t>(r) * 3;
            for (int k = 1; k <= r; ++k) {
                lo_[k - 1] = center - static_cast<std::ptrdiff_t>(k) * 3;
                hi_[k - 1] = center + static_cast<std::ptrdiff_t>(k) * 3;
            }
        } else {
            folded_.resize(width);
            for (int x = 0; x < width; ++x) kernel.taps_at(x, width, folded_[x]);
        }
    }

    void operator()(const float* in, float* out) const {
        const std::size_t n = static_cast<std::size_t>(width_) * 3;
        const int r = kernel_.radius();
        if (folded_.empty()) {
            float* pad = padded_.data();
            std::copy(in, in + n, pad + static_cast<std::size_t>(r) * 3);
            for (int k = 0; k < r; ++k) {
                for (int c = 0; c < 3; ++c) {
                    pad[static_cast<std::size_t>(k) * 3 + c] = in[c];
                    pad[static_cast<std::size_t>(r + width_ + k) * 3 + c] = in[n - 3 + c];
                }
            }
            simd::symmetric_filter(out, pad + static_cast<std::size_t>(r) * 3, lo_.data(), hi_.data(),
                                   kernel_.half(), r, n, false);
            return;
        }
        for (int x = 0; x < width_; ++x) {
            float acc[3] = {0.0f, 0.0f, 0.0f};
            for (const auto& [j, wt] : folded_[x])
                for (int c = 0; c < 3; ++c) acc[c] += wt * in[static_cast<std::size_t>(j) * 3 + c];
            for (int c = 0; c < 3; ++c) out[static_cast<std::size_t>(x) * 3 + c] = acc[c];
        }
    }

private:
    const FoldedKernel& kernel_;
    int width_;
    mutable std::vector<float> padded_;
    std::vector<const float*> lo_, hi_;
    std::vector<std::vector<std::pair<int, float>>> folded_;
};

}  // namespace detail

/// Separable Gaussian blur, clamp-to-edge, kernel radius ceil(3 sigma).
/// Works in place: horizontally filtered rows go to a ring of 2r+1 rows that
/// the vertical pass reads from, and output row y overwrites source row y
/// only after every row that needs it has been filtered.
inline Frame gaussian_blur(Frame frame, double sigma) {
    auto taps = gaussian_kernel(sigma);
    if (taps.size() == 1) return frame;
    const detail::FoldedKernel kernel(std::move(taps));
    const int w = frame.width();
    const int h = frame.height();
    const int r = kernel.radius();
    const std::size_t n = static_cast<std::size_t>(w) * 3;
    const detail::RowFilter row_filter(kernel, w);

    const int capacity = std::min(2 * r + 1, h);
    std::vector<float> ring(static_cast<std::size_t>(capacity) * n);
    auto ring_row = [&](int j) { return ring.data() + static_cast<std::size_t>(j % capacity) * n; };
    int filtered = 0;  // rows [0, filtered) are in the ring (the last `capacity` of them)
    auto filter_through = [&](int last) {
        for (; filtered <= last; ++filtered) row_filter(frame.row(filtered).data(), ring_row(filtered));
    };

    std::vector<const float*> lo(r), hi(r);
    std::vector<std::pair<int, float>> folded;
    const bool narrow = 2 * r + 1 <= h;
    for (int y = 0; y < h; ++y) {
        filter_through(std::min(y + r, h - 1));
        float* out = frame.row(y).data();
        if (narrow) {
            for (int k = 1; k <= r; ++k) {
                lo[k - 1] = ring_row(std::max(y - k, 0));
                hi[k - 1] = ring_row(std::min(y + k, h - 1));
            }
            simd::symmetric_filter(out, ring_row(y), lo.data(), hi.data(), kernel.half(), r, n, true);
            continue;
        }
        kernel.taps_at(y, h, folded);
        std::fill(out, out + n, 0.0f);
        for (const auto& [j, wt] : folded) {
            const float* src = ring_row(j);
            for (std::size_t i = 0; i < n; ++i) out[i] += wt * src[i];
        }
        for (std::size_t i = 0; i < n; ++i) out[i] = clamp01(out[i]);
    }
    return frame;
}

}  // namespace visim
