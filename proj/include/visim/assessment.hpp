#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "visim/frame.hpp"
#include "visim/image_io.hpp"
#include "visim/noise.hpp"
#include "visim/symptoms/overlays.hpp"

namespace visim {

// ---------------------------------------------------------------------------
// Amsler grid
// ---------------------------------------------------------------------------

/// Freehand mark drawn over the grid; points are normalized frame coordinates.
struct AmslerAnnotation {
    std::string label;
    std::vector<Vec2> points;

    friend bool operator==(const AmslerAnnotation&, const AmslerAnnotation&) = default;
};

struct AmslerSpec {
    ViewingGeometry geometry;
    int width = 1920;
    int height = 1080;
    double extent_degrees = 10.0;  // cells on each side of the fixation point
    int line_width_px = 1;
    std::vector<AmslerAnnotation> annotations;
};

inline constexpr float kAnnotationGray = 0.5f;

/// Pixels per grid cell: one cell subtends one degree.
inline int amsler_cell_pitch_px(const ViewingGeometry& g) {
    return static_cast<int>(std::lround(pixels_per_degree(g)));
}

namespace detail {

inline void fill_rect(Frame& f, int x0, int y0, int x1, int y1, Rgb c) {  // half-open
    x0 = std::max(x0, 0);
    y0 = std::max(y0, 0);
    x1 = std::min(x1, f.width());
    y1 = std::min(y1, f.height());
    for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) f.set(x, y, c);
}

inline void draw_polyline(Frame& f, const std::vector<Vec2>& pts, double half_width, Rgb c) {
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const Vec2 a = pts[i], b = pts[i + 1];
        const auto box = box_around(f, {0.5 * (a.x + b.x), 0.5 * (a.y + b.y)},
                                    0.5 * std::abs(a.x - b.x) + half_width, 0.5 * std::abs(a.y - b.y) + half_width);
        for (int y = box.y0; y <= box.y1; ++y)
            for (int x = box.x0; x <= box.x1; ++x)
                if (distance_to_segment({double(x), double(y)}, a, b) <= half_width) f.set(x, y, c);
    }
    if (pts.size() == 1) {
        const auto box = box_around(f, pts[0], half_width, half_width);
        for (int y = box.y0; y <= box.y1; ++y)
            for (int x = box.x0; x <= box.x1; ++x)
                if (length(x - pts[0].x, y - pts[0].y) <= half_width) f.set(x, y, c);
    }
}

}  // namespace detail

/// White grid on black, centered, with a fixation dot and gray annotations.
inline Frame render_amsler(const AmslerSpec& spec) {
    spec.geometry.check();
    if (spec.width <= 0 || spec.height <= 0) throw ParameterError("Amsler frame size must be positive");
    if (spec.line_width_px < 1) throw ParameterError("Amsler line width must be >= 1 px");
    if (!(spec.extent_degrees >= 1.0) || spec.extent_degrees != std::floor(spec.extent_degrees))
        throw ParameterError("Amsler extent must be a whole number of degrees >= 1");
    const int pitch = amsler_cell_pitch_px(spec.geometry);
    if (pitch < spec.line_width_px + 1)
        throw ParameterError("Amsler cell pitch of " + std::to_string(pitch) + " px is too small to draw");
    const int n = static_cast<int>(spec.extent_degrees);
    const int lw = spec.line_width_px;
    const int cx = spec.width / 2, cy = spec.height / 2;
    const int lead = lw / 2;  // line k covers [pos - lead, pos - lead + lw)
    const int lo_x = cx - n * pitch - lead, hi_x = cx + n * pitch - lead + lw;
    const int lo_y = cy - n * pitch - lead, hi_y = cy + n * pitch - lead + lw;
    if (lo_x < 0 || lo_y < 0 || hi_x > spec.width || hi_y > spec.height)
        throw ParameterError("Amsler grid of " + std::to_string(2 * n) + "x" + std::to_string(2 * n) + " cells at " +
                             std::to_string(pitch) + " px does not fit a " + std::to_string(spec.width) + "x" +
                             std::to_string(spec.height) + " frame");
    Frame f(spec.width, spec.height);
    const Rgb white{1.0f, 1.0f, 1.0f};
    for (int k = -n; k <= n; ++k) {
        const int x = cx + k * pitch - lead;
        const int y = cy + k * pitch - lead;
        detail::fill_rect(f, x, lo_y, x + lw, hi_y, white);
        detail::fill_rect(f, lo_x, y, hi_x, y + lw, white);
    }
    const double dot = std::max(2.0, pitch / 6.0);
    detail::draw_polyline(f, {Vec2{double(cx), double(cy)}}, dot, white);
    for (const auto& a : spec.annotations) {
        std::vector<Vec2> px;
        for (const auto& p : a.points) px.push_back({p.x * (spec.width - 1), p.y * (spec.height - 1)});
        detail::draw_polyline(f, px, 0.5 * (lw + 1), {kAnnotationGray, kAnnotationGray, kAnnotationGray});
    }
    return f;
}

/// `{"polylines": [{"label": ..., "points": [[x, y], ...]}, ...]}`
inline nlohmann::json annotations_to_json(const std::vector<AmslerAnnotation>& list) {
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& a : list) {
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : a.points) pts.push_back({p.x, p.y});
        lines.push_back({{"label", a.label}, {"points", pts}});
    }
    return {{"polylines", lines}};
}

inline std::vector<AmslerAnnotation> annotations_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("polylines") || !doc["polylines"].is_array())
        throw ParameterError("annotations need a 'polylines' array");
    std::vector<AmslerAnnotation> out;
    for (const auto& line : doc["polylines"]) {
        AmslerAnnotation a;
        if (line.contains("label")) a.label = line.at("label").get<std::string>();
        for (const auto& p : line.at("points")) {
            if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                throw ParameterError("annotation points must be [x, y] number pairs");
            const Vec2 v{p[0].get<double>(), p[1].get<double>()};
            if (!(v.x >= 0.0 && v.x <= 1.0 && v.y >= 0.0 && v.y <= 1.0))
                throw ParameterError("annotation points must be normalized to [0,1]");
            a.points.push_back(v);
        }
        out.push_back(std::move(a));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Contrast chart
// ---------------------------------------------------------------------------

inline constexpr double kChartBackground = 0.5;
inline constexpr double kChartMinStep = 1.0 / 255.0;

struct ContrastChartSpec {
    int width = 1920;
    int height = 1080;
    int triplets = 8;
    double contrast_step = 0.15;  // log10 units between rows
    int letter_px = 0;            // 0 picks the largest size that fits
    std::uint64_t seed = 0;
};

struct ContrastChart {
    Frame frame;
    int triplets = 0;  // rows actually drawn
    int letter_px = 0;
    std::vector<int> row_top;
    std::vector<double> luminance;  // letter luminance per row
    std::vector<std::string> letters;
};

/// Weber contrast of row k relative to row 0.
inline double chart_weber(int k, double step) { return std::pow(10.0, -k * step); }

/// Letter luminance of row k on the 0.5 background.
inline double chart_letter_luminance(int k, double step) {
    return kChartBackground * (1.0 - chart_weber(k, step));
}

/// Rows whose letter-background difference stays at or above 1/255.
inline int chart_max_triplets(double step) {
    if (!(step > 0.0) || !std::isfinite(step)) throw ParameterError("contrast step must be positive");
    int k = 0;
    while (kChartBackground * chart_weber(k, step) >= kChartMinStep) ++k;
    return k;
}

namespace detail {

struct SloanGlyph {
    char letter;
    std::array<const char*, 5> rows;
};

inline constexpr std::array<SloanGlyph, 10> kSloanGlyphs{{
    {'C', {".###.", "#...#", "#....", "#...#", ".###."}},
    {'D', {"####.", "#...#", "#...#", "#...#", "####."}},
    {'H', {"#...#", "#...#", "#####", "#...#", "#...#"}},
    {'K', {"#...#", "#..#.", "###..", "#..#.", "#...#"}},
    {'N', {"#...#", "##..#", "#.#.#", "#..##", "#...#"}},
    {'O', {".###.", "#...#", "#...#", "#...#", ".###."}},
    {'R', {"####.", "#...#", "####.", "#..#.", "#...#"}},
    {'S', {".####", "#....", ".###.", "....#", "####."}},
    {'V', {"#...#", "#...#", "#...#", ".#.#.", "..#.."}},
    {'Z', {"#####", "...#.", "..#..", ".#...", "#####"}},
}};

inline void draw_glyph(Frame& f, const SloanGlyph& g, int x0, int y0, int size, Rgb c) {
    const int cell = size / 5;
    for (int r = 0; r < 5; ++r)
        for (int col = 0; col < 5; ++col)
            if (g.rows[r][col] == '#')
                fill_rect(f, x0 + col * cell, y0 + r * cell, x0 + (col + 1) * cell, y0 + (r + 1) * cell, c);
}

}  // namespace detail

/// One row of three letters per contrast level on a mid-gray background.
/// Rows stop early once the contrast would drop below 1/255.
inline ContrastChart render_contrast_chart(const ContrastChartSpec& spec) {
    if (spec.triplets < 1) throw ParameterError("contrast chart needs at least one triplet");
    if (spec.width <= 0 || spec.height <= 0) throw ParameterError("chart size must be positive");
    const int n = std::min(spec.triplets, chart_max_triplets(spec.contrast_step));
    const int margin = std::max(4, std::min(spec.width, spec.height) / 20);
    // rows: n letters high plus n-1 half-letter gaps; columns: 3 letters plus 2 half gaps
    const double fit_h = (spec.height - 2.0 * margin) / (n + 0.5 * (n - 1));
    const double fit_w = (spec.width - 2.0 * margin) / 4.0;
    int letter = static_cast<int>(std::floor(std::min(fit_h, fit_w) / 5.0)) * 5;
    if (spec.letter_px > 0) letter = std::min(letter, spec.letter_px / 5 * 5);
    if (letter < 5)
        throw ParameterError("a " + std::to_string(n) + "-row chart does not fit " + std::to_string(spec.width) + "x" +
                             std::to_string(spec.height));
    const int gap = letter / 2;
    const int total_h = n * letter + (n - 1) * gap;
    const int total_w = 3 * letter + 2 * gap;
    const int top = (spec.height - total_h) / 2;
    const int left = (spec.width - total_w) / 2;

    ContrastChart chart{Frame(spec.width, spec.height, Rgb{0.5f, 0.5f, 0.5f}), n, letter, {}, {}, {}};
    SeededStream rng(hash_combine(spec.seed, 0x736c6f616eULL));
    for (int k = 0; k < n; ++k) {
        const auto lum = static_cast<float>(chart_letter_luminance(k, spec.contrast_step));
        const int y = top + k * (letter + gap);
        std::string picked;
        while (picked.size() < 3) {
            const auto& g = detail::kSloanGlyphs[rng.next() % detail::kSloanGlyphs.size()];
            if (picked.find(g.letter) != std::string::npos) continue;
            detail::draw_glyph(chart.frame, g, left + static_cast<int>(picked.size()) * (letter + gap), y, letter,
                               {lum, lum, lum});
            picked += g.letter;
        }
        chart.row_top.push_back(y);
        chart.luminance.push_back(lum);
        chart.letters.push_back(picked);
    }
    return chart;
}

// ---------------------------------------------------------------------------
// Test plates
// ---------------------------------------------------------------------------

inline constexpr float kPlateBackground = 0.5f;

namespace detail {

/// Exact-coverage box filter along one axis: output sample i averages the
/// source interval [i*n/m, (i+1)*n/m) weighted by overlap.
inline std::vector<std::vector<std::pair<int, float>>> area_weights(int n, int m) {
    std::vector<std::vector<std::pair<int, float>>> w(m);
    const double scale = static_cast<double>(n) / m;
    for (int i = 0; i < m; ++i) {
        const double a = i * scale, b = (i + 1) * scale;
        for (int j = static_cast<int>(std::floor(a)); j < std::min(n, static_cast<int>(std::ceil(b))); ++j) {
            const double overlap = std::min(b, j + 1.0) - std::max(a, static_cast<double>(j));
            if (overlap > 0.0) w[i].emplace_back(j, static_cast<float>(overlap / scale));
        }
    }
    return w;
}

}  // namespace detail

/// Box-filter (area-average) resize; intended for shrinking.
inline Frame area_resize(const Frame& src, int width, int height) {
    if (width <= 0 || height <= 0) throw ParameterError("resize target must be positive");
    const auto wx = detail::area_weights(src.width(), width);
    const auto wy = detail::area_weights(src.height(), height);
    Frame tmp(width, src.height());
    for (int y = 0; y < src.height(); ++y)
        for (int x = 0; x < width; ++x) {
            Rgb acc{};
            for (const auto& [j, w] : wx[x]) {
                const Rgb c = src.at(j, y);
                acc = {acc.r + w * c.r, acc.g + w * c.g, acc.b + w * c.b};
            }
            tmp.set(x, y, clamp01(acc));
        }
    Frame out(width, height);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            Rgb acc{};
            for (const auto& [j, w] : wy[y]) {
                const Rgb c = tmp.at(x, j);
                acc = {acc.r + w * c.r, acc.g + w * c.g, acc.b + w * c.b};
            }
            out.set(x, y, clamp01(acc));
        }
    return out;
}

/// Centers a plate on neutral gray. Plates that fit are copied unchanged;
/// larger ones are shrunk with an area filter, keeping their aspect ratio.
inline Frame letterbox_plate(const Frame& plate, int width, int height) {
    if (width <= 0 || height <= 0) throw ParameterError("display size must be positive");
    const Frame* content = &plate;
    Frame shrunk;
    if (plate.width() > width || plate.height() > height) {
        const double s = std::min(static_cast<double>(width) / plate.width(),
                                  static_cast<double>(height) / plate.height());
        const int w = std::clamp(static_cast<int>(std::lround(plate.width() * s)), 1, width);
        const int h = std::clamp(static_cast<int>(std::lround(plate.height() * s)), 1, height);
        shrunk = area_resize(plate, w, h);
        content = &shrunk;
    }
    Frame out(width, height, Rgb{kPlateBackground, kPlateBackground, kPlateBackground});
    const int ox = (width - content->width()) / 2;
    const int oy = (height - content->height()) / 2;
    for (int y = 0; y < content->height(); ++y) {
        const auto src = content->row(y);
        std::copy(src.begin(), src.end(), out.row(oy + y).begin() + static_cast<std::ptrdiff_t>(ox) * 3);
    }
    return out;
}

inline Frame display_plate(const std::filesystem::path& path, int width, int height) {
    return letterbox_plate(read_image(path), width, height);
}

}  // namespace visim
