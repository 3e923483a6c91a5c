#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "support.hpp"

using namespace visim;
namespace vt = visim::testing;

namespace {

/// Pixels subtended by one degree, from the chord of a 1-degree arc.
double degree_px(double distance_m, double pitch_m) {
    const double half = 0.5 * 3.14159265358979323846 / 180.0;
    return 2.0 * distance_m * std::tan(half) / pitch_m;
}

ViewingGeometry geometry(double distance_m, double pitch_mm) {
    ViewingGeometry g;
    g.viewing_distance = distance_m;
    g.pixel_pitch = pitch_mm / 1000.0;
    return g;
}

bool is_white(const Frame& f, int x, int y) { return f.at(x, y) == Rgb{1.0f, 1.0f, 1.0f}; }

}  // namespace

// ---------------------------------------------------------------------------
// Amsler grid

TEST(Amsler, ReferenceGeometryGivesFortyFivePixelCells) {
    const auto g = geometry(0.60, 0.233);
    EXPECT_NEAR(degree_px(0.60, 0.000233), 44.94, 0.01);
    EXPECT_EQ(amsler_cell_pitch_px(g), 45);
}

TEST(Amsler, PitchScalesLinearlyWithDistanceOverPitch) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(0.3, 1.5), pitch(0.1, 0.5);
    for (int i = 0; i < 200; ++i) {
        const double d = dist(rng), p = pitch(rng);
        const int px = amsler_cell_pitch_px(geometry(d, p));
        EXPECT_LE(std::abs(px - degree_px(d, p / 1000.0)), 0.5) << d << " m, " << p << " mm";
    }
}

TEST(Amsler, LinesSitOnTheCellLattice) {
    AmslerSpec spec;
    spec.geometry = geometry(0.60, 0.233);
    const Frame f = render_amsler(spec);
    const int cx = spec.width / 2, cy = spec.height / 2, pitch = 45;
    // Sample a row halfway between horizontal lines: white exactly on vertical lines.
    const int y = cy + pitch / 2;
    for (int x = 0; x < spec.width; ++x) {
        const int dx = x - cx;
        const bool on_line = dx % pitch == 0 && std::abs(dx) <= 10 * pitch;
        ASSERT_EQ(is_white(f, x, y), on_line) << "x=" << x;
    }
    const int x = cx + pitch / 2;
    for (int yy = 0; yy < spec.height; ++yy) {
        const int dy = yy - cy;
        const bool on_line = dy % pitch == 0 && std::abs(dy) <= 10 * pitch;
        ASSERT_EQ(is_white(f, x, yy), on_line) << "y=" << yy;
    }
    EXPECT_EQ(f.at(0, 0), Rgb{});
}

TEST(Amsler, FixationDotIsFilled) {
    AmslerSpec spec;
    spec.geometry = geometry(0.60, 0.233);
    const Frame f = render_amsler(spec);
    const int cx = spec.width / 2, cy = spec.height / 2;
    for (int dy = -4; dy <= 4; ++dy)
        for (int dx = -4; dx <= 4; ++dx)
            if (dx * dx + dy * dy <= 49 / 4) EXPECT_TRUE(is_white(f, cx + dx, cy + dy));
}

TEST(Amsler, WiderLinesStayCentered) {
    AmslerSpec spec;
    spec.geometry = geometry(0.60, 0.233);
    spec.line_width_px = 3;
    const Frame f = render_amsler(spec);
    const int y = spec.height / 2 + 20, cx = spec.width / 2;
    EXPECT_FALSE(is_white(f, cx + 45 - 2, y));
    EXPECT_TRUE(is_white(f, cx + 45 - 1, y));
    EXPECT_TRUE(is_white(f, cx + 45, y));
    EXPECT_TRUE(is_white(f, cx + 45 + 1, y));
    EXPECT_FALSE(is_white(f, cx + 45 + 2, y));
}

TEST(Amsler, OversizedGridIsRejected) {
    AmslerSpec spec;
    spec.geometry = geometry(1.5, 0.1);  // ~262 px per degree
    try {
        render_amsler(spec);
        FAIL();
    } catch (const ParameterError& e) {
        EXPECT_NE(std::string(e.what()).find("does not fit"), std::string::npos);
    }
    spec.geometry = geometry(0.6, 0.233);
    spec.extent_degrees = 2.5;
    EXPECT_THROW(render_amsler(spec), ParameterError);
    spec.extent_degrees = 10;
    spec.geometry.viewing_distance = 0;
    EXPECT_THROW(render_amsler(spec), ParameterError);
}

TEST(Amsler, AnnotationsAreDrawnInGray) {
    AmslerSpec spec;
    spec.geometry = geometry(0.60, 0.233);
    spec.annotations = {{"wavy", {{0.25, 0.3}, {0.3, 0.3}}}};
    const Frame f = render_amsler(spec);
    const int x = static_cast<int>(std::lround(0.27 * (spec.width - 1)));
    const int y = static_cast<int>(std::lround(0.3 * (spec.height - 1)));
    EXPECT_EQ(f.at(x, y), (Rgb{kAnnotationGray, kAnnotationGray, kAnnotationGray}));
}

TEST(Amsler, AnnotationJsonRoundTrip) {
    const std::vector<AmslerAnnotation> list = {{"a", {{0.1, 0.2}, {0.3, 0.4}}}, {"", {{1.0, 0.0}}}};
    EXPECT_EQ(annotations_from_json(annotations_to_json(list)), list);
    EXPECT_THROW(annotations_from_json(nlohmann::json::parse(R"({"polylines":[{"points":[[2,0]]}]})")),
                 ParameterError);
    EXPECT_THROW(annotations_from_json(nlohmann::json::parse(R"({"lines":[]})")), ParameterError);
}

// ---------------------------------------------------------------------------
// Contrast chart

namespace {

/// Rows containing at least one pixel that differs from the background.
std::vector<std::pair<int, int>> letter_bands(const Frame& f) {
    std::vector<std::pair<int, int>> bands;
    int start = -1;
    for (int y = 0; y < f.height(); ++y) {
        bool ink = false;
        for (int x = 0; x < f.width() && !ink; ++x) ink = f.at(x, y).r != 0.5f;
        if (ink && start < 0) start = y;
        if (!ink && start >= 0) {
            bands.emplace_back(start, y);
            start = -1;
        }
    }
    if (start >= 0) bands.emplace_back(start, f.height());
    return bands;
}

}  // namespace

TEST(ContrastChart, EightRowsOfThreeDistinctLetters) {
    const auto chart = render_contrast_chart({});
    ASSERT_EQ(chart.triplets, 8);
    const auto bands = letter_bands(chart.frame);
    ASSERT_EQ(bands.size(), 8u);
    for (int k = 0; k < 8; ++k) {
        EXPECT_EQ(bands[k].first, chart.row_top[k]);
        EXPECT_EQ(chart.letters[k].size(), 3u);
        EXPECT_EQ(std::set<char>(chart.letters[k].begin(), chart.letters[k].end()).size(), 3u);
    }
}

TEST(ContrastChart, RowsFollowTheLogStep) {
    const auto chart = render_contrast_chart({});
    for (int k = 0; k < chart.triplets; ++k) {
        const double weber = std::pow(10.0, -0.15 * k);
        EXPECT_NEAR((0.5 - chart.luminance[k]) / 0.5, weber, 1e-6);
    }
    EXPECT_NEAR(chart_weber(2, 0.15), 0.501187, 1e-6);
    EXPECT_NEAR(chart.luminance[0], 0.0, 1e-9);
}

TEST(ContrastChart, MeasuredLetterLuminanceMatchesTheRow) {
    const auto chart = render_contrast_chart({});
    for (int k = 0; k < chart.triplets; ++k) {
        double sum = 0;
        int n = 0;
        for (int y = chart.row_top[k]; y < chart.row_top[k] + chart.letter_px; ++y)
            for (int x = 0; x < chart.frame.width(); ++x)
                if (chart.frame.at(x, y).r != 0.5f) {
                    sum += chart.frame.at(x, y).r;
                    ++n;
                }
        ASSERT_GT(n, 0);
        EXPECT_NEAR(sum / n, chart_letter_luminance(k, 0.15), 1.0 / 255.0);
    }
}

TEST(ContrastChart, StopsBeforeContrastUnderflows) {
    ContrastChartSpec spec;
    spec.triplets = 20;
    const auto chart = render_contrast_chart(spec);
    EXPECT_EQ(chart.triplets, 15);
    EXPECT_GE(0.5 * chart_weber(14, 0.15), 1.0 / 255.0);
    EXPECT_LT(0.5 * chart_weber(15, 0.15), 1.0 / 255.0);
    EXPECT_EQ(letter_bands(chart.frame).size(), 15u);
}

TEST(ContrastChart, SeedPicksLetters) {
    ContrastChartSpec a, b;
    b.seed = 9;
    EXPECT_EQ(render_contrast_chart(a).letters, render_contrast_chart(a).letters);
    EXPECT_NE(render_contrast_chart(a).letters, render_contrast_chart(b).letters);
}

TEST(ContrastChart, RejectsImpossibleLayouts) {
    ContrastChartSpec spec;
    spec.width = 20;
    spec.height = 20;
    EXPECT_THROW(render_contrast_chart(spec), ParameterError);
    spec = {};
    spec.triplets = 0;
    EXPECT_THROW(render_contrast_chart(spec), ParameterError);
    spec = {};
    spec.contrast_step = 0;
    EXPECT_THROW(render_contrast_chart(spec), ParameterError);
}

// ---------------------------------------------------------------------------
// Plates

TEST(Plates, SmallPlatesAreCopiedUnchanged) {
    const Frame plate = vt::random_frame(30, 20, 1);
    const Frame out = letterbox_plate(plate, 100, 60);
    const int ox = 35, oy = 20;
    for (int y = 0; y < 20; ++y)
        for (int x = 0; x < 30; ++x) ASSERT_EQ(out.at(ox + x, oy + y), plate.at(x, y));
    EXPECT_EQ(out.at(0, 0), (Rgb{0.5f, 0.5f, 0.5f}));
    EXPECT_EQ(out.at(99, 59), (Rgb{0.5f, 0.5f, 0.5f}));
}

TEST(Plates, LargePlatesShrinkKeepingAspect) {
    const Frame plate(400, 100, Rgb{0.2f, 0.4f, 0.6f});
    const Frame out = letterbox_plate(plate, 200, 200);
    // 2:1 shrink -> 200x50 band in the middle
    EXPECT_EQ(out.at(100, 74), (Rgb{0.5f, 0.5f, 0.5f}));
    EXPECT_EQ(out.at(100, 125), (Rgb{0.5f, 0.5f, 0.5f}));
    EXPECT_NEAR(out.at(100, 100).g, 0.4f, 1e-6);
    EXPECT_NEAR(out.at(0, 75).r, 0.2f, 1e-6);
    EXPECT_NEAR(out.at(199, 124).b, 0.6f, 1e-6);
}

TEST(Plates, AreaResizeAveragesBlocks) {
    Frame f(4, 2);
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 2; ++y) f.set(x, y, {x * 0.25f, 0, y * 1.0f});
    const Frame out = area_resize(f, 2, 1);
    EXPECT_NEAR(out.at(0, 0).r, 0.125f, 1e-6);
    EXPECT_NEAR(out.at(1, 0).r, 0.625f, 1e-6);
    EXPECT_NEAR(out.at(1, 0).b, 0.5f, 1e-6);
}

TEST(Plates, UnreadableFilesAreErrors) {
    const auto path = std::filesystem::temp_directory_path() / "visim_not_an_image.png";
    { std::ofstream(path) << "hello"; }
    EXPECT_THROW(display_plate(path, 100, 100), ImageIoError);
    EXPECT_THROW(display_plate("/nonexistent.png", 100, 100), ImageIoError);
    std::filesystem::remove(path);
}
