// Property tests over the whole symptom catalog.

#include <gtest/gtest.h>

#include <random>

#include "support.hpp"

using namespace visim;
namespace vt = visim::testing;

namespace {

std::string name_of(const SymptomConfig& c) { return std::string(symptom_type(c)); }

}  // namespace

TEST(Properties, CatalogHasEighteenTypes) {
    EXPECT_EQ(kSymptomCount, 18u);
    const auto names = known_symptom_types();
    EXPECT_EQ(std::set<std::string_view>(names.begin(), names.end()).size(), 18u);
}

TEST(Properties, NeutralParametersReproduceTheInput) {
    for (std::uint32_t seed : {1u, 2u}) {
        const Frame f = vt::random_frame(97, 61, seed);
        for (const auto& c : vt::all_neutrals())
            for (Vec2 g : {Vec2{0.5, 0.5}, Vec2{0.0, 1.0}, Vec2{0.83, 0.12}})
                for (double t : {0.0, 0.77, 12.5})
                    ASSERT_EQ(apply_symptom(f, context_for(f, g, t, seed), c), f) << name_of(c);
    }
}

TEST(Properties, DefaultsValidateAndNeutralsValidate) {
    for (const auto& c : vt::all_defaults()) EXPECT_TRUE(validate_config(c).empty()) << name_of(c);
    for (const auto& c : vt::all_neutrals()) EXPECT_TRUE(validate_config(c).empty()) << name_of(c);
}

namespace {

/// For each numeric field: endpoints pass, endpoints nudged outward fail, and
/// non-finite values fail. Returns the number of fields checked.
template <class C>
int check_ranges(const C& base) {
    constexpr double kInf = std::numeric_limits<double>::infinity();
    int fields = 0;
    auto one = [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, NumberParam<C>>) {
            ++fields;
            const double span = p.max - p.min;
            const double eps = p.integer ? 1.0 : std::max(1e-9, 1e-9 * span);
            auto with = [&](double v) {
                C c = base;
                if constexpr (std::is_same_v<C, Distortion>) {
                    // inner_radius is bounded by radius too; give it room.
                    c.radius = 1.0;
                    c.inner_radius = 0.0;
                }
                c.*(p.member) = v;
                return validate_config(c);
            };
            EXPECT_TRUE(with(p.min).empty()) << C::type << "." << p.name << " min";
            EXPECT_TRUE(with(p.max).empty()) << C::type << "." << p.name << " max";
            for (double bad : {p.min - eps, p.max + eps, std::nan(""), kInf, -kInf}) {
                // Other cross-field rules may fire too (inner_radius <= radius);
                // the field's own range must be among the violations.
                const auto v = with(bad);
                const auto it = std::find_if(v.begin(), v.end(), [&](const Violation& x) { return x.field == p.name; });
                ASSERT_NE(it, v.end()) << C::type << "." << p.name << " = " << bad;
                EXPECT_EQ(it->min, p.min);
                EXPECT_EQ(it->max, p.max);
            }
            if (p.integer && span >= 1.0) EXPECT_EQ(with(p.min + 0.5).size(), 1u) << C::type << "." << p.name;
        } else if constexpr (!std::is_same_v<P, FlagParam<C>>) {
            ++fields;
            C c = base;
            using E = std::decay_t<decltype(c.*(p.member))>;
            c.*(p.member) = static_cast<E>(p.labels.size());
            EXPECT_EQ(validate_config(c).size(), 1u) << C::type << "." << p.name;
            for (std::size_t i = 0; i < p.labels.size(); ++i) {
                c.*(p.member) = static_cast<E>(i);
                EXPECT_TRUE(validate_config(c).empty());
            }
        }
    };
    std::apply([&](const auto&... p) { (one(p), ...); }, C::params());
    return fields;
}

}  // namespace

TEST(Properties, RangeEnforcementIsExhaustive) {
    int fields = 0;
    for_each_symptom_type([&](const auto& s) { fields += check_ranges(s); });
    EXPECT_EQ(fields, 39);
}

TEST(Properties, DocumentedRangesMatchTheCatalogTable) {
    EXPECT_EQ(std::get<0>(Hyperopia::params()).min, 0.01);
    EXPECT_EQ(std::get<0>(Hyperopia::params()).max, 30.0);
    EXPECT_EQ(std::get<2>(Retinopathy::params()).max, 2500.0);
    EXPECT_EQ(std::get<1>(Nystagmus::params()).max, 20.0);
    EXPECT_EQ(std::get<0>(DoubleVision::params()).max, 0.25);
    EXPECT_EQ(std::get<0>(InFilling::params()).max, 0.25);
    EXPECT_EQ(std::get<0>(DetailLoss::params()).min, 10.0);
    EXPECT_EQ(std::get<0>(DetailLoss::params()).max, 1000.0);
    EXPECT_EQ(std::get<0>(ContrastSens::params()).min, -1.0);
    EXPECT_EQ(std::get<1>(Cvd::params()).max, 100.0);
}

namespace {

template <class C>
void push_past_max(C&, const FlagParam<C>&, bool&) {}
template <class C, class E>
void push_past_max(C&, const ChoiceParam<C, E>&, bool&) {}
template <class C>
void push_past_max(C& c, const NumberParam<C>& p, bool& done) {
    if (!done) c.*(p.member) = p.max + 1.0;
    done = true;
}

}  // namespace

TEST(Properties, InvalidConfigsAreRejectedBeforeRendering) {
    const Frame f(8, 8);
    const RenderContext ctx = context_for(f, {0.5, 0.5}, 0, 0);
    for (const auto& c : vt::all_defaults()) {
        SymptomConfig bad = c;
        bool pushed = false;
        std::visit(
            [&](auto& s) {
                using C = std::decay_t<decltype(s)>;
                std::apply([&](const auto&... p) { (push_past_max(s, p, pushed), ...); }, C::params());
            },
            bad);
        if (!pushed) continue;
        EXPECT_THROW(apply_symptom(f, ctx, bad), ParameterError) << name_of(c);
    }
}

TEST(Properties, OutputStaysInUnitRange) {
    std::mt19937_64 rng(5);
    const Frame f = vt::random_frame(64, 40, 3);
    for (int trial = 0; trial < 3; ++trial)
        for (std::size_t i = 0; i < kSymptomCount; ++i) {
            const SymptomConfig c = vt::random_config(i, rng);
            const Frame out = apply_symptom(f, context_for(f, {0.4, 0.6}, 0.9 * trial, trial), c);
            ASSERT_EQ(out.width(), f.width());
            ASSERT_EQ(out.height(), f.height());
            ASSERT_TRUE(vt::all_in_unit_range(out)) << name_of(c);
        }
}

TEST(Properties, RenderingIsDeterministic) {
    std::mt19937_64 rng(6);
    const Frame f = vt::random_frame(64, 40, 4);
    for (std::size_t i = 0; i < kSymptomCount; ++i) {
        const SymptomConfig c = vt::random_config(i, rng);
        const RenderContext ctx = context_for(f, {0.3, 0.7}, 1.7, 11);
        EXPECT_EQ(apply_symptom(f, ctx, c), apply_symptom(f, ctx, c)) << name_of(c);
    }
}

TEST(Properties, NonGazeShadersIgnoreTheGaze) {
    std::mt19937_64 rng(7);
    const Frame f = vt::random_frame(80, 50, 5);
    for (std::size_t i = 0; i < kSymptomCount; ++i) {
        const SymptomConfig c = vt::random_config(i, rng);
        if (is_gaze_contingent(c)) continue;
        const Frame a = apply_symptom(f, context_for(f, {0.1, 0.2}, 0.6, 3), c);
        const Frame b = apply_symptom(f, context_for(f, {0.9, 0.7}, 0.6, 3), c);
        EXPECT_EQ(a, b) << name_of(c);
    }
}

TEST(Properties, GazeFlagsMatchTheCatalog) {
    std::set<std::string_view> flagged;
    for (const auto& c : vt::all_defaults())
        if (is_gaze_contingent(c)) flagged.insert(symptom_type(c));
    const std::set<std::string_view> expected = {
        CentralLoss::type,  MetamorphPoint::type, Retinopathy::type, Teichopsia::type,
        PeripheralLoss::type, InFilling::type,    Distortion::type,  FovealDarkness::type};
    EXPECT_EQ(flagged, expected);
}

TEST(Properties, GazeShadersFollowTheGaze) {
    // Period 5 divides both components of the shift, so the texture itself is
    // shift-invariant and any motion of the effect comes from the gaze.
    const Frame f = vt::tiled_noise_frame(480, 360, 5, 12);
    const Vec2 a{200, 200}, delta{40, -25};
    for (const auto& gc : vt::gaze_cases()) {
        RenderContext ca = context_for(f, {0, 0}, 0.0, 7);
        ca.gaze = a;
        RenderContext cb = ca;
        cb.gaze = {a.x + delta.x, a.y + delta.y};
        const auto da = vt::smoothed_difference(apply_symptom(f, ca, gc.config), f, gc.radius);
        const auto db = vt::smoothed_difference(apply_symptom(f, cb, gc.config), f, gc.radius);
        const auto pa = vt::extreme_of(da, 480, gc.maximum), pb = vt::extreme_of(db, 480, gc.maximum);
        EXPECT_NEAR(pb.x - pa.x, delta.x, 2) << gc.note;
        EXPECT_NEAR(pb.y - pa.y, delta.y, 2) << gc.note;
    }
}

TEST(Properties, CvdPreservesTheGrayAxis) {
    for (CvdType k : {CvdType::protanomaly, CvdType::deuteranomaly, CvdType::tritanomaly, CvdType::monochrome})
        for (double s = 0; s <= 100; s += 5) {
            Frame f(256, 1);
            for (int x = 0; x < 256; ++x) f.set(x, 0, {x / 255.0f, x / 255.0f, x / 255.0f});
            const Frame out = cvd(f, context_for(f, {0.5, 0.5}, 0, 0), {k, s});
            ASSERT_LE(vt::max_abs_diff(out, f), 1.0f / 255.0f) << static_cast<int>(k) << " @ " << s;
        }
}
