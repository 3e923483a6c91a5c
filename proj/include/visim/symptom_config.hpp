#pragma once

#include <array>
#include <cmath>
#include <cstdio>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <type_traits>
#include <variant>
#include <vector>

#include "visim/frame.hpp"

namespace visim {

// ---------------------------------------------------------------------------
// Parameter descriptors. Each config struct lists its fields in `params()`;
// validation, JSON, the service schema and profile interpolation all walk
// these tables, so ranges live in exactly one place.
// ---------------------------------------------------------------------------

template <class C>
struct NumberParam {
    std::string_view name;
    double C::*member;
    double min;
    double max;
    bool integer = false;
    std::string_view unit = "";
};

template <class C>
struct FlagParam {
    std::string_view name;
    bool C::*member;
};

template <class C, class E>
struct ChoiceParam {
    std::string_view name;
    E C::*member;
    std::span<const std::string_view> labels;
};

enum class CvdType { protanomaly, deuteranomaly, tritanomaly, monochrome };
inline constexpr std::array<std::string_view, 4> kCvdTypeLabels = {"protanomaly", "deuteranomaly",
                                                                   "tritanomaly", "monochrome"};

enum class FloaterColor { black, white };
inline constexpr std::array<std::string_view, 2> kFloaterColorLabels = {"black", "white"};

// Sizes marked "screen" are fractions of the full-screen size max(width, height).

struct CentralLoss {
    static constexpr std::string_view type = "central_vision_loss";
    static constexpr std::string_view label = "Vision loss, central";
    static constexpr bool gaze_contingent = true;
    double size = 0.3;
    static constexpr auto params() {
        return std::tuple{NumberParam<CentralLoss>{"size", &CentralLoss::size, 0.0, 1.0, false, "screen"}};
    }
    static CentralLoss neutral() { return {0.0}; }
};

struct Hyperopia {
    static constexpr std::string_view type = "hyperopia";
    static constexpr std::string_view label = "Hyperopia";
    static constexpr bool gaze_contingent = false;
    double cpd = 5.0;
    static constexpr auto params() {
        return std::tuple{NumberParam<Hyperopia>{"cpd", &Hyperopia::cpd, 0.01, 30.0, false, "cycles/degree"}};
    }
    static Hyperopia neutral() { return {30.0}; }
};

struct Cvd {
    static constexpr std::string_view type = "color_vision_deficiency";
    static constexpr std::string_view label = "Color vision deficiency";
    static constexpr bool gaze_contingent = false;
    CvdType kind = CvdType::deuteranomaly;
    double severity = 100.0;
    static constexpr auto params() {
        return std::tuple{ChoiceParam<Cvd, CvdType>{"type", &Cvd::kind, kCvdTypeLabels},
                          NumberParam<Cvd>{"severity", &Cvd::severity, 0.0, 100.0, false, "%"}};
    }
    static Cvd neutral() { return {CvdType::deuteranomaly, 0.0}; }
};

struct ContrastSens {
    static constexpr std::string_view type = "contrast_sensitivity";
    static constexpr std::string_view label = "Contrast sensitivity";
    static constexpr bool gaze_contingent = false;
    double brightness = 0.1;
    double contrast = -0.4;
    double gamma = 0.8;
    static constexpr auto params() {
        return std::tuple{NumberParam<ContrastSens>{"brightness", &ContrastSens::brightness, -1.0, 1.0},
                          NumberParam<ContrastSens>{"contrast", &ContrastSens::contrast, -1.0, 1.0},
                          NumberParam<ContrastSens>{"gamma", &ContrastSens::gamma, 0.0, 1.0}};
    }
    static ContrastSens neutral() { return {0.0, 0.0, 1.0}; }
};

struct MetamorphPoint {
    static constexpr std::string_view type = "metamorphopsia_pointwise";
    static constexpr std::string_view label = "Metamorphopsia pointwise";
    static constexpr bool gaze_contingent = true;
    // Pointwise metamorphopsia has no tunable parameters; `active` is the
    // on/off switch that stands in for them when profiles are interpolated.
    bool active = true;
    static constexpr auto params() { return std::tuple{}; }
    static MetamorphPoint neutral() { return {false}; }
};

struct Nystagmus {
    static constexpr std::string_view type = "nystagmus";
    static constexpr std::string_view label = "Nystagmus";
    static constexpr bool gaze_contingent = false;
    double speed = 0.3;
    double amplitude = 5.0;
    static constexpr auto params() {
        return std::tuple{NumberParam<Nystagmus>{"speed", &Nystagmus::speed, 0.0, 1.0, false, "s"},
                          NumberParam<Nystagmus>{"amplitude", &Nystagmus::amplitude, 0.0, 20.0, false, "% width"}};
    }
    static Nystagmus neutral() { return {0.3, 0.0}; }
};

struct Retinopathy {
    static constexpr std::string_view type = "retinopathy";
    static constexpr std::string_view label = "Retinopathy / Floaters";
    static constexpr bool gaze_contingent = true;
    FloaterColor color = FloaterColor::black;
    double opacity = 0.8;
    double density = 200.0;
    double speed = 0.2;
    bool centering = false;
    double circle_radius = 0.25;
    double floater_size = 1.0;  // extension: scale of the blob radius distribution
    static constexpr auto params() {
        return std::tuple{ChoiceParam<Retinopathy, FloaterColor>{"color", &Retinopathy::color, kFloaterColorLabels},
                          NumberParam<Retinopathy>{"opacity", &Retinopathy::opacity, 0.0, 1.0},
                          NumberParam<Retinopathy>{"density", &Retinopathy::density, 0.0, 2500.0, true, "dots"},
                          NumberParam<Retinopathy>{"speed", &Retinopathy::speed, 0.0, 1.0},
                          FlagParam<Retinopathy>{"centering", &Retinopathy::centering},
                          NumberParam<Retinopathy>{"circle_radius", &Retinopathy::circle_radius, 0.0, 1.0, false, "screen"},
                          NumberParam<Retinopathy>{"floater_size", &Retinopathy::floater_size, 0.25, 4.0, false, "scale"}};
    }
    static Retinopathy neutral() {
        Retinopathy r;
        r.opacity = 0.0;
        return r;
    }
};

struct Teichopsia {
    static constexpr std::string_view type = "teichopsia";
    static constexpr std::string_view label = "Teichopsia";
    static constexpr bool gaze_contingent = true;
    double strength = 0.7;
    static constexpr auto params() {
        return std::tuple{NumberParam<Teichopsia>{"strength", &Teichopsia::strength, 0.0, 1.0}};
    }
    static Teichopsia neutral() { return {0.0}; }
};

struct MetamorphOverlay {
    static constexpr std::string_view type = "metamorphopsia_overlay";
    static constexpr std::string_view label = "Metamorphopsia overlay";
    static constexpr bool gaze_contingent = false;
    double speed = 0.2;
    double frequency = 0.3;
    double amplitude = 0.3;
    static constexpr auto params() {
        return std::tuple{NumberParam<MetamorphOverlay>{"speed", &MetamorphOverlay::speed, 0.0, 1.0},
                          NumberParam<MetamorphOverlay>{"frequency", &MetamorphOverlay::frequency, 0.0, 1.0},
                          NumberParam<MetamorphOverlay>{"amplitude", &MetamorphOverlay::amplitude, 0.0, 1.0}};
    }
    static MetamorphOverlay neutral() { return {0.2, 0.3, 0.0}; }
};

struct Glare {
    static constexpr std::string_view type = "glare";
    static constexpr std::string_view label = "Glare vision / photophobia";
    static constexpr bool gaze_contingent = false;
    double intensity = 0.6;
    double blur = 0.5;
    double threshold = 0.6;
    static constexpr auto params() {
        return std::tuple{NumberParam<Glare>{"intensity", &Glare::intensity, 0.0, 1.0},
                          NumberParam<Glare>{"blur", &Glare::blur, 0.0, 1.0},
                          NumberParam<Glare>{"threshold", &Glare::threshold, 0.0, 1.0}};
    }
    static Glare neutral() { return {0.0, 0.5, 0.6}; }
};

struct PeripheralLoss {
    static constexpr std::string_view type = "peripheral_vision_loss";
    static constexpr std::string_view label = "Vision loss, peripheral";
    static constexpr bool gaze_contingent = true;
    // 1.0 is a tunnel wide enough to cover the whole screen from any gaze point.
    double size = 0.3;
    static constexpr auto params() {
        return std::tuple{NumberParam<PeripheralLoss>{"size", &PeripheralLoss::size, 0.0, 1.0, false, "screen"}};
    }
    static PeripheralLoss neutral() { return {1.0}; }
};

struct Cataract {
    static constexpr std::string_view type = "cataracts";
    static constexpr std::string_view label = "Cataracts";
    static constexpr bool gaze_contingent = false;
    double severity = 0.5;
    double frosting = 0.3;
    static constexpr auto params() {
        return std::tuple{NumberParam<Cataract>{"severity", &Cataract::severity, 0.0, 1.0},
                          NumberParam<Cataract>{"frosting", &Cataract::frosting, 0.0, 1.0}};
    }
    static Cataract neutral() { return {0.0, 0.0}; }
};

struct InFilling {
    static constexpr std::string_view type = "in_filling";
    static constexpr std::string_view label = "In-Filling";
    static constexpr bool gaze_contingent = true;
    double size = 0.05;
    double position_x = 0.0;  // offset of the disk center from the gaze point, screen fractions
    double position_y = 0.0;
    static constexpr auto params() {
        return std::tuple{NumberParam<InFilling>{"size", &InFilling::size, 0.0, 0.25, false, "screen"},
                          NumberParam<InFilling>{"position_x", &InFilling::position_x, -0.5, 0.5, false, "screen"},
                          NumberParam<InFilling>{"position_y", &InFilling::position_y, -0.5, 0.5, false, "screen"}};
    }
    static InFilling neutral() { return {0.0, 0.0, 0.0}; }
};

struct DoubleVision {
    static constexpr std::string_view type = "double_vision";
    static constexpr std::string_view label = "Double Vision";
    static constexpr bool gaze_contingent = false;
    double displacement = 0.01;
    static constexpr auto params() {
        return std::tuple{
            NumberParam<DoubleVision>{"displacement", &DoubleVision::displacement, 0.0, 0.25, false, "screen"}};
    }
    static DoubleVision neutral() { return {0.0}; }
};

struct Distortion {
    static constexpr std::string_view type = "distortion";
    static constexpr std::string_view label = "Distortion";
    static constexpr bool gaze_contingent = true;
    double radius = 0.2;
    double suction = 0.3;
    double inner_radius = 0.03;  // must not exceed radius
    double noise = 0.2;
    static constexpr auto params() {
        return std::tuple{NumberParam<Distortion>{"radius", &Distortion::radius, 0.0, 1.0, false, "screen"},
                          NumberParam<Distortion>{"suction", &Distortion::suction, 0.0, 1.0},
                          NumberParam<Distortion>{"inner_radius", &Distortion::inner_radius, 0.0, 1.0, false, "screen"},
                          NumberParam<Distortion>{"noise", &Distortion::noise, 0.0, 1.0}};
    }
    static Distortion neutral() { return {0.2, 0.0, 0.0, 0.0}; }
};

struct FovealDarkness {
    static constexpr std::string_view type = "foveal_darkness";
    static constexpr std::string_view label = "Foveal Darkness";
    static constexpr bool gaze_contingent = true;
    double size = 0.15;
    double fade = 0.5;
    double opacity = 0.8;
    static constexpr auto params() {
        return std::tuple{NumberParam<FovealDarkness>{"size", &FovealDarkness::size, 0.0, 1.0, false, "screen"},
                          NumberParam<FovealDarkness>{"fade", &FovealDarkness::fade, 0.0, 1.0},
                          NumberParam<FovealDarkness>{"opacity", &FovealDarkness::opacity, 0.0, 1.0}};
    }
    static FovealDarkness neutral() { return {0.15, 0.5, 0.0}; }
};

struct FlickeringStars {
    static constexpr std::string_view type = "flickering_stars";
    static constexpr std::string_view label = "Flickering Stars";
    static constexpr bool gaze_contingent = false;
    double radius = 0.05;
    double fade = 0.5;
    static constexpr auto params() {
        return std::tuple{NumberParam<FlickeringStars>{"radius", &FlickeringStars::radius, 0.0, 1.0, false, "screen"},
                          NumberParam<FlickeringStars>{"fade", &FlickeringStars::fade, 0.0, 1.0}};
    }
    static FlickeringStars neutral() { return {0.0, 0.5}; }
};

struct DetailLoss {
    static constexpr std::string_view type = "detail_loss";
    static constexpr std::string_view label = "Detail Loss";
    static constexpr bool gaze_contingent = false;
    double clusters = 100.0;
    static constexpr auto params() {
        return std::tuple{NumberParam<DetailLoss>{"clusters", &DetailLoss::clusters, 10.0, 1000.0, true, "clusters"}};
    }
    static DetailLoss neutral() { return {1000.0}; }
};

/// One alternative per shader in the catalog, in catalog order.
using SymptomConfig =
    std::variant<CentralLoss, Hyperopia, Cvd, ContrastSens, MetamorphPoint, Nystagmus, Retinopathy,
                 Teichopsia, MetamorphOverlay, Glare, PeripheralLoss, Cataract, InFilling, DoubleVision,
                 Distortion, FovealDarkness, FlickeringStars, DetailLoss>;

inline constexpr std::size_t kSymptomCount = std::variant_size_v<SymptomConfig>;

/// Shaders whose output affected viewers did not recognize; clients show a
/// notice next to them.
template <class C>
inline constexpr bool needs_disclaimer = std::is_same_v<C, MetamorphPoint> || std::is_same_v<C, MetamorphOverlay>;

inline constexpr std::string_view kDisclaimerText =
    "Experimental: this rendering was not recognized by people who have the symptom.";

template <class F>
void for_each_symptom_type(F&& f) {
    [&]<std::size_t... I>(std::index_sequence<I...>) {
        (f(std::variant_alternative_t<I, SymptomConfig>{}), ...);
    }(std::make_index_sequence<kSymptomCount>{});
}

inline std::string_view symptom_type(const SymptomConfig& c) {
    return std::visit([](const auto& s) { return std::decay_t<decltype(s)>::type; }, c);
}

inline bool is_gaze_contingent(const SymptomConfig& c) {
    return std::visit([](const auto& s) { return std::decay_t<decltype(s)>::gaze_contingent; }, c);
}

inline std::vector<std::string_view> known_symptom_types() {
    std::vector<std::string_view> out;
    for_each_symptom_type([&](const auto& s) { out.push_back(std::decay_t<decltype(s)>::type); });
    return out;
}

/// Default-parameter config for a type name; false when the name is unknown.
inline bool make_symptom(std::string_view type, SymptomConfig& out) {
    bool found = false;
    for_each_symptom_type([&](const auto& s) {
        if (!found && std::decay_t<decltype(s)>::type == type) {
            out = s;
            found = true;
        }
    });
    return found;
}

inline SymptomConfig neutral_of(const SymptomConfig& c) {
    return std::visit([](const auto& s) -> SymptomConfig { return std::decay_t<decltype(s)>::neutral(); }, c);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct Violation {
    std::size_t entry = 0;
    std::string symptom;
    std::string field;
    double value = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::string message;
};

namespace detail {

inline Violation make_violation(std::string_view symptom, std::string_view field, double value, double lo,
                                double hi, std::string_view extra = "") {
    Violation v;
    v.symptom = symptom;
    v.field = field;
    v.value = value;
    v.min = lo;
    v.max = hi;
    v.message = std::string(symptom) + "." + std::string(field) + " = " + format_number(value) +
                " must lie in [" + format_number(lo) + "," + format_number(hi) + "]";
    if (!extra.empty()) v.message += std::string(" (") + std::string(extra) + ")";
    return v;
}

template <class C>
void check_param(const C& c, const NumberParam<C>& p, std::vector<Violation>& out) {
    const double v = c.*(p.member);
    if (!std::isfinite(v) || v < p.min || v > p.max) {
        out.push_back(make_violation(C::type, p.name, v, p.min, p.max));
    } else if (p.integer && v != std::floor(v)) {
        out.push_back(make_violation(C::type, p.name, v, p.min, p.max, "must be an integer"));
    }
}

template <class C>
void check_param(const C&, const FlagParam<C>&, std::vector<Violation>&) {}

template <class C, class E>
void check_param(const C& c, const ChoiceParam<C, E>& p, std::vector<Violation>& out) {
    const auto idx = static_cast<std::size_t>(c.*(p.member));
    if (idx >= p.labels.size())
        out.push_back(make_violation(C::type, p.name, static_cast<double>(idx), 0.0,
                                     static_cast<double>(p.labels.size() - 1), "unknown choice"));
}

template <class C>
void check_dependent(const C&, std::vector<Violation>&) {}

inline void check_dependent(const Distortion& d, std::vector<Violation>& out) {
    if (std::isfinite(d.radius) && std::isfinite(d.inner_radius) && d.inner_radius > d.radius &&
        d.inner_radius <= 1.0)
        out.push_back(make_violation(Distortion::type, "inner_radius", d.inner_radius, 0.0, d.radius,
                                     "inner radius may not exceed radius"));
}

}  // namespace detail

/// Every out-of-range field of one config; empty when renderable.
template <class C>
std::vector<Violation> validate_config(const C& c) {
    std::vector<Violation> out;
    std::apply([&](const auto&... p) { (detail::check_param(c, p, out), ...); }, C::params());
    detail::check_dependent(c, out);
    return out;
}

inline std::vector<Violation> validate_config(const SymptomConfig& c) {
    return std::visit([](const auto& s) { return validate_config(s); }, c);
}

/// Throws ParameterError naming each violation.
template <class C>
void require_valid(const C& c) {
    const auto violations = validate_config(c);
    if (violations.empty()) return;
    std::string msg;
    for (const auto& v : violations) {
        if (!msg.empty()) msg += "; ";
        msg += v.message;
    }
    throw ParameterError(msg);
}

}  // namespace visim
