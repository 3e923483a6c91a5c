#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "visim/profiles.hpp"

namespace visim {

// Participant-style presets P1..P7. Each is a qualitative reconstruction of a
// described experience, not a clinical model; the notes say so. Geometric
// displacement shaders come first, then resolution and color shaders.

namespace detail {

inline Profile preset(std::string name, std::string notes, std::vector<SymptomConfig> configs) {
    Profile p;
    p.name = std::move(name);
    p.seed = 1;
    p.notes = "Qualitative reconstruction. " + std::move(notes);
    for (auto& c : configs) p.stack.entries.push_back({std::move(c), true});
    return p;
}

}  // namespace detail

inline std::vector<Profile> builtin_presets() {
    std::vector<Profile> out;
    {
        Distortion d;
        d.radius = 0.2;
        d.suction = 0.8;
        d.inner_radius = 0.02;
        d.noise = 0.2;
        out.push_back(detail::preset("P1", "Center pulled inward like a vortex.", {d}));
    }
    {
        Glare g;
        g.intensity = 0.8;
        g.threshold = 0.5;
        FovealDarkness f;
        f.size = 0.12;
        f.fade = 0.6;
        f.opacity = 0.6;
        out.push_back(detail::preset("P2", "Bright and blurry with a gray central spot.",
                                     {Hyperopia{4.0}, g, f}));
    }
    {
        Cataract c;
        c.severity = 0.4;
        c.frosting = 0.2;
        out.push_back(detail::preset("P3", "Blur at the center and in the periphery under a gray veil.",
                                     {CentralLoss{0.25}, PeripheralLoss{0.35}, c}));
    }
    {
        FovealDarkness f;
        f.size = 0.15;
        f.fade = 0.6;
        f.opacity = 0.9;
        out.push_back(detail::preset("P4", "Blurry with a dark, blurry central spot.", {Hyperopia{3.0}, f}));
    }
    out.push_back(detail::preset("P5", "Heavy pixelation.", {DetailLoss{40.0}}));
    {
        ContrastSens c;
        c.brightness = 0.6;
        c.contrast = -0.3;
        c.gamma = 0.6;
        Glare g;
        g.intensity = 1.0;
        g.threshold = 0.3;
        FovealDarkness f;
        f.size = 0.12;
        f.opacity = 1.0;
        out.push_back(detail::preset("P6", "Extremely bright with a dark central spot.", {c, g, f}));
    }
    {
        Retinopathy r;
        r.color = FloaterColor::white;
        r.opacity = 0.9;
        r.density = 60.0;
        r.speed = 0.1;
        r.centering = true;
        r.circle_radius = 0.08;
        out.push_back(detail::preset("P7", "Cluster of white dots near the point of gaze.", {r}));
    }
    return out;
}

inline std::optional<Profile> find_preset(std::string_view name) {
    for (auto& p : builtin_presets())
        if (p.name == name) return p;
    return std::nullopt;
}

}  // namespace visim
