#pragma once

#include <type_traits>
#include <utility>
#include <variant>

#include "visim/symptoms/color.hpp"
#include "visim/symptoms/common.hpp"
#include "visim/symptoms/distortions.hpp"
#include "visim/symptoms/field_loss.hpp"
#include "visim/symptoms/optics.hpp"
#include "visim/symptoms/overlays.hpp"

namespace visim {

/// Applies one symptom to a frame. `cache` only memoizes seed-derived noise
/// tables; results are identical with or without it.
inline Frame apply_symptom(Frame frame, const RenderContext& ctx, const SymptomConfig& config,
                           ShaderCache* cache = nullptr) {
    return std::visit(
        [&](const auto& c) -> Frame {
            using C = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<C, CentralLoss>) return central_vision_loss(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, Hyperopia>) return hyperopia(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, Cvd>) return cvd(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, ContrastSens>) return contrast_sensitivity(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, MetamorphPoint>) return metamorph_pointwise(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, Nystagmus>) return nystagmus(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, Retinopathy>) return retinopathy(std::move(frame), ctx, c, cache);
            else if constexpr (std::is_same_v<C, Teichopsia>) return teichopsia(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, MetamorphOverlay>) return metamorph_overlay(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, Glare>) return glare(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, PeripheralLoss>) return peripheral_vision_loss(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, Cataract>) return cataracts(std::move(frame), ctx, c, cache);
            else if constexpr (std::is_same_v<C, InFilling>) return in_filling(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, DoubleVision>) return double_vision(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, Distortion>) return distortion(std::move(frame), ctx, c, cache);
            else if constexpr (std::is_same_v<C, FovealDarkness>) return foveal_darkness(std::move(frame), ctx, c);
            else if constexpr (std::is_same_v<C, FlickeringStars>) return flickering_stars(std::move(frame), ctx, c);
            else {
                static_assert(std::is_same_v<C, DetailLoss>);
                return detail_loss(std::move(frame), ctx, c);
            }
        },
        config);
}

}  // namespace visim
