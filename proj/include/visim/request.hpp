#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>

#include "visim/context.hpp"
#include "visim/pipeline.hpp"
#include "visim/profiles.hpp"

namespace visim {

/// Everything besides the source frame that determines a rendered frame.
/// The CLI and the service both go through render_request, which is what
/// makes their outputs byte-identical.
struct RenderRequest {
    Profile profile;
    Vec2 gaze{0.5, 0.5};  // normalized; clamped to [0,1]
    double time = 0.0;    // seconds since session start
    std::optional<std::uint64_t> seed;  // overrides the profile seed
    ViewingGeometry geometry;
};

inline void check_request(const RenderRequest& r) {
    if (!std::isfinite(r.gaze.x) || !std::isfinite(r.gaze.y)) throw ParameterError("gaze must be finite");
    if (!std::isfinite(r.time) || r.time < 0.0) throw ParameterError("time must be finite and >= 0");
    r.geometry.check();
}

/// Session seed wins over the request seed, which wins over the profile seed.
inline std::uint64_t effective_seed(const RenderRequest& r, const SessionState* state) {
    if (state) return state->seed;
    return r.seed.value_or(r.profile.seed);
}

inline Frame render_request(const Frame& source, const RenderRequest& r, SessionState* state = nullptr) {
    check_request(r);
    const RenderContext ctx = context_for(source, r.gaze, r.time, effective_seed(r, state), r.geometry);
    return render(source, r.profile.stack, ctx, state);
}

}  // namespace visim
