#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>

#include "visim/context.hpp"
#include "visim/frame.hpp"
#include "visim/mip.hpp"
#include "visim/noise.hpp"
#include "visim/symptom_config.hpp"

namespace visim {

/// Per-session memo of seed-derived tables. Purely an optimization: every
/// cached value is rebuilt identically from the seed when absent.
class ShaderCache {
public:
    std::shared_ptr<const PerlinTable> perlin(std::uint64_t seed) {
        std::lock_guard lock(mutex_);
        auto& slot = tables_[seed];
        if (!slot) slot = std::make_shared<const PerlinTable>(seed);
        return slot;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return tables_.size();
    }

private:
    mutable std::mutex mutex_;
    std::map<std::uint64_t, std::shared_ptr<const PerlinTable>> tables_;
};

namespace detail {

inline NoiseSampler noise_for(const NoiseField& field, ShaderCache* cache) {
    if (cache) return NoiseSampler(field, cache->perlin(field.seed));
    return NoiseSampler(field);
}

inline double smoothstep01(double t) {
    t = t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
    return t * t * (3.0 - 2.0 * t);
}

/// Salts so different shaders never share a noise permutation for one seed.
enum class NoiseSalt : std::uint64_t {
    cataract = 0xca7a,
    distortion = 0xd157,
    retinopathy = 0x7e71,
    flicker = 0xf11c,
    teichopsia = 0x7e1c,
};

inline std::uint64_t salted(std::uint64_t seed, NoiseSalt salt) {
    return hash_combine(seed, static_cast<std::uint64_t>(salt));
}

struct PixelBox {
    int x0, y0, x1, y1;  // inclusive; empty when x0 > x1 or y0 > y1
};

inline PixelBox box_around(const Frame& f, Vec2 c, double rx, double ry) {
    return {std::max(0, static_cast<int>(std::floor(c.x - rx))),
            std::max(0, static_cast<int>(std::floor(c.y - ry))),
            std::min(f.width() - 1, static_cast<int>(std::ceil(c.x + rx))),
            std::min(f.height() - 1, static_cast<int>(std::ceil(c.y + ry)))};
}

}  // namespace detail
}  // namespace visim
