#pragma once

// Shared fixtures for the unit tests and the acceptance runner. No test
// framework dependency so both can use it.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sys/wait.h>
#include <random>
#include <string>
#include <vector>

#include "visim/visim.hpp"

namespace visim::testing {

/// Uniform random pixels in [0,1].
inline Frame random_frame(int w, int h, std::uint32_t seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    Frame f(w, h);
    for (float& v : f.values()) v = u(rng);
    return f;
}

/// Smooth gradients plus a checker, so every shader has structure to act on.
inline Frame structured_frame(int w, int h) {
    Frame f(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const bool check = ((x / 8) + (y / 8)) % 2 == 0;
            const float gx = static_cast<float>(x) / std::max(1, w - 1);
            const float gy = static_cast<float>(y) / std::max(1, h - 1);
            f.set(x, y, {check ? 0.9f * gx + 0.05f : 0.1f, 0.2f + 0.6f * gy, check ? 0.15f : 0.85f * (1 - gx)});
        }
    }
    return f;
}

/// Random texture tiled with the given period; translating it by a multiple
/// of the period leaves it unchanged, so shifting the gaze by such a multiple
/// must shift the shader's effect by the same amount.
inline Frame tiled_noise_frame(int w, int h, int period, std::uint32_t seed) {
    const Frame tile = random_frame(period, period, seed);
    Frame f(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) f.set(x, y, tile.at(x % period, y % period));
    return f;
}

inline float max_abs_diff(const Frame& a, const Frame& b) {
    float m = 0.0f;
    auto va = a.values();
    auto vb = b.values();
    for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, std::abs(va[i] - vb[i]));
    return m;
}

inline bool all_in_unit_range(const Frame& f) {
    for (float v : f.values())
        if (!(v >= 0.0f && v <= 1.0f)) return false;
    return true;
}

/// Every symptom type at its default parameters, in catalog order.
inline std::vector<SymptomConfig> all_defaults() {
    std::vector<SymptomConfig> out;
    for_each_symptom_type([&](const auto& s) { out.push_back(s); });
    return out;
}

inline std::vector<SymptomConfig> all_neutrals() {
    std::vector<SymptomConfig> out;
    for_each_symptom_type([&](const auto& s) { out.push_back(std::decay_t<decltype(s)>::neutral()); });
    return out;
}

namespace detail {

template <class C>
void randomize(C& c, const NumberParam<C>& p, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(p.min, p.max);
    double v = u(rng);
    if (p.integer) v = std::round(v);
    c.*(p.member) = v;
}
template <class C>
void randomize(C& c, const FlagParam<C>& p, std::mt19937_64& rng) {
    c.*(p.member) = (rng() & 1u) != 0;
}
template <class C, class E>
void randomize(C& c, const ChoiceParam<C, E>& p, std::mt19937_64& rng) {
    c.*(p.member) = static_cast<E>(rng() % p.labels.size());
}

}  // namespace detail

/// Config of type `index` (catalog order) with every field drawn uniformly
/// from its allowed range. Large-cost fields are capped so tests stay fast.
inline SymptomConfig random_config(std::size_t index, std::mt19937_64& rng) {
    SymptomConfig out = all_defaults().at(index);
    std::visit(
        [&](auto& c) {
            using C = std::decay_t<decltype(c)>;
            std::apply([&](const auto&... p) { (detail::randomize(c, p, rng), ...); }, C::params());
            if constexpr (std::is_same_v<C, Distortion>) c.inner_radius = std::min(c.inner_radius, c.radius);
            if constexpr (std::is_same_v<C, Retinopathy>) c.density = std::round(c.density / 10.0);
            if constexpr (std::is_same_v<C, Hyperopia>) c.cpd = std::max(c.cpd, 1.0);
        },
        out);
    return out;
}

inline SymptomStack stack_of(std::initializer_list<SymptomConfig> configs) {
    SymptomStack s;
    for (const auto& c : configs) s.entries.push_back({c, true});
    return s;
}

struct Peak {
    int x = -1;
    int y = -1;
    double value = 0.0;
};

/// Separable box mean of radius r with clamped edges.
inline void box_pass(std::vector<double>& v, int w, int h, int r) {
    std::vector<double> t(v.size());
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int i = -r; i <= r; ++i) acc += v[static_cast<std::size_t>(y) * w + std::clamp(x + i, 0, w - 1)];
            t[static_cast<std::size_t>(y) * w + x] = acc / (2 * r + 1);
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0.0;
            for (int j = -r; j <= r; ++j) acc += t[static_cast<std::size_t>(std::clamp(y + j, 0, h - 1)) * w + x];
            v[static_cast<std::size_t>(y) * w + x] = acc / (2 * r + 1);
        }
}

/// Channel-summed |a-b| after a 5x5 box, which averages out one period of
/// the tiled test texture, then three box passes of `radius` (close to a
/// Gaussian) so that the peak of a broad effect sits at its center rather
/// than on whichever textured pixel happens to differ most.
inline std::vector<double> smoothed_difference(const Frame& a, const Frame& b, int radius = 0) {
    const int w = a.width(), h = a.height();
    std::vector<double> d(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            const Rgb p = a.at(x, y), q = b.at(x, y);
            d[static_cast<std::size_t>(y) * w + x] = std::abs(p.r - q.r) + std::abs(p.g - q.g) + std::abs(p.b - q.b);
        }
    box_pass(d, w, h, 2);
    if (radius > 0)
        for (int i = 0; i < 3; ++i) box_pass(d, w, h, radius);
    return d;
}

/// Argmax (or argmin) of the smoothed difference; the first hit in raster
/// order wins ties.
inline Peak extreme_of(const std::vector<double>& s, int w, bool maximum) {
    Peak p;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const bool better = p.x < 0 || (maximum ? s[i] > p.value : s[i] < p.value);
        if (better) {
            p.value = s[i];
            p.x = static_cast<int>(i % w);
            p.y = static_cast<int>(i / w);
        }
    }
    return p;
}

/// Configs for the gaze-contingent shaders chosen so the effect has a
/// unique extreme point; `maximum` says whether to look for the argmax.
struct GazeCase {
    SymptomConfig config;
    bool maximum = true;
    std::string note;
    int radius = 0;  // extra smoothing for smoothed_difference
};

inline std::vector<GazeCase> gaze_cases() {
    std::vector<GazeCase> out;
    // The reduced-detail ellipse differs from the source by a roughly flat
    // amount, and the pointwise shift traces a cross; both need the wider
    // smoothing to put the peak at the center.
    out.push_back({CentralLoss{0.2}, true, "central loss", 12});
    out.push_back({MetamorphPoint{true}, true, "pointwise metamorphopsia", 8});
    Retinopathy r;
    r.color = FloaterColor::white;
    r.opacity = 1.0;
    r.density = 1;
    r.speed = 0.0;
    r.centering = true;
    r.circle_radius = 0.0;
    r.floater_size = 4.0;
    out.push_back({r, true, "retinopathy (centered)"});
    out.push_back({Teichopsia{1.0}, true, "teichopsia"});
    // The tunnel is where nothing changes, so its center is the argmin.
    out.push_back({PeripheralLoss{0.02}, false, "peripheral loss"});
    out.push_back({InFilling{0.04, 0.0, 0.0}, true, "in-filling"});
    out.push_back({Distortion{0.15, 0.5, 0.03, 0.0}, true, "distortion"});
    out.push_back({FovealDarkness{0.12, 0.0, 1.0}, true, "foveal darkness"});
    return out;
}

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout and stderr interleaved
};

/// Runs a shell command and collects its output and exit status.
inline CommandResult run_command(const std::string& command) {
    CommandResult r;
    FILE* pipe = ::popen((command + " 2>&1").c_str(), "r");
    if (!pipe) return r;
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, pipe)) > 0) r.output.append(buf, n);
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

inline std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

}  // namespace visim::testing
