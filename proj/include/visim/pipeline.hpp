#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "visim/symptoms.hpp"

namespace visim {

struct SymptomEntry {
    SymptomConfig config;
    bool enabled = true;

    friend bool operator==(const SymptomEntry& a, const SymptomEntry& b) {
        return a.enabled == b.enabled && a.config.index() == b.config.index() &&
               std::visit(
                   [&](const auto& x) {
                       using C = std::decay_t<decltype(x)>;
                       const C& y = std::get<C>(b.config);
                       bool same = true;
                       std::apply(
                           [&](const auto&... p) { ((same = same && x.*(p.member) == y.*(p.member)), ...); },
                           C::params());
                       if constexpr (std::is_same_v<C, MetamorphPoint>) same = same && x.active == y.active;
                       return same;
                   },
                   a.config);
    }
};

/// Ordered symptom list plus the master switch.
struct SymptomStack {
    std::vector<SymptomEntry> entries;
    bool global_enabled = true;

    friend bool operator==(const SymptomStack&, const SymptomStack&) = default;
};

/// Per-session render state. Everything in it is derived from the seed, so a
/// state rebuilt from (seed, start_time) renders identically.
struct SessionState {
    double start_time = 0.0;
    std::uint64_t seed = 0;
    ShaderCache cache;

    SessionState() = default;
    SessionState(std::uint64_t s, double start = 0.0) : start_time(start), seed(s) {}
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }

    std::string text() const {
        std::string out;
        for (const auto& v : violations) {
            if (!out.empty()) out += "\n";
            out += "entry " + std::to_string(v.entry) + ": " + v.message;
        }
        return out;
    }
};

/// Lists every out-of-range field in the stack. Never throws.
inline ValidationReport validate(const SymptomStack& stack) {
    ValidationReport report;
    for (std::size_t i = 0; i < stack.entries.size(); ++i) {
        for (auto v : validate_config(stack.entries[i].config)) {
            v.entry = i;
            report.violations.push_back(std::move(v));
        }
    }
    return report;
}

/// Applies enabled entries in order, each consuming the previous output.
/// Throws ParameterError carrying the validation report if any entry is invalid.
inline Frame render(const Frame& frame, const SymptomStack& stack, const RenderContext& ctx,
                    SessionState* state = nullptr) {
    const auto report = validate(stack);
    if (!report.ok()) throw ParameterError(report.text());
    if (!stack.global_enabled) return frame;
    ShaderCache* cache = state ? &state->cache : nullptr;
    Frame current = frame;
    for (const auto& entry : stack.entries) {
        if (!entry.enabled) continue;
        current = apply_symptom(std::move(current), ctx, entry.config, cache);
    }
    return current;
}

}  // namespace visim
