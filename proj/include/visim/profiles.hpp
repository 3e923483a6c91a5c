#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "visim/pipeline.hpp"

namespace visim {

using Json = nlohmann::json;

inline constexpr int kProfileFormatVersion = 1;

class ProfileError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Canonical JSON text: sorted keys, two-space indent, integers verbatim and
// other numbers as %.6g, so equal documents are equal byte strings.
// ---------------------------------------------------------------------------

namespace detail {

inline void write_canonical(const Json& j, std::string& out, int depth) {
    const auto indent = [&](int d) { out.append(static_cast<std::size_t>(2 * d), ' '); };
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {  // std::map keeps keys sorted
                if (!first) out += ",\n";
                first = false;
                indent(depth + 1);
                out += Json(key).dump();
                out += ": ";
                write_canonical(value, out, depth + 1);
            }
            out += "\n";
            indent(depth);
            out += "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                indent(depth + 1);
                write_canonical(j[i], out, depth + 1);
            }
            out += "\n";
            indent(depth);
            out += "]";
            return;
        }
        case Json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) throw ProfileError("cannot serialize non-finite number");
            out += format_number(v == 0.0 ? 0.0 : v);
            return;
        }
        default:
            out += j.dump();
    }
}

}  // namespace detail

inline std::string canonical_json(const Json& j) {
    std::string out;
    detail::write_canonical(j, out, 0);
    out += "\n";
    return out;
}

// ---------------------------------------------------------------------------
// Symptom <-> JSON
// ---------------------------------------------------------------------------

namespace detail {

template <class C>
void param_to_json(const C& c, const NumberParam<C>& p, Json& out) {
    out[std::string(p.name)] = c.*(p.member);
}
template <class C>
void param_to_json(const C& c, const FlagParam<C>& p, Json& out) {
    out[std::string(p.name)] = c.*(p.member);
}
template <class C, class E>
void param_to_json(const C& c, const ChoiceParam<C, E>& p, Json& out) {
    const auto idx = static_cast<std::size_t>(c.*(p.member));
    out[std::string(p.name)] = idx < p.labels.size() ? std::string(p.labels[idx]) : std::string("?");
}

inline std::string where(std::string_view type, std::string_view name) {
    return std::string(type) + "." + std::string(name);
}

template <class C>
void param_from_json(C& c, const NumberParam<C>& p, const Json& v) {
    if (!v.is_number()) throw ProfileError(where(C::type, p.name) + " must be a number");
    c.*(p.member) = v.get<double>();
}
template <class C>
void param_from_json(C& c, const FlagParam<C>& p, const Json& v) {
    if (!v.is_boolean()) throw ProfileError(where(C::type, p.name) + " must be true or false");
    c.*(p.member) = v.get<bool>();
}
template <class C, class E>
void param_from_json(C& c, const ChoiceParam<C, E>& p, const Json& v) {
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        for (std::size_t i = 0; i < p.labels.size(); ++i) {
            if (p.labels[i] == s) {
                c.*(p.member) = static_cast<E>(i);
                return;
            }
        }
    }
    std::string options;
    for (const auto& l : p.labels) options += (options.empty() ? "" : ", ") + std::string(l);
    throw ProfileError(where(C::type, p.name) + " must be one of: " + options);
}

}  // namespace detail

inline Json params_to_json(const SymptomConfig& config) {
    return std::visit(
        [](const auto& c) {
            Json out = Json::object();
            std::apply([&](const auto&... p) { (detail::param_to_json(c, p, out), ...); },
                       std::decay_t<decltype(c)>::params());
            return out;
        },
        config);
}

/// Builds a config of `type` from a params object. Missing fields keep their
/// defaults; unknown fields are reported through `warnings`.
inline SymptomConfig symptom_from_json(std::string_view type, const Json& params,
                                       std::vector<std::string>* warnings = nullptr) {
    SymptomConfig config;
    if (!make_symptom(type, config)) {
        std::string known;
        for (const auto& t : known_symptom_types()) known += (known.empty() ? "" : ", ") + std::string(t);
        throw ProfileError("unknown symptom '" + std::string(type) + "' (profile format_version " +
                           std::to_string(kProfileFormatVersion) + " knows: " + known + ")");
    }
    if (!params.is_object()) throw ProfileError(std::string(type) + ": params must be an object");
    std::visit(
        [&](auto& c) {
            using C = std::decay_t<decltype(c)>;
            std::vector<std::string> seen;
            std::apply(
                [&](const auto&... p) {
                    (
                        [&] {
                            const auto it = params.find(std::string(p.name));
                            if (it == params.end()) return;
                            detail::param_from_json(c, p, *it);
                            seen.emplace_back(p.name);
                        }(),
                        ...);
                },
                C::params());
            if (warnings) {
                for (const auto& [key, value] : params.items())
                    if (std::find(seen.begin(), seen.end(), key) == seen.end())
                        warnings->push_back("ignoring unknown field " + detail::where(C::type, key));
            }
        },
        config);
    return config;
}

// ---------------------------------------------------------------------------
// Profile
// ---------------------------------------------------------------------------

struct Profile {
    std::string name;
    std::uint64_t seed = 0;
    std::string notes;
    SymptomStack stack;

    friend bool operator==(const Profile&, const Profile&) = default;
};

inline Json stack_to_json(const SymptomStack& stack) {
    Json list = Json::array();
    for (const auto& e : stack.entries) {
        bool enabled = e.enabled;
        // an inactive pointwise entry has no parameters to carry its state
        if (const auto* m = std::get_if<MetamorphPoint>(&e.config); m && !m->active) enabled = false;
        list.push_back({{"type", std::string(symptom_type(e.config))}, {"enabled", enabled},
                        {"params", params_to_json(e.config)}});
    }
    return list;
}

inline Json profile_to_json(const Profile& p) {
    return {{"format_version", kProfileFormatVersion},
            {"name", p.name},
            {"seed", p.seed},
            {"notes", p.notes},
            {"global_enabled", p.stack.global_enabled},
            {"symptoms", stack_to_json(p.stack)}};
}

inline SymptomStack stack_from_json(const Json& list, std::vector<std::string>* warnings = nullptr) {
    if (!list.is_array()) throw ProfileError("symptoms must be an array");
    SymptomStack stack;
    for (std::size_t i = 0; i < list.size(); ++i) {
        const Json& item = list[i];
        if (!item.is_object() || !item.contains("type") || !item["type"].is_string())
            throw ProfileError("symptoms[" + std::to_string(i) + "] needs a string 'type'");
        SymptomEntry entry;
        if (item.contains("enabled")) {
            if (!item["enabled"].is_boolean())
                throw ProfileError("symptoms[" + std::to_string(i) + "].enabled must be true or false");
            entry.enabled = item["enabled"].get<bool>();
        }
        entry.config = symptom_from_json(item["type"].get<std::string>(),
                                         item.contains("params") ? item["params"] : Json::object(), warnings);
        if (warnings) {
            for (const auto& [key, value] : item.items())
                if (key != "type" && key != "enabled" && key != "params")
                    warnings->push_back("ignoring unknown field symptoms[" + std::to_string(i) + "]." + key);
        }
        stack.entries.push_back(std::move(entry));
    }
    return stack;
}

/// Parses and validates a profile document.
inline Profile profile_from_json(const Json& doc, std::vector<std::string>* warnings = nullptr) {
    if (!doc.is_object()) throw ProfileError("profile must be a JSON object");
    if (!doc.contains("format_version") || !doc["format_version"].is_number_integer())
        throw ProfileError("profile lacks integer format_version");
    const auto version = doc["format_version"].get<long long>();
    if (version != kProfileFormatVersion)
        throw ProfileError("unsupported profile format_version " + std::to_string(version) + " (expected " +
                           std::to_string(kProfileFormatVersion) + ")");
    Profile p;
    if (doc.contains("name")) {
        if (!doc["name"].is_string()) throw ProfileError("name must be a string");
        p.name = doc["name"].get<std::string>();
    }
    if (doc.contains("seed")) {
        if (!doc["seed"].is_number_unsigned()) throw ProfileError("seed must be a non-negative integer");
        p.seed = doc["seed"].get<std::uint64_t>();
    }
    if (doc.contains("notes")) {
        if (!doc["notes"].is_string()) throw ProfileError("notes must be a string");
        p.notes = doc["notes"].get<std::string>();
    }
    if (doc.contains("global_enabled")) {
        if (!doc["global_enabled"].is_boolean()) throw ProfileError("global_enabled must be true or false");
        p.stack.global_enabled = doc["global_enabled"].get<bool>();
    }
    const bool global = p.stack.global_enabled;
    p.stack = stack_from_json(doc.contains("symptoms") ? doc["symptoms"] : Json::array(), warnings);
    p.stack.global_enabled = global;
    if (warnings) {
        static const char* known[] = {"format_version", "name", "seed", "notes", "global_enabled", "symptoms"};
        for (const auto& [key, value] : doc.items())
            if (std::find(std::begin(known), std::end(known), key) == std::end(known))
                warnings->push_back("ignoring unknown field " + key);
    }
    const auto report = validate(p.stack);
    if (!report.ok()) throw ProfileError("profile '" + p.name + "' is out of range:\n" + report.text());
    return p;
}

inline std::string serialize_profile(const Profile& p) { return canonical_json(profile_to_json(p)); }

inline Profile parse_profile(std::string_view text, std::vector<std::string>* warnings = nullptr) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ProfileError(std::string("malformed profile JSON: ") + e.what());
    }
    return profile_from_json(doc, warnings);
}

inline Profile load_profile(const std::filesystem::path& path, std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ProfileError("cannot read profile " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_profile(ss.str(), warnings);
}

inline void save_profile(const Profile& p, const std::filesystem::path& path) {
    const auto report = validate(p.stack);
    if (!report.ok()) throw ProfileError("refusing to save out-of-range profile:\n" + report.text());
    const std::string text = serialize_profile(p);
    std::ofstream out(path, std::ios::binary);
    if (!out || !out.write(text.data(), static_cast<std::streamsize>(text.size())))
        throw ProfileError("cannot write profile " + path.string());
}

// ---------------------------------------------------------------------------
// Interpolation (experimental)
//
// Disabled entries and globally disabled stacks count as absent. Entries are
// paired by type in order of appearance; an entry present on one side only is
// paired with its neutral config and dropped where its weight is zero.
// Numbers lerp (integers round), flags and choices switch at alpha = 0.5, and
// the result takes a's order below 0.5 and b's order from 0.5 on.
// ---------------------------------------------------------------------------

namespace detail {

inline double lerp_number(double a, double b, double t, bool integer) {
    if (a == b) return a;
    const double v = a * (1.0 - t) + b * t;
    return integer ? std::round(v) : v;
}

template <class C>
void lerp_param(C& out, const C& a, const C& b, double t, const NumberParam<C>& p) {
    out.*(p.member) = lerp_number(a.*(p.member), b.*(p.member), t, p.integer);
}
template <class C>
void lerp_param(C& out, const C& a, const C& b, double t, const FlagParam<C>& p) {
    out.*(p.member) = t < 0.5 ? a.*(p.member) : b.*(p.member);
}
template <class C, class E>
void lerp_param(C& out, const C& a, const C& b, double t, const ChoiceParam<C, E>& p) {
    out.*(p.member) = t < 0.5 ? a.*(p.member) : b.*(p.member);
}

inline SymptomConfig lerp_config(const SymptomConfig& a, const SymptomConfig& b, double t) {
    return std::visit(
        [&](const auto& ca) -> SymptomConfig {
            using C = std::decay_t<decltype(ca)>;
            const C& cb = std::get<C>(b);
            C out = t < 0.5 ? ca : cb;
            std::apply([&](const auto&... p) { (lerp_param(out, ca, cb, t, p), ...); }, C::params());
            return out;
        },
        a);
}

template <class C>
void keep_choice(C&, const C&, const NumberParam<C>&) {}
template <class C>
void keep_choice(C&, const C&, const FlagParam<C>&) {}
template <class C, class E>
void keep_choice(C& out, const C& src, const ChoiceParam<C, E>& p) {
    out.*(p.member) = src.*(p.member);
}

/// Neutral partner for a one-sided entry; choices (e.g. the CVD type) follow
/// the present side so only the strength fades.
inline SymptomConfig neutral_partner(const SymptomConfig& present) {
    return std::visit(
        [](const auto& c) -> SymptomConfig {
            using C = std::decay_t<decltype(c)>;
            C n = C::neutral();
            std::apply([&](const auto&... p) { (keep_choice(n, c, p), ...); }, C::params());
            return n;
        },
        present);
}

inline std::vector<SymptomConfig> active_configs(const SymptomStack& s) {
    std::vector<SymptomConfig> out;
    if (!s.global_enabled) return out;
    for (const auto& e : s.entries)
        if (e.enabled) out.push_back(e.config);
    return out;
}

}  // namespace detail

inline SymptomStack interpolate(const SymptomStack& a, const SymptomStack& b, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw ParameterError("interpolation alpha must lie in [0,1]");
    const auto ea = detail::active_configs(a);
    const auto eb = detail::active_configs(b);
    // pair[i] for ea[i] is an index into eb or -1; b_used marks paired b entries
    std::vector<long> pair(ea.size(), -1);
    std::vector<bool> b_used(eb.size(), false);
    for (std::size_t i = 0; i < ea.size(); ++i) {
        for (std::size_t j = 0; j < eb.size(); ++j) {
            if (!b_used[j] && eb[j].index() == ea[i].index()) {
                pair[i] = static_cast<long>(j);
                b_used[j] = true;
                break;
            }
        }
    }
    std::vector<SymptomConfig> from_a(ea.size()), from_b(eb.size());
    for (std::size_t i = 0; i < ea.size(); ++i) {
        if (pair[i] >= 0) {
            from_a[i] = detail::lerp_config(ea[i], eb[pair[i]], alpha);
            from_b[pair[i]] = from_a[i];
        } else {
            from_a[i] = detail::lerp_config(ea[i], detail::neutral_partner(ea[i]), alpha);
        }
    }
    for (std::size_t j = 0; j < eb.size(); ++j)
        if (!b_used[j]) from_b[j] = detail::lerp_config(detail::neutral_partner(eb[j]), eb[j], alpha);

    SymptomStack out;
    auto add = [&](const SymptomConfig& c) { out.entries.push_back({c, true}); };
    if (alpha < 0.5) {
        for (std::size_t i = 0; i < ea.size(); ++i) add(from_a[i]);
        if (alpha > 0.0)
            for (std::size_t j = 0; j < eb.size(); ++j)
                if (!b_used[j]) add(from_b[j]);
    } else {
        if (alpha < 1.0)
            for (std::size_t i = 0; i < ea.size(); ++i)
                if (pair[i] < 0) add(from_a[i]);
        for (std::size_t j = 0; j < eb.size(); ++j) add(from_b[j]);
    }
    return out;
}

inline SymptomStack interpolate(const Profile& a, const Profile& b, double alpha) {
    return interpolate(a.stack, b.stack, alpha);
}

// ---------------------------------------------------------------------------
// Cycling
// ---------------------------------------------------------------------------

struct CyclePlan {
    std::vector<Profile> profiles;
    double dwell = 10.0;       // seconds on each profile
    double transition = 5.0;   // seconds blending into the next
    std::uint64_t rng_seed = 0;
};

struct CyclePhase {
    std::size_t cycle = 0;          // index into the visiting sequence
    std::size_t current = 0;        // profile index
    std::size_t next = 0;           // profile index
    std::string current_name;
    std::string next_name;
    double alpha = 0.0;
};

/// Profile index visited in cycle k. Every step draws uniformly among the
/// profiles other than the previous one, so no profile repeats back to back.
inline std::size_t cycle_profile_index(const CyclePlan& plan, std::size_t k) {
    const std::size_t n = plan.profiles.size();
    if (n < 2) throw ParameterError("a cycle plan needs at least 2 profiles");
    SeededStream rng(hash_combine(plan.rng_seed, 0x6379636c65ULL));
    std::size_t current = static_cast<std::size_t>(rng.next() % n);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t step = 1 + static_cast<std::size_t>(rng.next() % (n - 1));
        current = (current + step) % n;
    }
    return current;
}

/// Stack and phase descriptor at time t.
inline std::pair<SymptomStack, CyclePhase> next_phase(const CyclePlan& plan, double t) {
    if (plan.profiles.size() < 2) throw ParameterError("a cycle plan needs at least 2 profiles");
    if (!(t >= 0.0) || !std::isfinite(t)) throw ParameterError("cycle time must be finite and >= 0");
    if (!(plan.dwell >= 0.0 && plan.transition >= 0.0) || plan.dwell + plan.transition <= 0.0)
        throw ParameterError("dwell and transition must be >= 0 with a positive sum");
    const double period = plan.dwell + plan.transition;
    const double k = std::floor(t / period);
    const double u = t - k * period;
    CyclePhase phase;
    phase.cycle = static_cast<std::size_t>(k);
    phase.current = cycle_profile_index(plan, phase.cycle);
    phase.next = cycle_profile_index(plan, phase.cycle + 1);
    phase.current_name = plan.profiles[phase.current].name;
    phase.next_name = plan.profiles[phase.next].name;
    phase.alpha = u < plan.dwell ? 0.0 : std::clamp((u - plan.dwell) / plan.transition, 0.0, 1.0);
    return {interpolate(plan.profiles[phase.current], plan.profiles[phase.next], phase.alpha), phase};
}

}  // namespace visim
