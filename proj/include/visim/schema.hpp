#pragma once

#include <string>

#include "visim/profiles.hpp"

namespace visim {

namespace detail {

template <class C>
Json param_schema(const C& def, const C& neutral, const NumberParam<C>& p) {
    return {{"name", std::string(p.name)}, {"kind", "number"},          {"min", p.min},
            {"max", p.max},                {"integer", p.integer},      {"unit", std::string(p.unit)},
            {"default", def.*(p.member)},  {"neutral", neutral.*(p.member)}};
}

template <class C>
Json param_schema(const C& def, const C& neutral, const FlagParam<C>& p) {
    return {{"name", std::string(p.name)}, {"kind", "flag"}, {"default", def.*(p.member)},
            {"neutral", neutral.*(p.member)}};
}

template <class C, class E>
Json param_schema(const C& def, const C& neutral, const ChoiceParam<C, E>& p) {
    Json choices = Json::array();
    for (const auto& l : p.labels) choices.push_back(std::string(l));
    return {{"name", std::string(p.name)},
            {"kind", "choice"},
            {"choices", choices},
            {"default", std::string(p.labels[static_cast<std::size_t>(def.*(p.member))])},
            {"neutral", std::string(p.labels[static_cast<std::size_t>(neutral.*(p.member))])}};
}

}  // namespace detail

/// Machine-readable description of every symptom type: parameter names,
/// kinds, ranges, defaults and neutral values, in catalog order. Clients
/// build their controls from this document alone.
inline Json symptom_schema() {
    Json list = Json::array();
    for_each_symptom_type([&](const auto& def) {
        using C = std::decay_t<decltype(def)>;
        const C neutral = C::neutral();
        Json params = Json::array();
        std::apply([&](const auto&... p) { (params.push_back(detail::param_schema(def, neutral, p)), ...); },
                   C::params());
        Json entry = {{"type", std::string(C::type)},
                      {"label", std::string(C::label)},
                      {"gaze_contingent", C::gaze_contingent},
                      {"disclaimer", needs_disclaimer<C>},
                      {"params", params}};
        if constexpr (needs_disclaimer<C>) entry["disclaimer_text"] = std::string(kDisclaimerText);
        list.push_back(std::move(entry));
    });
    return {{"format_version", kProfileFormatVersion}, {"symptoms", list}};
}

}  // namespace visim
