#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <regex>
#include <set>
#include <string>
#include <utility>

#include "httplib.h"
#include "visim/base64.hpp"
#include "visim/image_io.hpp"
#include "visim/presets.hpp"
#include "visim/request.hpp"
#include "visim/schema.hpp"

namespace visim {

inline constexpr std::uint64_t kMaxRenderPixels = 32'000'000;

struct ServiceConfig {
    std::filesystem::path profile_dir = ".";
    std::uint64_t max_pixels = kMaxRenderPixels;
};

/// Profile directory from VISIM_PROFILE_DIR, else `fallback`.
inline std::filesystem::path profile_dir_from_env(const std::filesystem::path& fallback = ".") {
    const char* env = std::getenv("VISIM_PROFILE_DIR");
    return env && *env ? std::filesystem::path(env) : fallback;
}

struct HttpResult {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Error carrying an HTTP status; the body is a JSON document.
class HttpError : public std::runtime_error {
public:
    HttpError(int status, const std::string& message, Json extra = Json::object())
        : std::runtime_error(message), status_(status), extra_(std::move(extra)) {}
    int status() const noexcept { return status_; }
    const Json& extra() const noexcept { return extra_; }

private:
    int status_;
    Json extra_;
};

inline Json violations_json(const ValidationReport& report) {
    Json list = Json::array();
    for (const auto& v : report.violations)
        list.push_back({{"entry", v.entry},
                        {"symptom", v.symptom},
                        {"field", v.field},
                        {"value", v.value},
                        {"min", v.min},
                        {"max", v.max},
                        {"message", v.message}});
    return list;
}

inline bool valid_profile_name(const std::string& name) {
    static const std::regex re("[A-Za-z0-9_-][A-Za-z0-9_.-]{0,63}");
    return std::regex_match(name, re);
}

/// Request handling without the transport, so it can be driven directly.
class RenderService {
public:
    explicit RenderService(ServiceConfig config) : config_(std::move(config)) {}

    const ServiceConfig& config() const noexcept { return config_; }

    HttpResult symptoms() const { return json_result(200, symptom_schema()); }

    /// POST /session: {"seed": n, "start_time": t}, both optional.
    HttpResult create_session(const std::string& body) {
        Json doc = body.empty() ? Json::object() : parse_json(body);
        if (!doc.is_object()) throw HttpError(400, "session request must be a JSON object");
        std::uint64_t seed = 0;
        double start = 0.0;
        if (doc.contains("seed")) {
            if (!doc["seed"].is_number_unsigned()) throw HttpError(400, "seed must be a non-negative integer");
            seed = doc["seed"].get<std::uint64_t>();
        }
        if (doc.contains("start_time")) {
            if (!doc["start_time"].is_number()) throw HttpError(400, "start_time must be a number");
            start = doc["start_time"].get<double>();
        }
        std::lock_guard lock(sessions_mutex_);
        const std::string id = "s" + std::to_string(++session_counter_);
        sessions_[id] = std::make_unique<Session>(seed, start);
        return json_result(200, {{"id", id}, {"seed", seed}, {"start_time", start}});
    }

    /// POST /render with the request document and the encoded source image.
    HttpResult render(const Json& doc, const Bytes& image) {
        if (!doc.is_object()) throw HttpError(400, "render request must be a JSON object");
        RenderRequest req;
        try {
            req = parse_request(doc);
        } catch (const Json::exception& e) {
            throw HttpError(400, std::string("bad render request: ") + e.what());
        }
        const auto report = validate(req.profile.stack);
        if (!report.ok())
            throw HttpError(400, "profile out of range:\n" + report.text(), {{"violations", violations_json(report)}});
        if (image.empty()) throw HttpError(400, "request has no source image");
        ImageInfo info;
        try {
            info = probe_image(image);
        } catch (const std::exception& e) {
            throw HttpError(400, std::string("cannot read source image: ") + e.what());
        }
        const auto pixels = static_cast<std::uint64_t>(info.width) * static_cast<std::uint64_t>(info.height);
        if (pixels > config_.max_pixels)
            throw HttpError(413, "image of " + std::to_string(pixels) + " pixels exceeds the limit of " +
                                     std::to_string(config_.max_pixels));
        Frame source;
        try {
            source = decode_image(image);
        } catch (const std::exception& e) {
            throw HttpError(400, std::string("cannot decode source image: ") + e.what());
        }
        Frame out;
        try {
            if (doc.contains("session")) {
                if (!doc["session"].is_string()) throw HttpError(400, "session must be a string id");
                Session& s = session(doc["session"].get<std::string>());
                std::lock_guard lock(s.mutex);
                out = render_request(source, req, &s.state);
            } else {
                out = render_request(source, req);
            }
        } catch (const ParameterError& e) {
            throw HttpError(400, e.what());
        }
        const Bytes png = encode_png(out);
        return {200, "image/png", std::string(png.begin(), png.end())};
    }

    /// Parses a JSON body; `image` holds base64 PNG or PPM.
    HttpResult render_json(const std::string& body) {
        const Json doc = parse_json(body);
        if (!doc.is_object()) throw HttpError(400, "render request must be a JSON object");
        if (!doc.contains("image") || !doc["image"].is_string())
            throw HttpError(400, "render request needs a base64 'image' string (or use multipart)");
        Bytes image;
        try {
            image = base64_decode(doc["image"].get_ref<const std::string&>());
        } catch (const std::invalid_argument& e) {
            throw HttpError(400, std::string("image: ") + e.what());
        }
        return render(doc, image);
    }

    HttpResult list_profiles() const {
        std::map<std::string, std::string> names;
        for (const auto& p : builtin_presets()) names[p.name] = "builtin";
        std::error_code ec;
        for (const auto& e : std::filesystem::directory_iterator(config_.profile_dir, ec)) {
            if (e.path().extension() != ".json") continue;
            const auto stem = e.path().stem().string();
            if (valid_profile_name(stem)) names[stem] = "directory";
        }
        Json list = Json::array();
        for (const auto& [name, source] : names) list.push_back({{"name", name}, {"source", source}});
        return json_result(200, {{"profiles", list}});
    }

    HttpResult get_profile(const std::string& name) const {
        return json_result(200, profile_to_json(find_profile(name)));
    }

    /// PUT /profiles/{name}: validates, stores canonically, echoes the document.
    HttpResult put_profile(const std::string& name, const std::string& body) {
        if (!valid_profile_name(name)) throw HttpError(400, "invalid profile name '" + name + "'");
        Profile p = parse_profile_body(parse_json(body));
        p.name = name;
        std::error_code ec;
        std::filesystem::create_directories(config_.profile_dir, ec);
        try {
            save_profile(p, profile_path(name));
        } catch (const ProfileError& e) {
            throw HttpError(500, e.what());
        }
        return json_result(200, profile_to_json(p));
    }

    /// Directory profile if present, else the built-in preset of that name.
    Profile find_profile(const std::string& name) const {
        if (!valid_profile_name(name)) throw HttpError(404, "no profile named '" + name + "'");
        const auto path = profile_path(name);
        if (std::filesystem::exists(path)) {
            try {
                return load_profile(path);
            } catch (const ProfileError& e) {
                throw HttpError(500, "stored profile '" + name + "' is unreadable: " + e.what());
            }
        }
        if (auto preset = find_preset(name)) return *preset;
        throw HttpError(404, "no profile named '" + name + "'");
    }

    static HttpResult error_result(const HttpError& e) {
        Json body = e.extra();
        body["error"] = e.what();
        body["status"] = e.status();
        return json_result(e.status(), body);
    }

    /// Registers every endpoint on `server`.
    void mount(httplib::Server& server) {
        server.set_payload_max_length(std::size_t{1} << 30);
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        server.Options(".*", [](const httplib::Request&, httplib::Response& res) {
            res.set_header("Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS");
            res.set_header("Access-Control-Allow-Headers", "Content-Type");
            res.status = 204;
        });
        server.Get("/symptoms", wrap([this](const httplib::Request&) { return symptoms(); }));
        server.Post("/session", wrap([this](const httplib::Request& req) { return create_session(req.body); }));
        server.Post("/render", wrap([this](const httplib::Request& req) { return render_http(req); }));
        server.Get("/profiles", wrap([this](const httplib::Request&) { return list_profiles(); }));
        server.Get(R"(/profiles/([^/]+))",
                   wrap([this](const httplib::Request& req) { return get_profile(req.matches[1]); }));
        server.Put(R"(/profiles/([^/]+))",
                   wrap([this](const httplib::Request& req) { return put_profile(req.matches[1], req.body); }));
    }

private:
    struct Session {
        Session(std::uint64_t seed, double start) : state(seed, start) {}
        SessionState state;
        std::mutex mutex;
    };

    static HttpResult json_result(int status, const Json& doc) { return {status, "application/json", canonical_json(doc)}; }

    static Json parse_json(const std::string& body) {
        try {
            return Json::parse(body);
        } catch (const Json::parse_error& e) {
            throw HttpError(400, std::string("malformed JSON: ") + e.what());
        }
    }

    std::filesystem::path profile_path(const std::string& name) const { return config_.profile_dir / (name + ".json"); }

    static Profile parse_profile_body(const Json& doc) {
        try {
            return profile_from_json(doc);
        } catch (const ProfileError& e) {
            Json extra = Json::object();
            // re-run validation on the raw stack to list the violations
            try {
                if (doc.is_object() && doc.contains("symptoms")) {
                    const auto report = validate(stack_from_json(doc["symptoms"]));
                    if (!report.ok()) extra["violations"] = violations_json(report);
                }
            } catch (const ProfileError&) {
            }
            throw HttpError(400, e.what(), extra);
        }
    }

    RenderRequest parse_request(const Json& doc) const {
        RenderRequest req;
        if (doc.contains("profile")) {
            req.profile = parse_profile_body(doc["profile"]);
        } else if (doc.contains("profile_name")) {
            if (!doc["profile_name"].is_string()) throw HttpError(400, "profile_name must be a string");
            req.profile = find_profile(doc["profile_name"].get<std::string>());
        }
        if (doc.contains("gaze")) {
            const Json& g = doc["gaze"];
            if (g.is_array() && g.size() == 2 && g[0].is_number() && g[1].is_number())
                req.gaze = {g[0].get<double>(), g[1].get<double>()};
            else if (g.is_object() && g.contains("x") && g.contains("y") && g["x"].is_number() && g["y"].is_number())
                req.gaze = {g["x"].get<double>(), g["y"].get<double>()};
            else
                throw HttpError(400, "gaze must be [x, y] or {\"x\": x, \"y\": y}");
        }
        if (doc.contains("time")) {
            if (!doc["time"].is_number()) throw HttpError(400, "time must be a number");
            req.time = doc["time"].get<double>();
        }
        if (doc.contains("seed")) {
            if (!doc["seed"].is_number_unsigned()) throw HttpError(400, "seed must be a non-negative integer");
            req.seed = doc["seed"].get<std::uint64_t>();
        }
        if (doc.contains("geometry")) {
            const Json& g = doc["geometry"];
            if (!g.is_object()) throw HttpError(400, "geometry must be an object");
            if (g.contains("viewing_distance_m")) req.geometry.viewing_distance = g["viewing_distance_m"].get<double>();
            if (g.contains("pixel_pitch_mm")) req.geometry.pixel_pitch = g["pixel_pitch_mm"].get<double>() / 1000.0;
        }
        try {
            check_request(req);
        } catch (const ParameterError& e) {
            throw HttpError(400, e.what());
        }
        return req;
    }

    HttpResult render_http(const httplib::Request& req) {
        if (!req.is_multipart_form_data()) return render_json(req.body);
        if (!req.has_file("image")) throw HttpError(400, "multipart render needs an 'image' part");
        const auto image = req.get_file_value("image").content;
        const Json doc = req.has_file("request") ? parse_json(req.get_file_value("request").content) : Json::object();
        return render(doc, Bytes(image.begin(), image.end()));
    }

    Session& session(const std::string& id) {
        std::lock_guard lock(sessions_mutex_);
        const auto it = sessions_.find(id);
        if (it == sessions_.end()) throw HttpError(404, "unknown session '" + id + "'");
        return *it->second;
    }

    template <class F>
    static httplib::Server::Handler wrap(F f) {
        return [f](const httplib::Request& req, httplib::Response& res) {
            HttpResult r;
            try {
                r = f(req);
            } catch (const HttpError& e) {
                r = error_result(e);
            } catch (const std::exception& e) {
                r = error_result(HttpError(500, e.what()));
            }
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        };
    }

    ServiceConfig config_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::unique_ptr<Session>> sessions_;
    std::uint64_t session_counter_ = 0;
};

}  // namespace visim
