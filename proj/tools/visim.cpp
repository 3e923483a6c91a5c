// visim: command-line front end and render service.
//
// Exit codes: 0 success, 1 I/O failure, 2 invalid parameters or profile,
// 64 usage error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "visim/service.hpp"
#include "visim/visim.hpp"

namespace fs = std::filesystem;
using namespace visim;

namespace {

constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::pair<int, int> parse_size(const std::string& text) {
    int w = 0, h = 0;
    char x = 0, extra = 0;
    std::istringstream in(text);
    if (!(in >> w >> x >> h) || (x != 'x' && x != 'X') || (in >> extra) || w <= 0 || h <= 0)
        throw UsageError("--size must look like 1920x1080, got '" + text + "'");
    return {w, h};
}

Vec2 parse_gaze(const std::string& text) {
    double x = 0, y = 0;
    char comma = 0, extra = 0;
    std::istringstream in(text);
    in.imbue(std::locale::classic());
    if (!(in >> x >> comma >> y) || comma != ',' || (in >> extra))
        throw UsageError("--gaze must look like 0.5,0.5, got '" + text + "'");
    return {x, y};
}

ViewingGeometry geometry_from(std::optional<double> distance_m, std::optional<double> pitch_mm) {
    ViewingGeometry g;
    if (distance_m) g.viewing_distance = *distance_m;
    if (pitch_mm) g.pixel_pitch = *pitch_mm / 1000.0;
    g.check();
    return g;
}

/// A path to a profile document, or the name of a built-in preset.
Profile resolve_profile(const std::string& ref, std::vector<std::string>& warnings) {
    if (fs::exists(ref)) {
        std::ifstream in(ref, std::ios::binary);
        if (!in) throw IoError("cannot read profile " + ref);
        std::ostringstream ss;
        ss << in.rdbuf();
        return parse_profile(ss.str(), &warnings);
    }
    if (auto preset = find_preset(ref)) return *preset;
    throw IoError("profile not found: " + ref);
}

std::vector<fs::path> sequence_inputs(const fs::path& input) {
    if (!fs::is_directory(input)) return {input};
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(input)) {
        const auto ext = e.path().extension().string();
        if (e.is_regular_file() && (ext == ".png" || ext == ".ppm")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw IoError("no .png or .ppm frames in " + input.string());
    return files;
}

fs::path numbered(const fs::path& out, int k) {
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "_%04d", k);
    return out.parent_path() / (out.stem().string() + suffix + out.extension().string());
}

double ms_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------

struct ApplyArgs {
    std::string input, output, profile, gaze = "0.5,0.5", gaze_path;
    double time = 0.0, fps = 30.0;
    int frames = 0;
    std::optional<std::uint64_t> seed;
    std::optional<double> distance_m, pitch_mm;
};

int run_apply(const ApplyArgs& a) {
    std::vector<std::string> warnings;
    RenderRequest req;
    req.profile = resolve_profile(a.profile, warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    req.seed = a.seed;
    req.geometry = geometry_from(a.distance_m, a.pitch_mm);
    req.gaze = parse_gaze(a.gaze);
    std::optional<ScriptedSource> path;
    if (!a.gaze_path.empty()) path.emplace(ScriptedSource::from_file(a.gaze_path));
    if (!(a.fps > 0.0)) throw UsageError("--fps must be positive");

    const auto inputs = sequence_inputs(a.input);
    const bool sequence = a.frames > 0 || inputs.size() > 1;
    const int count = a.frames > 0 ? a.frames : static_cast<int>(inputs.size());
    SessionState state(effective_seed(req, nullptr), 0.0);
    const auto total_start = std::chrono::steady_clock::now();
    std::optional<Frame> still;
    for (int k = 0; k < count; ++k) {
        const fs::path& src_path = inputs[std::min<std::size_t>(k, inputs.size() - 1)];
        if (inputs.size() > 1 || !still) still = read_image(src_path);
        RenderRequest frame_req = req;
        frame_req.time = sequence ? a.time + k / a.fps : a.time;
        if (path) {
            const auto s = path->poll(frame_req.time);
            frame_req.gaze = {s.x, s.y};
        }
        const auto start = std::chrono::steady_clock::now();
        const Frame out = render_request(*still, frame_req, &state);
        const double ms = ms_since(start);
        const fs::path dest = sequence ? numbered(a.output, k) : fs::path(a.output);
        write_image(dest, out);
        std::printf("frame %d: %.1f ms -> %s\n", k, ms, dest.string().c_str());
    }
    std::printf("total: %.1f ms for %d frame%s\n", ms_since(total_start), count, count == 1 ? "" : "s");
    return 0;
}

struct AssessArgs {
    std::string kind, output, size, annotations;
    std::optional<double> distance_m, pitch_mm;
    double extent = 10.0, step = 0.15;
    int line_width = 1, triplets = 8, letter_px = 0;
    std::uint64_t seed = 0;
};

int run_assess(const AssessArgs& a) {
    std::vector<std::string> missing;
    if (!a.distance_m) missing.push_back("--distance-m");
    if (!a.pitch_mm) missing.push_back("--pitch-mm");
    if (a.size.empty()) missing.push_back("--size");
    if (!missing.empty()) {
        std::string list;
        for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
        throw UsageError("assess is missing " + list +
                         " (required: --distance-m METERS --pitch-mm MM --size WxH -o OUT)");
    }
    const auto [w, h] = parse_size(a.size);
    const ViewingGeometry g = geometry_from(a.distance_m, a.pitch_mm);
    Frame out;
    if (a.kind == "amsler") {
        AmslerSpec spec;
        spec.geometry = g;
        spec.width = w;
        spec.height = h;
        spec.extent_degrees = a.extent;
        spec.line_width_px = a.line_width;
        if (!a.annotations.empty()) {
            std::ifstream in(a.annotations);
            if (!in) throw IoError("cannot read annotations " + a.annotations);
            spec.annotations = annotations_from_json(Json::parse(in));
        }
        out = render_amsler(spec);
        std::printf("amsler: %d px per degree, %gx%g cells\n", amsler_cell_pitch_px(g), 2 * a.extent, 2 * a.extent);
    } else {
        ContrastChartSpec spec;
        spec.width = w;
        spec.height = h;
        spec.triplets = a.triplets;
        spec.contrast_step = a.step;
        spec.letter_px = a.letter_px;
        spec.seed = a.seed;
        auto chart = render_contrast_chart(spec);
        if (chart.triplets < a.triplets)
            std::printf("contrast underflow: stopped after %d of %d triplets\n", chart.triplets, a.triplets);
        std::printf("contrast: %d triplets, letters %d px\n", chart.triplets, chart.letter_px);
        out = std::move(chart.frame);
    }
    write_image(a.output, out);
    return 0;
}

int run_validate(const std::string& ref) {
    std::vector<std::string> warnings;
    Profile p = resolve_profile(ref, warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
    std::printf("ok: '%s', %zu symptom%s\n", p.name.c_str(), p.stack.entries.size(),
                p.stack.entries.size() == 1 ? "" : "s");
    return 0;
}

int run_serve(const std::string& host, int port, const std::string& dir) {
    RenderService service({dir.empty() ? profile_dir_from_env("profiles") : fs::path(dir), kMaxRenderPixels});
    httplib::Server server;
    service.mount(server);
    const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
    if (bound < 0) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
    std::printf("listening on http://%s:%d (profiles in %s)\n", host.c_str(), bound,
                service.config().profile_dir.string().c_str());
    std::fflush(stdout);
    return server.listen_after_bind() ? 0 : kExitIo;
}

int run_presets(const std::string& dir) {
    for (const auto& p : builtin_presets()) {
        if (dir.empty()) {
            std::printf("%s  %s\n", p.name.c_str(), p.notes.c_str());
            continue;
        }
        fs::create_directories(dir);
        const fs::path dest = fs::path(dir) / (p.name + ".json");
        save_profile(p, dest);
        std::printf("wrote %s\n", dest.string().c_str());
    }
    return 0;
}

int run_plate(const std::string& input, const std::string& size, const std::string& output) {
    const auto [w, h] = parse_size(size);
    write_image(output, display_plate(input, w, h));
    return 0;
}

struct SmoothArgs {
    std::string input = "-", output = "-";
    std::optional<double> sigma_x, sigma_y, process_noise;
};

int run_gaze_smooth(const SmoothArgs& a) {
    KalmanParams params;
    if (a.sigma_x) params.measurement_sigma_x = *a.sigma_x;
    if (a.sigma_y) params.measurement_sigma_y = *a.sigma_y;
    if (a.process_noise) params.process_noise = *a.process_noise;
    std::vector<GazeSample> records;
    if (a.input == "-") {
        records = read_gaze_records(std::cin);
    } else {
        std::ifstream in(a.input);
        if (!in) throw IoError("cannot read " + a.input);
        records = read_gaze_records(in);
    }
    std::ofstream file;
    if (a.output != "-") {
        file.open(a.output);
        if (!file) throw IoError("cannot write " + a.output);
    }
    std::ostream& out = a.output == "-" ? std::cout : file;
    GazeSmoother smoother(params);
    for (const auto& r : records) out << format_gaze_record(smoother.smooth(r)) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaze-contingent vision impairment simulator"};
    app.require_subcommand(1);

    ApplyArgs apply;
    auto* cmd_apply = app.add_subcommand("apply", "Render an image or frame sequence through a profile");
    cmd_apply->add_option("input", apply.input, "Input image, or a directory of frames")->required();
    cmd_apply->add_option("--profile", apply.profile, "Profile JSON path or preset name")->required();
    cmd_apply->add_option("-o,--output", apply.output, "Output PNG (numbered for sequences)")->required();
    cmd_apply->add_option("--gaze", apply.gaze, "Fixed gaze as x,y in [0,1]");
    cmd_apply->add_option("--gaze-path", apply.gaze_path, "Scripted gaze file ('t x y valid' per line)");
    cmd_apply->add_option("--time", apply.time, "Time of the first frame in seconds");
    cmd_apply->add_option("--frames", apply.frames, "Number of frames to render");
    cmd_apply->add_option("--fps", apply.fps, "Frame rate of the sequence");
    cmd_apply->add_option("--seed", apply.seed, "Seed override");
    cmd_apply->add_option("--distance-m", apply.distance_m, "Viewing distance in meters");
    cmd_apply->add_option("--pitch-mm", apply.pitch_mm, "Pixel pitch in millimeters");

    AssessArgs assess;
    auto* cmd_assess = app.add_subcommand("assess", "Render an assessment chart");
    cmd_assess->add_option("kind", assess.kind, "amsler or contrast")
        ->required()
        ->check(CLI::IsMember({"amsler", "contrast"}));
    cmd_assess->add_option("-o,--output", assess.output, "Output PNG")->required();
    cmd_assess->add_option("--distance-m", assess.distance_m, "Viewing distance in meters (required)");
    cmd_assess->add_option("--pitch-mm", assess.pitch_mm, "Pixel pitch in millimeters (required)");
    cmd_assess->add_option("--size", assess.size, "Frame size WxH (required)");
    cmd_assess->add_option("--extent-deg", assess.extent, "Amsler cells on each side of fixation");
    cmd_assess->add_option("--line-width", assess.line_width, "Amsler line width in pixels");
    cmd_assess->add_option("--annotations", assess.annotations, "Amsler annotation JSON");
    cmd_assess->add_option("--triplets", assess.triplets, "Contrast chart rows");
    cmd_assess->add_option("--step", assess.step, "Contrast step in log units");
    cmd_assess->add_option("--letter-px", assess.letter_px, "Contrast letter height cap");
    cmd_assess->add_option("--seed", assess.seed, "Letter choice seed");

    std::string validate_ref;
    auto* cmd_validate = app.add_subcommand("validate", "Check a profile against the parameter ranges");
    cmd_validate->add_option("profile", validate_ref, "Profile JSON path or preset name")->required();

    std::string host = "127.0.0.1", profile_dir;
    int port = 8080;
    auto* cmd_serve = app.add_subcommand("serve", "Run the local HTTP render service");
    cmd_serve->add_option("--host", host, "Bind address");
    cmd_serve->add_option("--port", port, "Port (0 picks a free one)");
    cmd_serve->add_option("--profile-dir", profile_dir, "Profile directory (default $VISIM_PROFILE_DIR or ./profiles)");

    auto* cmd_symptoms = app.add_subcommand("symptoms", "Print the symptom parameter schema");

    std::string presets_dir;
    auto* cmd_presets = app.add_subcommand("presets", "List built-in presets or write them out");
    cmd_presets->add_option("--write", presets_dir, "Directory to write preset JSON files to");

    std::string plate_in, plate_size, plate_out;
    auto* cmd_plate = app.add_subcommand("plate", "Letterbox a test plate image for display");
    cmd_plate->add_option("input", plate_in, "Plate image")->required();
    cmd_plate->add_option("--size", plate_size, "Display size WxH")->required();
    cmd_plate->add_option("-o,--output", plate_out, "Output PNG")->required();

    SmoothArgs smooth;
    auto* cmd_smooth = app.add_subcommand("gaze-smooth", "Kalman-smooth a gaze record stream");
    cmd_smooth->add_option("input", smooth.input, "Record file, '-' for stdin");
    cmd_smooth->add_option("-o,--output", smooth.output, "Output file, '-' for stdout");
    cmd_smooth->add_option("--sigma-x", smooth.sigma_x, "Measurement std, x (normalized)");
    cmd_smooth->add_option("--sigma-y", smooth.sigma_y, "Measurement std, y (normalized)");
    cmd_smooth->add_option("--process-noise", smooth.process_noise, "Acceleration std (units/s^2)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        std::cerr << "run with --help for usage\n";
        return kExitUsage;
    }

    try {
        if (*cmd_apply) return run_apply(apply);
        if (*cmd_assess) return run_assess(assess);
        if (*cmd_validate) return run_validate(validate_ref);
        if (*cmd_serve) return run_serve(host, port, profile_dir);
        if (*cmd_symptoms) {
            std::cout << canonical_json(symptom_schema());
            return 0;
        }
        if (*cmd_presets) return run_presets(presets_dir);
        if (*cmd_plate) return run_plate(plate_in, plate_size, plate_out);
        if (*cmd_smooth) return run_gaze_smooth(smooth);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ProfileError& e) {
        std::cerr << "invalid profile: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const ParameterError& e) {
        std::cerr << "invalid parameters: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const GazeFormatError& e) {
        std::cerr << "invalid gaze records: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const GazeSequenceError& e) {
        std::cerr << "invalid gaze records: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const Json::exception& e) {
        std::cerr << "invalid JSON: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
