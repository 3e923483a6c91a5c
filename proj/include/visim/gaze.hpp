#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

namespace visim {

/// Gaze estimate in normalized screen coordinates, origin top-left.
struct GazeSample {
    double t = 0.0;
    double x = 0.5;
    double y = 0.5;
    bool valid = false;

    friend bool operator==(const GazeSample&, const GazeSample&) = default;
};

class GazeSequenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GazeFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Records: "t x y valid" per line, '.' decimal separator.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string_view next_token(std::string_view& s) {
    const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    std::size_t i = 0;
    while (i < s.size() && is_space(s[i])) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(s[j])) ++j;
    const auto tok = s.substr(i, j - i);
    s.remove_prefix(j);
    return tok;
}

inline double parse_double(std::string_view tok, std::string_view what) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || end != tok.data() + tok.size() || !std::isfinite(v))
        throw GazeFormatError("bad " + std::string(what) + " '" + std::string(tok) + "'");
    return v;
}

}  // namespace detail

/// Parses one record. Blank lines and '#' comments yield nothing.
inline std::optional<GazeSample> parse_gaze_record(std::string_view line) {
    std::string_view rest = line;
    const auto t = detail::next_token(rest);
    if (t.empty() || t.front() == '#') return std::nullopt;
    const auto x = detail::next_token(rest);
    const auto y = detail::next_token(rest);
    const auto v = detail::next_token(rest);
    if (v.empty() || !detail::next_token(rest).empty())
        throw GazeFormatError("expected 't x y valid', got '" + std::string(line) + "'");
    if (v != "0" && v != "1") throw GazeFormatError("valid flag must be 0 or 1, got '" + std::string(v) + "'");
    return GazeSample{detail::parse_double(t, "time"), detail::parse_double(x, "x"), detail::parse_double(y, "y"),
                      v == "1"};
}

inline std::string format_gaze_record(const GazeSample& s) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.6f %.6f %.6f %d", s.t, s.x, s.y, s.valid ? 1 : 0);
    return buf;
}

/// Reads every record of a stream; timestamps must not decrease.
inline std::vector<GazeSample> read_gaze_records(std::istream& in) {
    std::vector<GazeSample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        try {
            if (auto s = parse_gaze_record(line)) {
                if (!out.empty() && s->t < out.back().t)
                    throw GazeSequenceError("timestamp decreases at line " + std::to_string(lineno));
                out.push_back(*s);
            }
        } catch (const GazeFormatError& e) {
            throw GazeFormatError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<GazeSample> read_gaze_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gaze path " + path.string());
    return read_gaze_records(in);
}

// ---------------------------------------------------------------------------
// Smoothing
// ---------------------------------------------------------------------------

/// Noise model of the constant-velocity filter, in normalized units.
struct KalmanParams {
    double process_noise = 0.5;  // std of the white acceleration, units/s^2
    double measurement_sigma_x = 2.40 / 34.5;
    double measurement_sigma_y = 2.55 / 19.5;
    double initial_velocity_sigma = 1.0;  // units/s

    /// Tracker accuracy in meters over a screen of the given size.
    static KalmanParams from_tracker_error(double err_x, double err_y, double screen_w, double screen_h) {
        KalmanParams p;
        p.measurement_sigma_x = err_x / screen_w;
        p.measurement_sigma_y = err_y / screen_h;
        return p;
    }
};

/// One axis of a constant-velocity Kalman filter. Covariance updates use the
/// Joseph form so P stays symmetric positive semi-definite.
struct AxisFilter {
    double p = 0.0, v = 0.0;
    double p00 = 0.0, p01 = 0.0, p11 = 0.0;

    void reset(double z, double r, double v_sigma) {
        p = z;
        v = 0.0;
        p00 = r;
        p01 = 0.0;
        p11 = v_sigma * v_sigma;
    }

    void predict(double dt, double q) {
        if (dt <= 0.0) return;
        const double a = q * q;
        const double dt2 = dt * dt;
        p += v * dt;
        const double n00 = p00 + 2.0 * dt * p01 + dt2 * p11 + a * dt2 * dt2 / 4.0;
        const double n01 = p01 + dt * p11 + a * dt2 * dt / 2.0;
        const double n11 = p11 + a * dt2;
        p00 = n00;
        p01 = n01;
        p11 = n11;
    }

    void update(double z, double r) {
        const double s = p00 + r;
        if (s <= 0.0) {
            p = z;
            return;
        }
        const double k0 = p00 / s, k1 = p01 / s;
        const double innovation = z - p;
        p += k0 * innovation;
        v += k1 * innovation;
        // Joseph form with H = [1 0]: P' = (I-KH) P (I-KH)^T + K r K^T
        const double a00 = 1.0 - k0, a10 = -k1;
        const double m00 = a00 * p00, m01 = a00 * p01;
        const double m10 = a10 * p00 + p01, m11 = a10 * p01 + p11;
        const double n00 = m00 * a00 + k0 * r * k0;
        const double n01 = m00 * a10 + m01 + k0 * r * k1;
        const double n11 = m10 * a10 + m11 + k1 * r * k1;
        p00 = n00;
        p01 = n01;
        p11 = n11;
    }
};

/// Per-axis constant-velocity Kalman smoother. Invalid samples only advance
/// the prediction; the first valid sample seeds the state.
class GazeSmoother {
public:
    explicit GazeSmoother(KalmanParams params = {}) : params_(params) {}

    const KalmanParams& params() const noexcept { return params_; }
    bool initialized() const noexcept { return initialized_; }
    double last_time() const noexcept { return t_; }
    const AxisFilter& axis_x() const noexcept { return x_; }
    const AxisFilter& axis_y() const noexcept { return y_; }

    /// Forgets all history; the next valid sample seeds the state.
    void reset() {
        initialized_ = false;
        started_ = false;
    }

    GazeSample smooth(const GazeSample& s) {
        if (started_ && s.t < t_)
            throw GazeSequenceError("gaze sample at t=" + std::to_string(s.t) + " precedes t=" + std::to_string(t_));
        const double rx = params_.measurement_sigma_x * params_.measurement_sigma_x;
        const double ry = params_.measurement_sigma_y * params_.measurement_sigma_y;
        if (!initialized_) {
            started_ = true;
            t_ = s.t;
            if (!s.valid) return {s.t, s.x, s.y, false};
            x_.reset(s.x, rx, params_.initial_velocity_sigma);
            y_.reset(s.y, ry, params_.initial_velocity_sigma);
            initialized_ = true;
            return {s.t, x_.p, y_.p, true};
        }
        const double dt = s.t - t_;
        t_ = s.t;
        x_.predict(dt, params_.process_noise);
        y_.predict(dt, params_.process_noise);
        if (s.valid) {
            x_.update(s.x, rx);
            y_.update(s.y, ry);
        }
        return {s.t, x_.p, y_.p, s.valid};
    }

    /// State extrapolated to `t` without changing the filter.
    GazeSample estimate_at(double t) const {
        if (!initialized_) return {t, 0.5, 0.5, false};
        const double dt = std::max(0.0, t - t_);
        return {t, x_.p + x_.v * dt, y_.p + y_.v * dt, true};
    }

private:
    KalmanParams params_;
    AxisFilter x_, y_;
    double t_ = 0.0;
    bool initialized_ = false;
    bool started_ = false;
};

// ---------------------------------------------------------------------------
// Sources
// ---------------------------------------------------------------------------

class GazeSource {
public:
    virtual ~GazeSource() = default;
    virtual GazeSample poll(double now) = 0;
};

/// Pointer position mapped onto the screen.
class MouseSource : public GazeSource {
public:
    MouseSource(int screen_width, int screen_height) : w_(screen_width), h_(screen_height) {
        if (w_ <= 0 || h_ <= 0) throw std::invalid_argument("screen size must be positive");
    }

    /// Pixel position; pixel i is centered on i, so the center pixel maps to 0.5.
    void move(double px, double py) {
        std::lock_guard lock(mutex_);
        x_ = w_ > 1 ? std::clamp(px / (w_ - 1), 0.0, 1.0) : 0.5;
        y_ = h_ > 1 ? std::clamp(py / (h_ - 1), 0.0, 1.0) : 0.5;
        seen_ = true;
    }

    GazeSample poll(double now) override {
        std::lock_guard lock(mutex_);
        return {now, x_, y_, seen_};
    }

private:
    int w_, h_;
    std::mutex mutex_;
    double x_ = 0.5, y_ = 0.5;
    bool seen_ = false;
};

/// Linear interpolation over the valid records of a path; holds the end
/// points outside its time span.
class ScriptedSource : public GazeSource {
public:
    explicit ScriptedSource(std::vector<GazeSample> records) {
        for (const auto& r : records)
            if (r.valid) points_.push_back(r);
        for (std::size_t i = 1; i < points_.size(); ++i)
            if (points_[i].t < points_[i - 1].t) throw GazeSequenceError("scripted path timestamps decrease");
    }

    static ScriptedSource from_file(const std::filesystem::path& path) { return ScriptedSource(read_gaze_file(path)); }

    GazeSample poll(double now) override {
        if (points_.empty()) return {now, 0.5, 0.5, false};
        if (now <= points_.front().t) return {now, points_.front().x, points_.front().y, true};
        if (now >= points_.back().t) return {now, points_.back().x, points_.back().y, true};
        const auto hi = std::upper_bound(points_.begin(), points_.end(), now,
                                         [](double t, const GazeSample& s) { return t < s.t; });
        const auto lo = hi - 1;
        const double span = hi->t - lo->t;
        const double u = span > 0.0 ? (now - lo->t) / span : 1.0;
        return {now, lo->x + (hi->x - lo->x) * u, lo->y + (hi->y - lo->y) * u, true};
    }

private:
    std::vector<GazeSample> points_;
};

inline constexpr double kStreamTimeout = 0.5;  // seconds without a record before samples turn invalid

/// Latest-value mailbox fed by a reader thread. Silence is measured on the
/// consumer's clock from the arrival of the last record.
class StreamSource : public GazeSource {
public:
    explicit StreamSource(double timeout = kStreamTimeout) : timeout_(timeout) {}

    /// Stores a record that arrived at local time `arrival`.
    void push(const GazeSample& s, double arrival) {
        std::lock_guard lock(mutex_);
        latest_ = s;
        arrival_ = arrival;
        have_ = true;
        connected_ = true;
    }

    /// Parses and stores one line; malformed lines are counted and dropped.
    void push_line(std::string_view line, double arrival) {
        try {
            if (auto s = parse_gaze_record(line)) push(*s, arrival);
        } catch (const GazeFormatError&) {
            ++rejected_;
        }
    }

    void disconnect() {
        std::lock_guard lock(mutex_);
        connected_ = false;
    }

    std::size_t rejected_lines() const noexcept { return rejected_; }

    GazeSample poll(double now) override {
        std::lock_guard lock(mutex_);
        if (!have_) return {now, 0.5, 0.5, false};
        GazeSample s = latest_;
        s.valid = s.valid && connected_ && now - arrival_ <= timeout_;
        return s;
    }

private:
    double timeout_;
    std::mutex mutex_;
    GazeSample latest_;
    double arrival_ = 0.0;
    bool have_ = false;
    bool connected_ = true;
    std::atomic<std::size_t> rejected_{0};
};

/// Monotonic seconds for stamping stream arrivals.
inline double steady_seconds() {
    using namespace std::chrono;
    return duration<double>(steady_clock::now().time_since_epoch()).count();
}

/// Feeds every line of `in` to `sink` until end of input, then disconnects it.
inline void pump_stream(std::istream& in, StreamSource& sink, const std::function<double()>& clock = steady_seconds) {
    std::string line;
    while (std::getline(in, line)) sink.push_line(line, clock());
    sink.disconnect();
}

/// Loopback TCP listener that feeds one client at a time into a StreamSource.
/// A closed connection marks the source disconnected until the next record.
class GazeStreamServer {
public:
    GazeStreamServer(StreamSource& sink, int port) : sink_(sink) {
        fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
        if (fd_ < 0) throw std::runtime_error("socket() failed");
        const int one = 1;
        ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        sockaddr_in addr{};
        addr.sin_family = AF_INET;
        addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
        addr.sin_port = htons(static_cast<std::uint16_t>(port));
        if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd_, 1) != 0) {
            ::close(fd_);
            throw std::runtime_error("cannot listen on port " + std::to_string(port));
        }
        socklen_t len = sizeof addr;
        ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
        port_ = ntohs(addr.sin_port);
        thread_ = std::thread([this] { run(); });
    }

    GazeStreamServer(const GazeStreamServer&) = delete;
    GazeStreamServer& operator=(const GazeStreamServer&) = delete;

    ~GazeStreamServer() {
        stop_ = true;
        ::shutdown(fd_, SHUT_RDWR);
        ::close(fd_);
        {
            std::lock_guard lock(client_mutex_);
            if (client_ >= 0) ::shutdown(client_, SHUT_RDWR);
        }
        if (thread_.joinable()) thread_.join();
    }

    int port() const noexcept { return port_; }

private:
    void run() {
        while (!stop_) {
            const int c = ::accept(fd_, nullptr, nullptr);
            if (c < 0) return;
            {
                std::lock_guard lock(client_mutex_);
                client_ = c;
            }
            std::string pending;
            char buf[4096];
            ssize_t n;
            while ((n = ::recv(c, buf, sizeof buf, 0)) > 0) {
                pending.append(buf, static_cast<std::size_t>(n));
                std::size_t nl;
                while ((nl = pending.find('\n')) != std::string::npos) {
                    sink_.push_line(std::string_view(pending).substr(0, nl), steady_seconds());
                    pending.erase(0, nl + 1);
                }
            }
            {
                std::lock_guard lock(client_mutex_);
                client_ = -1;
            }
            ::close(c);
            sink_.disconnect();
        }
    }

    StreamSource& sink_;
    int fd_ = -1;
    int port_ = 0;
    std::atomic<bool> stop_{false};
    std::mutex client_mutex_;
    int client_ = -1;
    std::thread thread_;
};

/// Source plus smoother. Switching sources re-seeds the filter from the new
/// source's first sample, so no stale velocity carries across the switch.
class GazeTracker {
public:
    explicit GazeTracker(GazeSource& source, KalmanParams params = {}) : source_(&source), smoother_(params) {}

    void switch_source(GazeSource& source) {
        source_ = &source;
        smoother_.reset();
        consumed_ = false;
    }

    /// Smoothed gaze at `now`. A record is fed to the filter once; between
    /// records the estimate is extrapolated.
    GazeSample poll(double now) {
        const GazeSample s = source_->poll(now);
        if (!consumed_ || s.t > last_t_) {
            smoother_.smooth(s);
            last_t_ = s.t;
            consumed_ = true;
        }
        GazeSample out = smoother_.estimate_at(now);
        out.x = std::clamp(out.x, 0.0, 1.0);
        out.y = std::clamp(out.y, 0.0, 1.0);
        out.valid = out.valid && s.valid;
        return out;
    }

    const GazeSmoother& smoother() const noexcept { return smoother_; }

private:
    GazeSource* source_;
    GazeSmoother smoother_;
    double last_t_ = 0.0;
    bool consumed_ = false;
};

}  // namespace visim
