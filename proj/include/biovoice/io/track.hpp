#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/mathutil.hpp"

namespace biovoice {

enum class Channel { EDA, BVP, HR };

inline const char* channel_name(Channel c) {
    switch (c) {
        case Channel::EDA: return "EDA";
        case Channel::BVP: return "BVP";
        default: return "HR";
    }
}

// Expected device sample rates; deviations warn, never fail.
inline double expected_rate(Channel c) {
    switch (c) {
        case Channel::EDA: return 4.0;
        case Channel::BVP: return 64.0;
        default: return 1.0;
    }
}

// Uniformly sampled physiological channel.
// EDA in microsiemens, BVP in device units, HR in beats/min.
struct SignalTrack {
    Channel channel = Channel::EDA;
    double start_time = 0.0;     // UTC seconds
    double sample_rate_hz = 0.0;
    std::vector<double> samples;

    double duration() const {
        return static_cast<double>(samples.size()) / sample_rate_hz;
    }
    // End of the sampled span (exclusive).
    double end_time() const { return start_time + duration(); }
    // Timestamp of sample k.
    double time_at(std::size_t k) const {
        return start_time + static_cast<double>(k) / sample_rate_hz;
    }
};

namespace detail {

inline std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char ch : text) {
        if (ch == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    if (!cur.empty()) lines.push_back(cur);
    // Trailing blank lines are not samples.
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

}  // namespace detail

// Track CSV format: row 1 = UTC start timestamp, row 2 = sample rate in Hz,
// each following row = one sample.
inline SignalTrack parse_track(const std::string& text, Channel channel) {
    auto lines = detail::split_lines(text);
    if (lines.size() < 2) throw MalformedHeader("track needs timestamp and rate rows");
    SignalTrack t;
    t.channel = channel;
    if (!parse_double_strict(lines[0], t.start_time) || !std::isfinite(t.start_time))
        throw MalformedHeader("row 1 (start timestamp) is not numeric: " + lines[0]);
    if (!parse_double_strict(lines[1], t.sample_rate_hz) ||
        !std::isfinite(t.sample_rate_hz) || t.sample_rate_hz <= 0.0)
        throw MalformedHeader("row 2 (sample rate) is not a positive number: " + lines[1]);
    t.samples.reserve(lines.size() - 2);
    for (std::size_t i = 2; i < lines.size(); ++i) {
        double v;
        if (!parse_double_strict(lines[i], v) || !std::isfinite(v))
            throw NonFiniteSample("row " + std::to_string(i + 1) + " is not finite: " + lines[i]);
        t.samples.push_back(v);
    }
    if (t.samples.empty()) throw EmptyTrack(std::string(channel_name(channel)) + ": no samples");
    return t;
}

// Inverse of parse_track; numeric content preserved to 9 significant digits.
inline std::string serialize_track(const SignalTrack& t) {
    std::string out;
    out.reserve(t.samples.size() * 12 + 32);
    out += fmt_g9(t.start_time);
    out += '\n';
    out += fmt_g9(t.sample_rate_hz);
    out += '\n';
    for (double v : t.samples) {
        out += fmt_g9(v);
        out += '\n';
    }
    return out;
}

}  // namespace biovoice
