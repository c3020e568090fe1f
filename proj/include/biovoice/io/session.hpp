#pragma once

#include <cmath>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/io/manifest.hpp"
#include "biovoice/io/track.hpp"
#include "biovoice/io/wav.hpp"

namespace biovoice {

// One subject's recorded interview: three physiological tracks, optional audio,
// question windows, and the calibration record. Immutable after construction.
struct InterviewSession {
    std::string subject_id;
    SignalTrack eda;
    SignalTrack bvp;
    SignalTrack hr;
    std::optional<AudioClip> audio;
    double audio_start_time = 0.0;  // valid when audio is present
    std::vector<QuestionWindow> questions;
    CalibrationRecord calibration;

    const QuestionWindow* find_question(int question_id) const {
        for (const auto& q : questions)
            if (q.question_id == question_id) return &q;
        return nullptr;
    }
};

// Per-question signal slices; audio present only when the session has audio.
struct SegmentSlices {
    std::vector<double> eda;
    std::vector<double> bvp;
    std::vector<double> hr;
    std::optional<std::vector<double>> audio;
};

namespace detail {

// Half-open slice [t0, t1) of a uniformly sampled sequence that starts at
// `start` with rate `rate`: indices k with start + k/rate in [t0, t1).
struct SliceIndex {
    std::ptrdiff_t begin;
    std::ptrdiff_t end;
};

inline SliceIndex slice_indices(double start, double rate, double t0, double t1) {
    // ceil with a small tolerance so exact boundaries stay exact.
    auto lower = [&](double t) {
        return static_cast<std::ptrdiff_t>(std::ceil((t - start) * rate - 1e-9));
    };
    return {lower(t0), lower(t1)};
}

inline std::vector<double> slice_or_throw(const std::vector<double>& samples, double start,
                                          double rate, double t0, double t1,
                                          const char* what) {
    SliceIndex s = slice_indices(start, rate, t0, t1);
    if (s.begin < 0 || s.end > static_cast<std::ptrdiff_t>(samples.size()))
        throw WindowOutsideTrack(std::string(what) + ": window [" + fmt_g9(t0) + "," + fmt_g9(t1) +
                                 ") outside track span");
    if (s.end <= s.begin)
        throw EmptyWindow(std::string(what) + ": window shorter than one sample period");
    return std::vector<double>(samples.begin() + s.begin, samples.begin() + s.end);
}

}  // namespace detail

// Slice every track (and audio, when present) to [t0, t1).
inline SegmentSlices segment_window(const InterviewSession& s, double t0, double t1) {
    SegmentSlices out;
    out.eda = detail::slice_or_throw(s.eda.samples, s.eda.start_time, s.eda.sample_rate_hz, t0, t1,
                                     "EDA");
    out.bvp = detail::slice_or_throw(s.bvp.samples, s.bvp.start_time, s.bvp.sample_rate_hz, t0, t1,
                                     "BVP");
    out.hr = detail::slice_or_throw(s.hr.samples, s.hr.start_time, s.hr.sample_rate_hz, t0, t1,
                                    "HR");
    if (s.audio) {
        out.audio = detail::slice_or_throw(s.audio->samples, s.audio_start_time,
                                           static_cast<double>(s.audio->sample_rate_hz), t0, t1,
                                           "audio");
    }
    return out;
}

// Slice tracks to a question's window [t_start, t_end).
inline SegmentSlices segment(const InterviewSession& s, int question_id) {
    const QuestionWindow* q = s.find_question(question_id);
    if (q == nullptr)
        throw WindowOutsideTrack("unknown question id " + std::to_string(question_id));
    return segment_window(s, q->t_start, q->t_end);
}

// Validate cross-source invariants after assembly.
inline void validate_session(const InterviewSession& s) {
    const SignalTrack* tracks[] = {&s.eda, &s.bvp, &s.hr};
    for (const auto& q : s.questions) {
        for (const SignalTrack* t : tracks) {
            if (q.t_start < t->start_time - 1e-9 || q.t_end > t->end_time() + 1e-9)
                throw WindowOutsideTrack("question " + std::to_string(q.question_id) +
                                         " outside " + channel_name(t->channel) + " span");
        }
    }
    if (s.audio && !s.questions.empty()) {
        double audio_end =
            s.audio_start_time + s.audio->duration();
        if (s.questions.front().t_start < s.audio_start_time - 1e-9 ||
            s.questions.back().t_end > audio_end + 1e-9)
            throw WindowOutsideTrack("question windows outside audio span");
    }
}

// Load a session bundle directory: EDA.csv, BVP.csv, HR.csv, manifest.json,
// optional interview.wav. Sample-rate deviations are reported as warnings.
inline InterviewSession load_session(const std::filesystem::path& dir,
                                     std::vector<std::string>* warnings = nullptr) {
    namespace fs = std::filesystem;
    InterviewSession s;
    Manifest m = load_manifest(dir / "manifest.json");
    s.subject_id = m.subject_id;
    s.questions = m.questions;
    s.calibration = m.calibration;

    auto load_track = [&](const char* file, Channel ch) {
        SignalTrack t = parse_track(read_text_file(dir / file), ch);
        if (warnings && std::abs(t.sample_rate_hz - expected_rate(ch)) > 1e-9) {
            warnings->push_back(dir.filename().string() + "/" + file + ": sample rate " +
                                fmt_g9(t.sample_rate_hz) + " Hz deviates from expected " +
                                fmt_g9(expected_rate(ch)) + " Hz");
        }
        return t;
    };
    s.eda = load_track("EDA.csv", Channel::EDA);
    s.bvp = load_track("BVP.csv", Channel::BVP);
    s.hr = load_track("HR.csv", Channel::HR);

    fs::path wav = dir / "interview.wav";
    if (fs::exists(wav)) {
        s.audio = load_wav_file(wav);
        s.audio_start_time = m.audio_start_time.value_or(s.eda.start_time);
    }
    validate_session(s);
    return s;
}

// Session start; the pre-task calibration segment spans from here to the first question.
inline double session_start(const InterviewSession& s) {
    return std::max(std::max(s.eda.start_time, s.bvp.start_time), s.hr.start_time);
}

}  // namespace biovoice
