#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/jsonutil.hpp"
#include "biovoice/core/parallel.hpp"
#include "biovoice/core/rng.hpp"
#include "biovoice/io/session.hpp"
#include "biovoice/io/wav.hpp"
#include "biovoice/label/labeling.hpp"

namespace biovoice {

// Deterministic synthetic corpus with planted per-question (valence, arousal)
// classes. class_separation (delta) scales how strongly the planted class
// drives the signals; delta = 0 leaves ratings informative but signals blank.
struct GeneratorSpec {
    std::size_t n_subjects = 21;
    std::size_t questions_per_subject = 38;
    double class_separation = 3.0;        // delta >= 0
    double neutral_fraction = 1.0 / 3.0;  // planted-neutral probability, [0, 1)
    double audio_present_fraction = 1.0;  // per-session audio probability, (0, 1]
    std::uint64_t seed = 0;

    // Fixed layout: 60 s pre-task calibration segment, 12 s questions
    // back-to-back, 2 s tail, all tracks starting at the same epoch. The epoch
    // stays below 1e9 so integer timestamps survive the 9-significant-digit
    // float policy of emitted artifacts exactly.
    static constexpr double kEpoch = 9.0e8;
    static constexpr double kCalibrationSeconds = 60.0;
    static constexpr double kQuestionSeconds = 12.0;
    static constexpr double kTailSeconds = 2.0;

    double duration() const {
        return kCalibrationSeconds +
               kQuestionSeconds * static_cast<double>(questions_per_subject) + kTailSeconds;
    }
};

inline void validate_spec(const GeneratorSpec& s) {
    if (s.n_subjects < 1) throw RangeViolation("generator: n_subjects must be >= 1");
    if (s.questions_per_subject < 4)
        throw RangeViolation("generator: questions_per_subject must be >= 4");
    if (!(s.class_separation >= 0.0))
        throw RangeViolation("generator: class_separation must be >= 0");
    if (!(s.neutral_fraction >= 0.0 && s.neutral_fraction < 1.0))
        throw RangeViolation("generator: neutral_fraction must be in [0,1)");
    if (!(s.audio_present_fraction > 0.0 && s.audio_present_fraction <= 1.0))
        throw RangeViolation("generator: audio_present_fraction must be in (0,1]");
}

// Planted pole per question and dimension: +1 = positive/high, 0 = neutral,
// -1 = negative/low.
struct PlantedQuestion {
    int question_id = 0;
    int valence = 0;
    int arousal = 0;
};

struct GeneratedSession {
    InterviewSession session;
    std::vector<PlantedQuestion> truth;
    bool has_audio = true;
};

namespace detail {

inline constexpr double kTwoPi = 6.28318530717958647692528676655900577;

inline std::string subject_name(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "S%02zu", index + 1);
    return buf;
}

inline int plant_pole(Rng& rng, double neutral_fraction) {
    if (rng.uniform01() < neutral_fraction) return 0;
    return rng.uniform01() < 0.5 ? 1 : -1;
}

inline int planted_rating(Rng& rng, double center, int pole) {
    const double v = center + 3.0 * static_cast<double>(pole) + 0.5 * rng.normal();
    return static_cast<int>(std::clamp(std::llround(v), 1LL, 10LL));
}

// Biexponential skin-conductance response, unit driver amplitude.
inline double scr_kernel(double t) {
    if (t < 0.0) return 0.0;
    return std::exp(-t / 2.0) - std::exp(-t / 0.7);
}

}  // namespace detail

inline GeneratedSession generate_session(const GeneratorSpec& spec, std::size_t subject_index) {
    validate_spec(spec);
    const std::uint64_t subj_seed = mix_seed(spec.seed, subject_index);
    Rng plant_rng(mix_seed(subj_seed, 1));
    Rng calib_rng(mix_seed(subj_seed, 2));
    Rng rating_rng(mix_seed(subj_seed, 3));
    Rng eda_rng(mix_seed(subj_seed, 4));
    Rng hr_rng(mix_seed(subj_seed, 5));
    Rng bvp_rng(mix_seed(subj_seed, 6));
    Rng audio_rng(mix_seed(subj_seed, 7));
    Rng presence_rng(mix_seed(subj_seed, 8));

    const double delta = spec.class_separation;
    const double t0 = GeneratorSpec::kEpoch;
    const std::size_t nq = spec.questions_per_subject;
    const double dur = spec.duration();

    GeneratedSession out;
    out.has_audio = presence_rng.uniform01() < spec.audio_present_fraction;
    InterviewSession& s = out.session;
    s.subject_id = detail::subject_name(subject_index);

    // Planted classes first, then ratings consistent with them.
    for (std::size_t i = 0; i < nq; ++i) {
        PlantedQuestion p;
        p.question_id = static_cast<int>(i) + 1;
        p.valence = detail::plant_pole(plant_rng, spec.neutral_fraction);
        p.arousal = detail::plant_pole(plant_rng, spec.neutral_fraction);
        out.truth.push_back(p);
    }

    for (int c = 0; c < 5; ++c) {
        auto draw = [&] {
            return std::clamp(std::round(50.0 + 5.0 * calib_rng.normal()), 0.0, 100.0);
        };
        s.calibration.picture_valence.push_back(draw());
        s.calibration.picture_arousal.push_back(draw());
    }
    const CalibrationOffsets off = calibration_offsets(s.calibration);

    for (std::size_t i = 0; i < nq; ++i) {
        QuestionWindow q;
        q.question_id = static_cast<int>(i) + 1;
        q.topic = static_cast<Topic>(i % kTopicCount);
        q.t_start = t0 + GeneratorSpec::kCalibrationSeconds +
                    GeneratorSpec::kQuestionSeconds * static_cast<double>(i);
        q.t_end = q.t_start + GeneratorSpec::kQuestionSeconds;
        q.rating_valence = detail::planted_rating(rating_rng, off.valence, out.truth[i].valence);
        q.rating_arousal = detail::planted_rating(rating_rng, off.arousal, out.truth[i].arousal);
        s.questions.push_back(q);
    }

    // Maps absolute time to the enclosing question's planted poles.
    auto poles_at = [&](double t, int& valence, int& arousal) {
        valence = arousal = 0;
        const double rel = t - t0 - GeneratorSpec::kCalibrationSeconds;
        if (rel < 0.0) return false;
        const std::size_t i = static_cast<std::size_t>(rel / GeneratorSpec::kQuestionSeconds);
        if (i >= nq) return false;
        valence = out.truth[i].valence;
        arousal = out.truth[i].arousal;
        return true;
    };

    // EDA, 4 Hz: slow tonic drift + planted SCR bursts + sensor noise.
    {
        s.eda.channel = Channel::EDA;
        s.eda.start_time = t0;
        s.eda.sample_rate_hz = 4.0;
        struct Event {
            double t;
            double amp;
        };
        std::vector<Event> events;
        events.push_back({t0 + 20.0, 0.05 * delta});  // calibration-segment response
        for (std::size_t i = 0; i < nq; ++i) {
            const double qs = s.questions[i].t_start;
            if (out.truth[i].arousal > 0) {
                events.push_back({qs + 2.0, 0.10 * delta});
                events.push_back({qs + 5.0, 0.10 * delta});
                events.push_back({qs + 8.0, 0.10 * delta});
            } else if (out.truth[i].arousal == 0) {
                events.push_back({qs + 4.0, 0.05 * delta});
            }
        }
        const std::size_t n = static_cast<std::size_t>(dur * 4.0);
        s.eda.samples.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = s.eda.time_at(k);
            double v = 2.0 + 0.05 * std::sin(detail::kTwoPi * (t - t0) / 180.0);
            for (const Event& e : events) v += e.amp * detail::scr_kernel(t - e.t);
            v += 0.003 * eda_rng.normal();
            s.eda.samples[k] = std::max(v, 0.0);
        }
    }

    // HR, 1 Hz: 70 bpm baseline; high arousal adds 5*delta, neutral half that.
    {
        s.hr.channel = Channel::HR;
        s.hr.start_time = t0;
        s.hr.sample_rate_hz = 1.0;
        const std::size_t n = static_cast<std::size_t>(dur);
        s.hr.samples.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            int v = 0, a = 0;
            poles_at(s.hr.time_at(k), v, a);
            double lift = a > 0 ? 5.0 * delta : (a == 0 ? 2.5 * delta : 0.0);
            const double rel = s.hr.time_at(k) - t0 - GeneratorSpec::kCalibrationSeconds;
            if (rel < 0.0) lift = 0.0;
            s.hr.samples[k] = 70.0 + lift + hr_rng.normal();
        }
    }

    // BVP, 64 Hz: 1.2 Hz pulse wave whose amplitude rises with planted arousal.
    {
        s.bvp.channel = Channel::BVP;
        s.bvp.start_time = t0;
        s.bvp.sample_rate_hz = 64.0;
        const std::size_t n = static_cast<std::size_t>(dur * 64.0);
        s.bvp.samples.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = s.bvp.time_at(k);
            int v = 0, a = 0;
            double amp = 1.0;
            if (poles_at(t, v, a)) amp += a > 0 ? 0.15 * delta : (a == 0 ? 0.075 * delta : 0.0);
            s.bvp.samples[k] =
                amp * std::sin(detail::kTwoPi * 1.2 * (t - t0)) + 0.01 * bvp_rng.normal();
        }
    }

    // Audio, 8 kHz: a harmonic tone per question. Positive valence raises the
    // pitch by 1.5*delta semitones (negative lowers it); high arousal raises
    // the level. Outside questions: low noise floor.
    if (out.has_audio) {
        AudioClip clip;
        clip.sample_rate_hz = 8000;
        const std::size_t n = static_cast<std::size_t>(dur * 8000.0);
        clip.samples.resize(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double t = t0 + static_cast<double>(k) / 8000.0;
            int v = 0, a = 0;
            double x = 0.0;
            if (poles_at(t, v, a)) {
                const double semitones = 1.5 * delta * static_cast<double>(v);
                const double f0 =
                    std::clamp(165.0 * std::pow(2.0, semitones / 12.0), 120.0, 220.0);
                const double amp =
                    std::clamp(0.1 * (1.0 + 0.2 * delta * static_cast<double>(a)), 0.02, 0.3);
                const double tau = t - t0;
                x = amp *
                    (std::sin(detail::kTwoPi * f0 * tau) + 0.5 * std::sin(detail::kTwoPi * 2.0 * f0 * tau) +
                     0.25 * std::sin(detail::kTwoPi * 3.0 * f0 * tau)) /
                    1.75;
            }
            clip.samples[k] = x + 0.005 * audio_rng.normal();
        }
        s.audio = std::move(clip);
        s.audio_start_time = t0;
    }

    validate_session(s);
    return out;
}

inline json truth_entry(const GeneratedSession& g) {
    auto pole_name = [](int p, bool valence) {
        if (p > 0) return valence ? "positive" : "high";
        if (p < 0) return valence ? "negative" : "low";
        return "neutral";
    };
    json subj;
    subj["subject_id"] = g.session.subject_id;
    subj["has_audio"] = g.has_audio;
    subj["questions"] = json::array();
    for (const auto& p : g.truth)
        subj["questions"].push_back({{"id", p.question_id},
                                     {"valence", pole_name(p.valence, true)},
                                     {"arousal", pole_name(p.arousal, false)}});
    return subj;
}

// Write one session bundle in the standard directory layout.
inline void write_session_bundle(const InterviewSession& s, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw UnwritablePath("cannot create directory: " + dir.string());
    write_text_file(dir / "EDA.csv", serialize_track(s.eda));
    write_text_file(dir / "BVP.csv", serialize_track(s.bvp));
    write_text_file(dir / "HR.csv", serialize_track(s.hr));
    Manifest m;
    m.subject_id = s.subject_id;
    m.questions = s.questions;
    m.calibration = s.calibration;
    if (s.audio) m.audio_start_time = s.audio_start_time;
    write_json_file(dir / "manifest.json", manifest_to_json(m));
    if (s.audio) save_wav_int16(dir / "interview.wav", s.audio->sample_rate_hz, s.audio->samples);
}

// Generate every subject's bundle plus truth.json; returns the truth document.
inline json generate_corpus(const GeneratorSpec& spec, const std::filesystem::path& out_dir,
                            unsigned jobs = 1) {
    validate_spec(spec);
    std::vector<json> subjects(spec.n_subjects);
    parallel_for(spec.n_subjects, jobs, [&](std::size_t i) {
        GeneratedSession g = generate_session(spec, i);
        write_session_bundle(g.session, out_dir / g.session.subject_id);
        subjects[i] = truth_entry(g);
    });
    json truth;
    truth["spec"] = {{"n_subjects", spec.n_subjects},
                     {"questions_per_subject", spec.questions_per_subject},
                     {"class_separation", spec.class_separation},
                     {"neutral_fraction", spec.neutral_fraction},
                     {"audio_present_fraction", spec.audio_present_fraction},
                     {"seed", spec.seed}};
    truth["subjects"] = json::array();
    for (auto& sj : subjects) truth["subjects"].push_back(std::move(sj));
    write_json_file(out_dir / "truth.json", truth);
    return truth;
}

}  // namespace biovoice
