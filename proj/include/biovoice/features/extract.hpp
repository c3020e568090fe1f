#pragma once

#include <optional>
#include <string>
#include <vector>

#include "biovoice/cardio/pulse.hpp"
#include "biovoice/core/error.hpp"
#include "biovoice/core/parallel.hpp"
#include "biovoice/dsp/spectral.hpp"
#include "biovoice/eda/cvxeda.hpp"
#include "biovoice/io/session.hpp"

namespace biovoice {

// Everything needed to turn raw windows into features.
struct ExtractionParams {
    EdaParams eda;
    FilterSpec bvp_filter;
    double bvp_min_separation_s = 0.33;
    SpectralConfig voice;
};

inline constexpr std::size_t kBioFeatureDim = 12;

// One (subject, question) feature row: 12 physiological features and, when the
// question has usable audio, the spectral voice features.
struct FeatureVector {
    std::string subject_id;
    int question_id = 0;
    Topic topic = Topic::usage_habits;
    double t_start = 0.0;
    double t_end = 0.0;
    int rating_valence = 0;
    int rating_arousal = 0;
    std::vector<double> bio;    // 12: mean tonic, phasic area, SCR peak min/max/
                                // mean/sum, pulse peak min/max/sum, pulse mean
                                // minus baseline, HR mean/std minus baseline
    std::vector<double> voice;  // empty when voice_missing
    bool voice_missing = true;
};

struct SessionFeatures {
    std::string subject_id;
    BaselineStats baseline;
    CalibrationRecord calibration;
    std::size_t voice_dim = 0;
    std::vector<FeatureVector> questions;
};

// Features of one already-sliced question window.
inline FeatureVector extract_window(const SegmentSlices& slices, const InterviewSession& s,
                                    const QuestionWindow& q, const BaselineStats& baseline,
                                    const ExtractionParams& params) {
    FeatureVector fv;
    fv.subject_id = s.subject_id;
    fv.question_id = q.question_id;
    fv.topic = q.topic;
    fv.t_start = q.t_start;
    fv.t_end = q.t_end;
    fv.rating_valence = q.rating_valence;
    fv.rating_arousal = q.rating_arousal;

    EdaDecomposition dec = decompose(slices.eda, s.eda.sample_rate_hz, params.eda);
    auto scr = detect_scr_peaks(dec.phasic, s.eda.sample_rate_hz, params.eda.min_peak_uS);
    fv.bio = eda_features(dec, scr, s.eda.sample_rate_hz);

    auto filtered = bandpass(slices.bvp, s.bvp.sample_rate_hz, params.bvp_filter);
    auto pulses = detect_pulse_peaks(filtered, s.bvp.sample_rate_hz, params.bvp_min_separation_s);
    for (double v : bvp_features(pulses, baseline)) fv.bio.push_back(v);
    for (double v : hr_features(slices.hr, baseline)) fv.bio.push_back(v);

    if (slices.audio && slices.audio->size() >= params.voice.frame_len) {
        fv.voice = voice_features(*slices.audio, s.audio->sample_rate_hz, params.voice).flatten();
        fv.voice_missing = false;
    }
    return fv;
}

// Extract the full session: baseline statistics from the pre-task segment
// [session start, first question), then one feature row per question.
inline SessionFeatures extract_session(const InterviewSession& s,
                                       const ExtractionParams& params = {},
                                       unsigned jobs = 1) {
    if (s.questions.empty()) throw EmptyWindow("session has no questions");
    SessionFeatures out;
    out.subject_id = s.subject_id;
    out.calibration = s.calibration;
    out.voice_dim = voice_feature_dim(params.voice);

    const double t0 = session_start(s);
    const double t1 = s.questions.front().t_start;
    if (!(t1 > t0))
        throw EmptyWindow("no pre-task segment before the first question");
    SegmentSlices base = segment_window(s, t0, t1);
    out.baseline = compute_baseline(base.bvp, s.bvp.sample_rate_hz, base.hr, params.bvp_filter,
                                    params.bvp_min_separation_s);

    out.questions.resize(s.questions.size());
    parallel_for(s.questions.size(), jobs, [&](std::size_t i) {
        const QuestionWindow& q = s.questions[i];
        SegmentSlices slices = segment_window(s, q.t_start, q.t_end);
        out.questions[i] = extract_window(slices, s, q, out.baseline, params);
    });
    return out;
}

inline json session_features_to_json(const SessionFeatures& f) {
    json j;
    j["subject_id"] = f.subject_id;
    j["baseline"] = {{"hr_mean", f.baseline.hr_mean},
                     {"hr_std", f.baseline.hr_std},
                     {"bvp_mean_peak", f.baseline.bvp_mean_peak_amplitude}};
    j["calibration"]["valence"] = f.calibration.picture_valence;
    j["calibration"]["arousal"] = f.calibration.picture_arousal;
    j["voice_dim"] = f.voice_dim;
    j["questions"] = json::array();
    for (const auto& q : f.questions) {
        json e;
        e["id"] = q.question_id;
        e["topic"] = topic_name(q.topic);
        e["t_start"] = q.t_start;
        e["t_end"] = q.t_end;
        e["q_valence"] = q.rating_valence;
        e["q_arousal"] = q.rating_arousal;
        e["bio"] = q.bio;
        if (q.voice_missing)
            e["voice"] = nullptr;
        else
            e["voice"] = q.voice;
        j["questions"].push_back(e);
    }
    return j;
}

inline SessionFeatures session_features_from_json(const json& j) {
    SessionFeatures f;
    f.subject_id = j.at("subject_id").get<std::string>();
    f.baseline.hr_mean = j.at("baseline").at("hr_mean").get<double>();
    f.baseline.hr_std = j.at("baseline").at("hr_std").get<double>();
    f.baseline.bvp_mean_peak_amplitude = j.at("baseline").at("bvp_mean_peak").get<double>();
    f.calibration.picture_valence = j.at("calibration").at("valence").get<std::vector<double>>();
    f.calibration.picture_arousal = j.at("calibration").at("arousal").get<std::vector<double>>();
    f.voice_dim = j.at("voice_dim").get<std::size_t>();
    for (const auto& e : j.at("questions")) {
        FeatureVector q;
        q.subject_id = f.subject_id;
        q.question_id = e.at("id").get<int>();
        q.topic = topic_from_name(e.at("topic").get<std::string>());
        q.t_start = e.at("t_start").get<double>();
        q.t_end = e.at("t_end").get<double>();
        q.rating_valence = e.at("q_valence").get<int>();
        q.rating_arousal = e.at("q_arousal").get<int>();
        q.bio = e.at("bio").get<std::vector<double>>();
        if (e.contains("voice") && !e.at("voice").is_null()) {
            q.voice = e.at("voice").get<std::vector<double>>();
            q.voice_missing = false;
        }
        f.questions.push_back(std::move(q));
    }
    return f;
}

}  // namespace biovoice
