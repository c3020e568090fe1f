#include <catch2/catch_amalgamated.hpp>

#include <cstddef>
#include <vector>

#include "biovoice/features/extract.hpp"
#include "biovoice/synth/generate.hpp"

using namespace biovoice;

namespace {

GeneratorSpec small_spec() {
    GeneratorSpec spec;
    spec.n_subjects = 1;
    spec.questions_per_subject = 4;
    spec.class_separation = 2.0;
    spec.audio_present_fraction = 1.0;
    spec.seed = 42;
    return spec;
}

}  // namespace

TEST_CASE("extract_session produces one complete row per question") {
    GeneratedSession g = generate_session(small_spec(), 0);
    SessionFeatures f = extract_session(g.session);

    REQUIRE(f.subject_id == "S01");
    REQUIRE(f.voice_dim == 160);
    REQUIRE(f.questions.size() == 4);
    REQUIRE(f.calibration.picture_valence == g.session.calibration.picture_valence);
    REQUIRE(f.calibration.picture_arousal == g.session.calibration.picture_arousal);

    // pre-task segment carries no planted lift: resting heart rate
    REQUIRE(f.baseline.hr_mean == Catch::Approx(70.0).margin(1.0));
    REQUIRE(f.baseline.bvp_mean_peak_amplitude > 0.0);

    for (std::size_t i = 0; i < f.questions.size(); ++i) {
        const FeatureVector& q = f.questions[i];
        const QuestionWindow& src = g.session.questions[i];
        REQUIRE(q.subject_id == "S01");
        REQUIRE(q.question_id == src.question_id);
        REQUIRE(q.topic == src.topic);
        REQUIRE(q.t_start == src.t_start);
        REQUIRE(q.t_end == src.t_end);
        REQUIRE(q.rating_valence == src.rating_valence);
        REQUIRE(q.rating_arousal == src.rating_arousal);
        REQUIRE(q.bio.size() == kBioFeatureDim);
        for (double v : q.bio) REQUIRE(std::isfinite(v));
        REQUIRE_FALSE(q.voice_missing);
        REQUIRE(q.voice.size() == 160);
        for (double v : q.voice) REQUIRE(std::isfinite(v));
    }
}

TEST_CASE("parallel extraction matches single-threaded output") {
    GeneratedSession g = generate_session(small_spec(), 0);
    SessionFeatures one = extract_session(g.session, {}, 1);
    SessionFeatures two = extract_session(g.session, {}, 2);
    REQUIRE(one.questions.size() == two.questions.size());
    for (std::size_t i = 0; i < one.questions.size(); ++i) {
        REQUIRE(one.questions[i].bio == two.questions[i].bio);
        REQUIRE(one.questions[i].voice == two.questions[i].voice);
    }
}

TEST_CASE("sessions without audio yield voice-missing rows") {
    GeneratedSession g = generate_session(small_spec(), 0);
    g.session.audio.reset();
    SessionFeatures f = extract_session(g.session);
    REQUIRE(f.questions.size() == 4);
    for (const auto& q : f.questions) {
        REQUIRE(q.voice_missing);
        REQUIRE(q.voice.empty());
        REQUIRE(q.bio.size() == kBioFeatureDim);
    }
}

TEST_CASE("extract_session guards its window preconditions") {
    GeneratedSession g = generate_session(small_spec(), 0);
    auto s = g.session;
    s.questions.clear();
    REQUIRE_THROWS_AS(extract_session(s), EmptyWindow);

    auto s2 = g.session;
    s2.questions[0].t_start = session_start(s2);  // no pre-task segment left
    REQUIRE_THROWS_AS(extract_session(s2), EmptyWindow);
}

TEST_CASE("mel_scalar collapses the voice block") {
    GeneratedSession g = generate_session(small_spec(), 0);
    ExtractionParams params;
    params.voice.mel_scalar = true;
    SessionFeatures f = extract_session(g.session, params);
    REQUIRE(f.voice_dim == 33);
    for (const auto& q : f.questions) REQUIRE(q.voice.size() == 33);
}

TEST_CASE("session features survive the JSON round trip") {
    GeneratedSession g = generate_session(small_spec(), 0);
    SessionFeatures f = extract_session(g.session);
    f.questions[2].voice.clear();
    f.questions[2].voice_missing = true;  // exercise the null branch

    json j = session_features_to_json(f);
    REQUIRE(j["questions"][2]["voice"].is_null());
    REQUIRE_FALSE(j["questions"][0]["voice"].is_null());

    SessionFeatures back = session_features_from_json(j);
    REQUIRE(back.subject_id == f.subject_id);
    REQUIRE(back.voice_dim == f.voice_dim);
    REQUIRE(back.baseline.hr_mean == f.baseline.hr_mean);
    REQUIRE(back.baseline.hr_std == f.baseline.hr_std);
    REQUIRE(back.baseline.bvp_mean_peak_amplitude == f.baseline.bvp_mean_peak_amplitude);
    REQUIRE(back.calibration.picture_valence == f.calibration.picture_valence);
    REQUIRE(back.questions.size() == f.questions.size());
    for (std::size_t i = 0; i < f.questions.size(); ++i) {
        REQUIRE(back.questions[i].question_id == f.questions[i].question_id);
        REQUIRE(back.questions[i].topic == f.questions[i].topic);
        REQUIRE(back.questions[i].rating_valence == f.questions[i].rating_valence);
        REQUIRE(back.questions[i].rating_arousal == f.questions[i].rating_arousal);
        REQUIRE(back.questions[i].bio == f.questions[i].bio);
        REQUIRE(back.questions[i].voice == f.questions[i].voice);
        REQUIRE(back.questions[i].voice_missing == f.questions[i].voice_missing);
    }
}
