#include <catch2/catch_amalgamated.hpp>

#include <cstddef>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "biovoice/core/mathutil.hpp"
#include "biovoice/core/rng.hpp"
#include "biovoice/io/session.hpp"
#include "biovoice/synth/generate.hpp"

using namespace biovoice;
namespace fs = std::filesystem;

TEST_CASE("validate_spec rejects out-of-range parameters") {
    GeneratorSpec s;
    s.n_subjects = 0;
    REQUIRE_THROWS_AS(validate_spec(s), RangeViolation);
    s = {};
    s.questions_per_subject = 3;
    REQUIRE_THROWS_AS(validate_spec(s), RangeViolation);
    s = {};
    s.class_separation = -1.0;
    REQUIRE_THROWS_AS(validate_spec(s), RangeViolation);
    s = {};
    s.neutral_fraction = 1.0;
    REQUIRE_THROWS_AS(validate_spec(s), RangeViolation);
    s = {};
    s.audio_present_fraction = 0.0;
    REQUIRE_THROWS_AS(validate_spec(s), RangeViolation);
    s.audio_present_fraction = 1.5;
    REQUIRE_THROWS_AS(validate_spec(s), RangeViolation);
    REQUIRE_NOTHROW(validate_spec(GeneratorSpec{}));
}

TEST_CASE("generation is deterministic per (seed, subject) and varies across subjects") {
    GeneratorSpec spec;
    spec.n_subjects = 2;
    spec.questions_per_subject = 6;
    spec.seed = 11;
    GeneratedSession a = generate_session(spec, 0);
    GeneratedSession b = generate_session(spec, 0);
    REQUIRE(a.session.eda.samples == b.session.eda.samples);
    REQUIRE(a.session.bvp.samples == b.session.bvp.samples);
    REQUIRE(a.session.hr.samples == b.session.hr.samples);
    REQUIRE(a.has_audio == b.has_audio);
    REQUIRE(a.session.audio->samples == b.session.audio->samples);
    for (std::size_t i = 0; i < a.truth.size(); ++i) {
        REQUIRE(a.truth[i].valence == b.truth[i].valence);
        REQUIRE(a.truth[i].arousal == b.truth[i].arousal);
    }
    for (std::size_t i = 0; i < a.session.questions.size(); ++i) {
        REQUIRE(a.session.questions[i].rating_valence == b.session.questions[i].rating_valence);
        REQUIRE(a.session.questions[i].rating_arousal == b.session.questions[i].rating_arousal);
    }

    GeneratedSession other = generate_session(spec, 1);
    REQUIRE(other.session.subject_id == "S02");
    REQUIRE(other.session.eda.samples != a.session.eda.samples);
}

TEST_CASE("generated sessions respect layout and rating ranges") {
    GeneratorSpec spec;
    spec.questions_per_subject = 38;
    spec.seed = 5;
    GeneratedSession g = generate_session(spec, 0);
    const InterviewSession& s = g.session;

    REQUIRE(s.subject_id == "S01");
    REQUIRE(s.questions.size() == 38);
    REQUIRE(s.eda.sample_rate_hz == 4.0);
    REQUIRE(s.bvp.sample_rate_hz == 64.0);
    REQUIRE(s.hr.sample_rate_hz == 1.0);
    REQUIRE(s.eda.start_time == GeneratorSpec::kEpoch);
    REQUIRE(s.questions.front().t_start == GeneratorSpec::kEpoch + 60.0);
    REQUIRE(s.questions.front().t_end - s.questions.front().t_start == 12.0);

    REQUIRE(s.calibration.picture_valence.size() == 5);
    REQUIRE(s.calibration.picture_arousal.size() == 5);
    for (double v : s.calibration.picture_valence) {
        REQUIRE(v >= 0.0);
        REQUIRE(v <= 100.0);
    }
    for (const auto& q : s.questions) {
        REQUIRE(q.rating_valence >= 1);
        REQUIRE(q.rating_valence <= 10);
        REQUIRE(q.rating_arousal >= 1);
        REQUIRE(q.rating_arousal <= 10);
    }
    // timestamps survive the 9-significant-digit float policy exactly
    for (const auto& q : s.questions) {
        REQUIRE(round_g9(q.t_start) == q.t_start);
        REQUIRE(round_g9(q.t_end) == q.t_end);
    }
}

TEST_CASE("planted poles drive the self-report ratings") {
    GeneratorSpec spec;
    spec.questions_per_subject = 38;
    spec.class_separation = 3.0;
    spec.seed = 5;
    GeneratedSession g = generate_session(spec, 0);
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < g.truth.size(); ++i) {
        if (g.truth[i].valence > 0)
            pos.push_back(static_cast<double>(g.session.questions[i].rating_valence));
        else if (g.truth[i].valence < 0)
            neg.push_back(static_cast<double>(g.session.questions[i].rating_valence));
    }
    REQUIRE(!pos.empty());
    REQUIRE(!neg.empty());
    REQUIRE(mean(pos) > mean(neg) + 3.0);
}

TEST_CASE("class separation shapes physiology; delta zero leaves signals flat") {
    GeneratorSpec d3;
    d3.questions_per_subject = 38;
    d3.class_separation = 3.0;
    d3.seed = 9;
    GeneratorSpec d0 = d3;
    d0.class_separation = 0.0;
    GeneratedSession g3 = generate_session(d3, 0);
    GeneratedSession g0 = generate_session(d0, 0);

    // same plant stream: identical truth despite different delta
    for (std::size_t i = 0; i < g3.truth.size(); ++i) {
        REQUIRE(g3.truth[i].valence == g0.truth[i].valence);
        REQUIRE(g3.truth[i].arousal == g0.truth[i].arousal);
    }

    // HR lift per arousal pole, visible only when delta > 0
    auto hr_window_mean = [](const GeneratedSession& g, std::size_t qi) {
        const auto& q = g.session.questions[qi];
        std::vector<double> w;
        for (std::size_t k = 0; k < g.session.hr.samples.size(); ++k) {
            double t = g.session.hr.time_at(k);
            if (t >= q.t_start && t < q.t_end) w.push_back(g.session.hr.samples[k]);
        }
        return mean(w);
    };
    std::vector<double> high3, low3, high0, low0;
    for (std::size_t i = 0; i < g3.truth.size(); ++i) {
        if (g3.truth[i].arousal > 0) {
            high3.push_back(hr_window_mean(g3, i));
            high0.push_back(hr_window_mean(g0, i));
        } else if (g3.truth[i].arousal < 0) {
            low3.push_back(hr_window_mean(g3, i));
            low0.push_back(hr_window_mean(g0, i));
        }
    }
    REQUIRE(!high3.empty());
    REQUIRE(!low3.empty());
    REQUIRE(mean(high3) - mean(low3) > 5.0);
    REQUIRE(std::abs(mean(high0) - mean(low0)) < 3.0);

    // SCR bursts add EDA spread
    REQUIRE(pop_std(g3.session.eda.samples) > pop_std(g0.session.eda.samples));
}

TEST_CASE("truth_entry names the planted poles") {
    GeneratorSpec spec;
    spec.questions_per_subject = 10;
    spec.seed = 3;
    GeneratedSession g = generate_session(spec, 0);
    json e = truth_entry(g);
    REQUIRE(e["subject_id"] == "S01");
    REQUIRE(e["has_audio"].is_boolean());
    REQUIRE(e["questions"].size() == 10);
    const std::set<std::string> val_names = {"positive", "negative", "neutral"};
    const std::set<std::string> aro_names = {"high", "low", "neutral"};
    for (std::size_t i = 0; i < 10; ++i) {
        const json& q = e["questions"][static_cast<int>(i)];
        REQUIRE(q["id"] == static_cast<int>(i) + 1);
        REQUIRE(val_names.count(q["valence"].get<std::string>()) == 1);
        REQUIRE(aro_names.count(q["arousal"].get<std::string>()) == 1);
        if (g.truth[i].valence > 0) REQUIRE(q["valence"] == "positive");
        if (g.truth[i].valence < 0) REQUIRE(q["valence"] == "negative");
        if (g.truth[i].arousal > 0) REQUIRE(q["arousal"] == "high");
        if (g.truth[i].arousal == 0) REQUIRE(q["arousal"] == "neutral");
    }
}

TEST_CASE("audio presence follows the per-subject presence stream") {
    GeneratorSpec spec;
    spec.n_subjects = 10;
    spec.questions_per_subject = 4;
    spec.audio_present_fraction = 0.6;
    spec.seed = 21;
    for (std::size_t i = 0; i < spec.n_subjects; ++i) {
        GeneratedSession g = generate_session(spec, i);
        Rng presence(mix_seed(mix_seed(spec.seed, i), 8));
        const bool expect = presence.uniform01() < spec.audio_present_fraction;
        REQUIRE(g.has_audio == expect);
        REQUIRE(g.session.audio.has_value() == expect);
    }
    spec.audio_present_fraction = 1.0;
    for (std::size_t i = 0; i < 4; ++i)
        REQUIRE(generate_session(spec, i).session.audio.has_value());
}

TEST_CASE("session bundles round trip through the loader") {
    GeneratorSpec spec;
    spec.questions_per_subject = 4;
    spec.seed = 77;
    GeneratedSession g = generate_session(spec, 0);

    const fs::path dir = fs::temp_directory_path() / "biovoice_synth_rt" / g.session.subject_id;
    write_session_bundle(g.session, dir);
    InterviewSession back = load_session(dir);

    REQUIRE(back.subject_id == g.session.subject_id);
    REQUIRE(back.questions.size() == g.session.questions.size());
    for (std::size_t i = 0; i < back.questions.size(); ++i) {
        REQUIRE(back.questions[i].t_start == g.session.questions[i].t_start);  // exact
        REQUIRE(back.questions[i].t_end == g.session.questions[i].t_end);
        REQUIRE(back.questions[i].rating_valence == g.session.questions[i].rating_valence);
    }
    REQUIRE(back.eda.samples.size() == g.session.eda.samples.size());
    for (std::size_t k = 0; k < back.eda.samples.size(); ++k)
        REQUIRE(back.eda.samples[k] ==
                Catch::Approx(g.session.eda.samples[k]).epsilon(1e-8).margin(1e-8));
    REQUIRE(back.audio.has_value());
    REQUIRE(back.audio->samples.size() == g.session.audio->samples.size());
    for (std::size_t k = 0; k < back.audio->samples.size(); k += 997)
        REQUIRE(back.audio->samples[k] == Catch::Approx(g.session.audio->samples[k]).margin(1e-4));

    fs::remove_all(dir.parent_path());
}

TEST_CASE("generate_corpus writes every bundle plus the truth document") {
    GeneratorSpec spec;
    spec.n_subjects = 2;
    spec.questions_per_subject = 6;
    spec.seed = 1;
    const fs::path dir = fs::temp_directory_path() / "biovoice_synth_corpus";
    fs::remove_all(dir);
    json truth = generate_corpus(spec, dir);

    REQUIRE(truth["spec"]["n_subjects"] == 2);
    REQUIRE(truth["spec"]["questions_per_subject"] == 6);
    REQUIRE(truth["spec"]["class_separation"] == Catch::Approx(3.0));
    REQUIRE(truth["spec"]["seed"] == 1);
    REQUIRE(truth["subjects"].size() == 2);
    REQUIRE(truth["subjects"][0]["subject_id"] == "S01");
    REQUIRE(truth["subjects"][1]["subject_id"] == "S02");

    for (const char* subj : {"S01", "S02"}) {
        for (const char* f : {"EDA.csv", "BVP.csv", "HR.csv", "manifest.json", "interview.wav"})
            REQUIRE(fs::exists(dir / subj / f));
        REQUIRE_NOTHROW(load_session(dir / subj));
    }
    REQUIRE(read_json_file(dir / "truth.json") == truth);

    fs::remove_all(dir);
}
