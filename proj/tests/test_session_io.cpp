#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "biovoice/core/jsonutil.hpp"
#include "biovoice/io/manifest.hpp"
#include "biovoice/io/session.hpp"
#include "biovoice/io/track.hpp"
#include "biovoice/io/wav.hpp"

using namespace biovoice;
namespace fs = std::filesystem;

namespace {

json make_manifest_json() {
    json j;
    j["subject_id"] = "S01";
    j["audio_start_time"] = 1000.0;
    j["questions"] = json::array();
    json q1;
    q1["id"] = 1;
    q1["topic"] = "privacy";
    q1["t_start"] = 1010.0;
    q1["t_end"] = 1022.0;
    q1["q_arousal"] = 7;
    q1["q_valence"] = 3;
    j["questions"].push_back(q1);
    json q2 = q1;
    q2["id"] = 2;
    q2["topic"] = "money";
    q2["t_start"] = 1025.0;
    q2["t_end"] = 1040.0;
    j["questions"].push_back(q2);
    j["calibration"]["valence"] = {10.0, 50.0, 90.0};
    j["calibration"]["arousal"] = {20.0, 60.0};
    return j;
}

SignalTrack make_track(Channel ch, double start, double rate, std::size_t n) {
    SignalTrack t;
    t.channel = ch;
    t.start_time = start;
    t.sample_rate_hz = rate;
    t.samples.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        t.samples[i] = 1.0 + 0.25 * std::sin(0.01 * static_cast<double>(i));
    return t;
}

}  // namespace

TEST_CASE("track CSV round trips through serialize and parse") {
    SignalTrack t = make_track(Channel::EDA, 1000.25, 4.0, 37);
    SignalTrack back = parse_track(serialize_track(t), Channel::EDA);
    REQUIRE(back.start_time == Catch::Approx(t.start_time));
    REQUIRE(back.sample_rate_hz == Catch::Approx(4.0));
    REQUIRE(back.samples.size() == t.samples.size());
    for (std::size_t i = 0; i < t.samples.size(); ++i)
        REQUIRE(back.samples[i] == Catch::Approx(t.samples[i]).epsilon(1e-9));
    REQUIRE(back.duration() == Catch::Approx(37.0 / 4.0));
    REQUIRE(back.end_time() == Catch::Approx(1000.25 + 9.25));
    REQUIRE(back.time_at(4) == Catch::Approx(1001.25));
}

TEST_CASE("track parser handles CRLF and trailing blank lines") {
    SignalTrack t = parse_track("100\r\n4\r\n1.5\r\n2.5\r\n\r\n\r\n", Channel::HR);
    REQUIRE(t.samples == std::vector<double>{1.5, 2.5});
    REQUIRE(t.start_time == Catch::Approx(100.0));
}

TEST_CASE("track parser rejects malformed input with specific errors") {
    REQUIRE_THROWS_AS(parse_track("", Channel::EDA), MalformedHeader);
    REQUIRE_THROWS_AS(parse_track("1000\n", Channel::EDA), MalformedHeader);
    REQUIRE_THROWS_AS(parse_track("abc\n4\n1\n", Channel::EDA), MalformedHeader);
    REQUIRE_THROWS_AS(parse_track("1000\n0\n1\n", Channel::EDA), MalformedHeader);
    REQUIRE_THROWS_AS(parse_track("1000\n-4\n1\n", Channel::EDA), MalformedHeader);
    REQUIRE_THROWS_AS(parse_track("1000\nnan\n1\n", Channel::EDA), MalformedHeader);
    REQUIRE_THROWS_AS(parse_track("1000\n4\n1\nbogus\n", Channel::EDA), NonFiniteSample);
    REQUIRE_THROWS_AS(parse_track("1000\n4\nnan\n", Channel::EDA), NonFiniteSample);
    REQUIRE_THROWS_AS(parse_track("1000\n4\ninf\n", Channel::EDA), NonFiniteSample);
    REQUIRE_THROWS_AS(parse_track("1000\n4\n", Channel::BVP), EmptyTrack);
}

TEST_CASE("expected device rates") {
    REQUIRE(expected_rate(Channel::EDA) == Catch::Approx(4.0));
    REQUIRE(expected_rate(Channel::BVP) == Catch::Approx(64.0));
    REQUIRE(expected_rate(Channel::HR) == Catch::Approx(1.0));
}

TEST_CASE("wav int16 encode then decode recovers samples within quantization") {
    std::vector<double> src(800);
    for (std::size_t i = 0; i < src.size(); ++i)
        src[i] = 0.8 * std::sin(2.0 * 3.14159265358979 * 440.0 * static_cast<double>(i) / 8000.0);
    AudioClip clip = load_wav(encode_wav_int16(8000, src));
    REQUIRE(clip.sample_rate_hz == 8000);
    REQUIRE(clip.samples.size() == src.size());
    for (std::size_t i = 0; i < src.size(); ++i)
        REQUIRE(clip.samples[i] == Catch::Approx(src[i]).margin(1e-4));
    REQUIRE(clip.duration() == Catch::Approx(0.1));
}

TEST_CASE("wav values outside [-1,1] are clamped on encode") {
    AudioClip clip = load_wav(encode_wav_int16(8000, {2.0, -2.0, 0.0}));
    REQUIRE(clip.samples[0] == Catch::Approx(32767.0 / 32768.0));
    REQUIRE(clip.samples[1] == Catch::Approx(-32767.0 / 32768.0));
    REQUIRE(clip.samples[2] == Catch::Approx(0.0));
}

TEST_CASE("wav loader refuses compressed codecs and corrupt containers") {
    std::vector<unsigned char> id3 = {'I', 'D', '3', 4, 0, 0, 0, 0, 0, 0};
    REQUIRE_THROWS_AS(load_wav(id3), UnsupportedEncoding);
    std::vector<unsigned char> ogg = {'O', 'g', 'g', 'S', 0, 0, 0, 0};
    REQUIRE_THROWS_AS(load_wav(ogg), UnsupportedEncoding);

    std::vector<unsigned char> garbage = {'R', 'I', 'F', 'X', 0, 0, 0, 0, 'W', 'A', 'V', 'E'};
    REQUIRE_THROWS_AS(load_wav(garbage), CorruptContainer);
    REQUIRE_THROWS_AS(load_wav(std::vector<unsigned char>(5, 0)), CorruptContainer);

    auto bytes = encode_wav_int16(8000, std::vector<double>(16, 0.25));
    auto truncated = bytes;
    truncated.resize(truncated.size() - 7);  // data chunk now overruns the file
    REQUIRE_THROWS_AS(load_wav(truncated), CorruptContainer);

    auto bad_format = bytes;
    bad_format[20] = 2;  // format tag 2 (ADPCM) in the fmt body
    REQUIRE_THROWS_AS(load_wav(bad_format), UnsupportedEncoding);
}

TEST_CASE("manifest parses, validates, and round trips") {
    Manifest m = parse_manifest(make_manifest_json());
    REQUIRE(m.subject_id == "S01");
    REQUIRE(m.audio_start_time.has_value());
    REQUIRE(*m.audio_start_time == Catch::Approx(1000.0));
    REQUIRE(m.questions.size() == 2);
    REQUIRE(m.questions[0].question_id == 1);
    REQUIRE(m.questions[0].topic == Topic::privacy);
    REQUIRE(m.questions[0].rating_arousal == 7);
    REQUIRE(m.questions[0].rating_valence == 3);
    REQUIRE(m.questions[1].t_end == Catch::Approx(1040.0));
    REQUIRE(m.calibration.picture_valence.size() == 3);
    REQUIRE(m.calibration.picture_arousal.size() == 2);

    Manifest again = parse_manifest(manifest_to_json(m));
    REQUIRE(again.subject_id == m.subject_id);
    REQUIRE(again.questions.size() == m.questions.size());
    REQUIRE(again.questions[1].topic == Topic::money);
    REQUIRE(again.calibration.picture_arousal == m.calibration.picture_arousal);
}

TEST_CASE("manifest validation rejects bad documents") {
    json base = make_manifest_json();

    json j = base;
    j.erase("subject_id");
    REQUIRE_THROWS_AS(parse_manifest(j), RangeViolation);

    j = base;
    j["questions"][0]["q_valence"] = 0;
    REQUIRE_THROWS_AS(parse_manifest(j), RangeViolation);
    j["questions"][0]["q_valence"] = 11;
    REQUIRE_THROWS_AS(parse_manifest(j), RangeViolation);
    j["questions"][0]["q_valence"] = 2.5;
    REQUIRE_THROWS_AS(parse_manifest(j), RangeViolation);

    j = base;
    j["questions"][0]["topic"] = "weather";
    REQUIRE_THROWS_AS(parse_manifest(j), RangeViolation);

    j = base;
    j["questions"][0]["t_end"] = j["questions"][0]["t_start"];
    REQUIRE_THROWS_AS(parse_manifest(j), NonMonotoneTimestamps);

    j = base;  // q2 starts before q1 ends
    j["questions"][1]["t_start"] = 1015.0;
    REQUIRE_THROWS_AS(parse_manifest(j), NonMonotoneTimestamps);

    j = base;
    j["questions"] = json::array();
    REQUIRE_THROWS_AS(parse_manifest(j), RangeViolation);

    j = base;
    j["calibration"]["valence"] = json::array();
    REQUIRE_THROWS_AS(parse_manifest(j), EmptyCalibration);

    j = base;
    j["calibration"]["arousal"][0] = 101.0;
    REQUIRE_THROWS_AS(parse_manifest(j), RangeViolation);
    j["calibration"]["arousal"][0] = -0.5;
    REQUIRE_THROWS_AS(parse_manifest(j), RangeViolation);
}

TEST_CASE("session bundle loads from disk and slices by question window") {
    const fs::path dir = fs::temp_directory_path() / "biovoice_session_io" / "S01";
    fs::create_directories(dir);

    const double t0 = 1000.0;
    write_text_file(dir / "EDA.csv", serialize_track(make_track(Channel::EDA, t0, 4.0, 240)));
    write_text_file(dir / "BVP.csv", serialize_track(make_track(Channel::BVP, t0, 64.0, 3840)));
    write_text_file(dir / "HR.csv", serialize_track(make_track(Channel::HR, t0, 1.0, 60)));
    std::vector<double> voice(480000, 0.0);
    for (std::size_t i = 0; i < voice.size(); ++i)
        voice[i] = 0.1 * std::sin(0.05 * static_cast<double>(i));
    save_wav_int16(dir / "interview.wav", 8000, voice);
    write_json_file(dir / "manifest.json", make_manifest_json());

    std::vector<std::string> warnings;
    InterviewSession s = load_session(dir, &warnings);
    REQUIRE(warnings.empty());
    REQUIRE(s.subject_id == "S01");
    REQUIRE(s.audio.has_value());
    REQUIRE(s.audio_start_time == Catch::Approx(1000.0));
    REQUIRE(s.questions.size() == 2);
    REQUIRE(session_start(s) == Catch::Approx(t0));
    REQUIRE(s.find_question(2) != nullptr);
    REQUIRE(s.find_question(99) == nullptr);

    // 12 s window at 4 / 64 / 1 / 8000 Hz
    SegmentSlices sl = segment(s, 1);
    REQUIRE(sl.eda.size() == 48);
    REQUIRE(sl.bvp.size() == 768);
    REQUIRE(sl.hr.size() == 12);
    REQUIRE(sl.audio.has_value());
    REQUIRE(sl.audio->size() == 96000);
    // slice content matches direct indexing: [1010, 1022) starts at sample 40 of EDA
    REQUIRE(sl.eda.front() == Catch::Approx(s.eda.samples[40]));

    REQUIRE_THROWS_AS(segment(s, 42), WindowOutsideTrack);
    REQUIRE_THROWS_AS(segment_window(s, 990.0, 1005.0), WindowOutsideTrack);
    REQUIRE_THROWS_AS(segment_window(s, 1050.0, 1070.0), WindowOutsideTrack);
    REQUIRE_THROWS_AS(segment_window(s, 1010.0, 1010.5), EmptyWindow);  // < one HR period

    fs::remove_all(dir.parent_path());
}

TEST_CASE("load_session warns on sample-rate deviation and works without audio") {
    const fs::path dir = fs::temp_directory_path() / "biovoice_session_io2" / "S02";
    fs::create_directories(dir);
    const double t0 = 1000.0;
    write_text_file(dir / "EDA.csv", serialize_track(make_track(Channel::EDA, t0, 4.5, 270)));
    write_text_file(dir / "BVP.csv", serialize_track(make_track(Channel::BVP, t0, 64.0, 3840)));
    write_text_file(dir / "HR.csv", serialize_track(make_track(Channel::HR, t0, 1.0, 60)));
    json man = make_manifest_json();
    man["subject_id"] = "S02";
    man.erase("audio_start_time");
    write_json_file(dir / "manifest.json", man);

    std::vector<std::string> warnings;
    InterviewSession s = load_session(dir, &warnings);
    REQUIRE_FALSE(s.audio.has_value());
    REQUIRE(warnings.size() == 1);
    REQUIRE(warnings[0] == "S02/EDA.csv: sample rate 4.5 Hz deviates from expected 4 Hz");

    SegmentSlices sl = segment(s, 1);
    REQUIRE_FALSE(sl.audio.has_value());
    REQUIRE(sl.eda.size() == 54);  // 12 s at 4.5 Hz

    fs::remove_all(dir.parent_path());
}

TEST_CASE("validate_session rejects questions outside track or audio spans") {
    InterviewSession s;
    s.subject_id = "X";
    s.eda = make_track(Channel::EDA, 1000.0, 4.0, 240);
    s.bvp = make_track(Channel::BVP, 1000.0, 64.0, 3840);
    s.hr = make_track(Channel::HR, 1000.0, 1.0, 60);
    QuestionWindow q;
    q.question_id = 1;
    q.t_start = 1010.0;
    q.t_end = 1022.0;
    s.questions.push_back(q);
    REQUIRE_NOTHROW(validate_session(s));

    s.questions[0].t_end = 1065.0;  // past the 60 s tracks
    REQUIRE_THROWS_AS(validate_session(s), WindowOutsideTrack);
    s.questions[0].t_end = 1022.0;

    // audio present but starting after the first question begins
    s.audio = AudioClip{8000, std::vector<double>(480000, 0.0)};
    s.audio_start_time = 1015.0;
    REQUIRE_THROWS_AS(validate_session(s), WindowOutsideTrack);
    s.audio_start_time = 1000.0;
    REQUIRE_NOTHROW(validate_session(s));
}

TEST_CASE("session_start is the latest track start") {
    InterviewSession s;
    s.eda = make_track(Channel::EDA, 1000.0, 4.0, 40);
    s.bvp = make_track(Channel::BVP, 1001.5, 64.0, 640);
    s.hr = make_track(Channel::HR, 1000.5, 1.0, 10);
    REQUIRE(session_start(s) == Catch::Approx(1001.5));
}
