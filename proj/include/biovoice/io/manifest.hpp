#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/jsonutil.hpp"

namespace biovoice {

// The seven interview topics.
enum class Topic {
    usage_habits,
    privacy,
    procedures,
    relationships,
    information,
    money,
    ethics
};

inline constexpr std::size_t kTopicCount = 7;

inline const char* topic_name(Topic t) {
    switch (t) {
        case Topic::usage_habits: return "usage_habits";
        case Topic::privacy: return "privacy";
        case Topic::procedures: return "procedures";
        case Topic::relationships: return "relationships";
        case Topic::information: return "information";
        case Topic::money: return "money";
        default: return "ethics";
    }
}

inline Topic topic_from_name(const std::string& s) {
    static const Topic all[] = {Topic::usage_habits, Topic::privacy,   Topic::procedures,
                                Topic::relationships, Topic::information, Topic::money,
                                Topic::ethics};
    for (Topic t : all)
        if (s == topic_name(t)) return t;
    throw RangeViolation("unknown topic: " + s);
}

// One interview question with its window and self-assessment ratings (1-10).
struct QuestionWindow {
    int question_id = 0;
    Topic topic = Topic::usage_habits;
    double t_start = 0.0;  // UTC seconds
    double t_end = 0.0;
    int rating_arousal = 0;
    int rating_valence = 0;
};

// Picture-viewing calibration self-reports on a 0-100 visual scale.
struct CalibrationRecord {
    std::vector<double> picture_valence;
    std::vector<double> picture_arousal;
};

struct Manifest {
    std::string subject_id;
    std::optional<double> audio_start_time;
    std::vector<QuestionWindow> questions;
    CalibrationRecord calibration;
};

namespace detail {

inline int require_rating(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw RangeViolation(std::string("missing or non-numeric rating: ") + key);
    double v = j[key].get<double>();
    if (v != std::floor(v) || v < 1.0 || v > 10.0)
        throw RangeViolation(std::string(key) + " = " + fmt_g9(v) + " outside integer range [1,10]");
    return static_cast<int>(v);
}

inline std::vector<double> require_calibration_list(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_array())
        throw RangeViolation(std::string("calibration.") + key + " missing or not an array");
    std::vector<double> out;
    for (const auto& el : j[key]) {
        if (!el.is_number()) throw RangeViolation(std::string("calibration.") + key + ": non-numeric entry");
        double v = el.get<double>();
        if (!(v >= 0.0 && v <= 100.0))
            throw RangeViolation(std::string("calibration.") + key + " value " + fmt_g9(v) +
                                 " outside [0,100]");
        out.push_back(v);
    }
    if (out.empty()) throw EmptyCalibration(std::string("calibration.") + key + " is empty");
    return out;
}

}  // namespace detail

// Parse and validate a session manifest document.
inline Manifest parse_manifest(const json& j) {
    Manifest m;
    if (!j.contains("subject_id") || !j["subject_id"].is_string())
        throw RangeViolation("manifest missing subject_id");
    m.subject_id = j["subject_id"].get<std::string>();
    if (j.contains("audio_start_time")) {
        if (!j["audio_start_time"].is_number())
            throw RangeViolation("audio_start_time must be a number");
        m.audio_start_time = j["audio_start_time"].get<double>();
    }
    if (!j.contains("questions") || !j["questions"].is_array() || j["questions"].empty())
        throw RangeViolation("manifest needs a nonempty questions array");
    for (const auto& q : j["questions"]) {
        QuestionWindow w;
        if (!q.contains("id") || !q["id"].is_number_integer() || q["id"].get<int>() < 1)
            throw RangeViolation("question id must be an integer >= 1");
        w.question_id = q["id"].get<int>();
        if (!q.contains("topic") || !q["topic"].is_string())
            throw RangeViolation("question topic missing");
        w.topic = topic_from_name(q["topic"].get<std::string>());
        if (!q.contains("t_start") || !q.contains("t_end") || !q["t_start"].is_number() ||
            !q["t_end"].is_number())
            throw RangeViolation("question t_start/t_end missing");
        w.t_start = q["t_start"].get<double>();
        w.t_end = q["t_end"].get<double>();
        if (!(w.t_start < w.t_end))
            throw NonMonotoneTimestamps("question " + std::to_string(w.question_id) +
                                        ": t_start must precede t_end");
        w.rating_arousal = detail::require_rating(q, "q_arousal");
        w.rating_valence = detail::require_rating(q, "q_valence");
        m.questions.push_back(w);
    }
    for (std::size_t i = 1; i < m.questions.size(); ++i) {
        if (m.questions[i].t_start < m.questions[i - 1].t_end)
            throw NonMonotoneTimestamps(
                "question " + std::to_string(m.questions[i].question_id) +
                " starts before the previous question ends");
    }
    if (!j.contains("calibration") || !j["calibration"].is_object())
        throw RangeViolation("manifest missing calibration object");
    m.calibration.picture_valence = detail::require_calibration_list(j["calibration"], "valence");
    m.calibration.picture_arousal = detail::require_calibration_list(j["calibration"], "arousal");
    return m;
}

inline Manifest load_manifest(const std::filesystem::path& path) {
    return parse_manifest(read_json_file(path));
}

inline json manifest_to_json(const Manifest& m) {
    json j;
    j["subject_id"] = m.subject_id;
    if (m.audio_start_time) j["audio_start_time"] = *m.audio_start_time;
    j["questions"] = json::array();
    for (const auto& q : m.questions) {
        json e;
        e["id"] = q.question_id;
        e["topic"] = topic_name(q.topic);
        e["t_start"] = q.t_start;
        e["t_end"] = q.t_end;
        e["q_arousal"] = q.rating_arousal;
        e["q_valence"] = q.rating_valence;
        j["questions"].push_back(e);
    }
    j["calibration"]["valence"] = m.calibration.picture_valence;
    j["calibration"]["arousal"] = m.calibration.picture_arousal;
    return j;
}

}  // namespace biovoice
