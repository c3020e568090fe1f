#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "biovoice/core/jsonutil.hpp"
#include "biovoice/core/mathutil.hpp"
#include "biovoice/label/labeling.hpp"

namespace biovoice {

struct DimensionStats {
    double raw_mean = 0.0, raw_min = 0.0, raw_max = 0.0, raw_std = 0.0;
    double norm_mean = 0.0, norm_min = 0.0, norm_max = 0.0, norm_std = 0.0;
    std::size_t n = 0;
};

// Tukey box-plot summary of normalized ratings for one question topic:
// whiskers sit on the most extreme values within 1.5 * IQR of the quartiles.
struct TopicStats {
    Topic topic = Topic::usage_habits;
    std::size_t n = 0;
    double q1 = 0.0, median = 0.0, q3 = 0.0;
    double whisker_low = 0.0, whisker_high = 0.0;
};

struct DescriptiveStats {
    DimensionStats valence, arousal;
    std::vector<TopicStats> topics_valence, topics_arousal;
};

namespace detail {

inline DimensionStats dimension_stats(const std::vector<double>& raw,
                                      const std::vector<double>& norm) {
    DimensionStats s;
    s.n = raw.size();
    if (raw.empty()) return s;
    s.raw_mean = mean(raw);
    s.raw_min = min_of(raw);
    s.raw_max = max_of(raw);
    s.raw_std = pop_std(raw);
    s.norm_mean = mean(norm);
    s.norm_min = min_of(norm);
    s.norm_max = max_of(norm);
    s.norm_std = pop_std(norm);
    return s;
}

inline TopicStats topic_stats(Topic t, std::vector<double> values) {
    TopicStats s;
    s.topic = t;
    s.n = values.size();
    std::sort(values.begin(), values.end());
    s.q1 = percentile_sorted(values, 25.0);
    s.median = percentile_sorted(values, 50.0);
    s.q3 = percentile_sorted(values, 75.0);
    const double iqr = s.q3 - s.q1;
    const double lo_fence = s.q1 - 1.5 * iqr, hi_fence = s.q3 + 1.5 * iqr;
    s.whisker_low = values.back();
    s.whisker_high = values.front();
    for (double v : values) {
        if (v >= lo_fence) {
            s.whisker_low = v;
            break;
        }
    }
    for (std::size_t i = values.size(); i-- > 0;) {
        if (values[i] <= hi_fence) {
            s.whisker_high = values[i];
            break;
        }
    }
    return s;
}

}  // namespace detail

// Rating statistics over all rated questions of the kept subjects: raw and
// calibration-normalized mean/min/max/std per dimension, plus per-topic
// quartile summaries of the normalized scores.
inline DescriptiveStats descriptive_stats(const std::vector<SessionFeatures>& kept_sessions) {
    std::vector<double> raw_v, raw_a, norm_v, norm_a;
    std::vector<double> topic_v[kTopicCount], topic_a[kTopicCount];
    for (const auto& s : kept_sessions) {
        const CalibrationOffsets off = calibration_offsets(s.calibration);
        for (const auto& q : s.questions) {
            const NormalizedRating nr =
                normalize(q.question_id, q.rating_valence, q.rating_arousal, off);
            raw_v.push_back(q.rating_valence);
            raw_a.push_back(q.rating_arousal);
            norm_v.push_back(nr.valence_norm);
            norm_a.push_back(nr.arousal_norm);
            topic_v[static_cast<std::size_t>(q.topic)].push_back(nr.valence_norm);
            topic_a[static_cast<std::size_t>(q.topic)].push_back(nr.arousal_norm);
        }
    }
    DescriptiveStats out;
    out.valence = detail::dimension_stats(raw_v, norm_v);
    out.arousal = detail::dimension_stats(raw_a, norm_a);
    for (std::size_t t = 0; t < kTopicCount; ++t) {
        if (!topic_v[t].empty())
            out.topics_valence.push_back(detail::topic_stats(static_cast<Topic>(t), topic_v[t]));
        if (!topic_a[t].empty())
            out.topics_arousal.push_back(detail::topic_stats(static_cast<Topic>(t), topic_a[t]));
    }
    return out;
}

inline json stats_to_json(const DescriptiveStats& st) {
    auto dim = [](const DimensionStats& d) {
        return json{{"n", d.n},
                    {"raw", {{"mean", d.raw_mean},
                             {"min", d.raw_min},
                             {"max", d.raw_max},
                             {"std", d.raw_std}}},
                    {"normalized", {{"mean", d.norm_mean},
                                    {"min", d.norm_min},
                                    {"max", d.norm_max},
                                    {"std", d.norm_std}}}};
    };
    auto topics = [](const std::vector<TopicStats>& ts) {
        json arr = json::array();
        for (const auto& t : ts)
            arr.push_back({{"topic", topic_name(t.topic)},
                           {"n", t.n},
                           {"q1", t.q1},
                           {"median", t.median},
                           {"q3", t.q3},
                           {"whisker_low", t.whisker_low},
                           {"whisker_high", t.whisker_high}});
        return arr;
    };
    json j;
    j["valence"] = dim(st.valence);
    j["valence"]["topics"] = topics(st.topics_valence);
    j["arousal"] = dim(st.arousal);
    j["arousal"]["topics"] = topics(st.topics_arousal);
    return j;
}

}  // namespace biovoice
