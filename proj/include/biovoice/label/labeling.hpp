#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/jsonutil.hpp"
#include "biovoice/core/mathutil.hpp"
#include "biovoice/core/rng.hpp"
#include "biovoice/features/extract.hpp"
#include "biovoice/ml/kmeans.hpp"

namespace biovoice {

enum class Dimension { valence = 0, arousal = 1 };

inline const char* dimension_name(Dimension d) {
    return d == Dimension::valence ? "valence" : "arousal";
}
inline Dimension dimension_from_name(const std::string& s) {
    if (s == "valence") return Dimension::valence;
    if (s == "arousal") return Dimension::arousal;
    throw RangeViolation("unknown dimension: " + s);
}

// Three-class names in ascending cluster order.
inline std::array<const char*, 3> three_class_names(Dimension d) {
    if (d == Dimension::valence) return {"negative", "neutral", "positive"};
    return {"low", "neutral", "high"};
}
// Binary class names; index 0 is the first-listed (positive/high) class.
inline std::array<const char*, 2> binary_class_names(Dimension d) {
    if (d == Dimension::valence) return {"positive", "negative"};
    return {"high", "low"};
}

struct CalibrationOffsets {
    double valence = 0.0;
    double arousal = 0.0;
};

// Map the mean of 0-100 picture ratings onto the 1-10 interview scale:
// c = 1 + 9 * mean / 100 (endpoint-preserving affine map).
inline CalibrationOffsets calibration_offsets(const CalibrationRecord& rec) {
    if (rec.picture_valence.empty() || rec.picture_arousal.empty())
        throw EmptyCalibration("calibration_offsets: empty calibration rating list");
    CalibrationOffsets off;
    off.valence = 1.0 + 9.0 * mean(rec.picture_valence) / 100.0;
    off.arousal = 1.0 + 9.0 * mean(rec.picture_arousal) / 100.0;
    return off;
}

struct NormalizedRating {
    int question_id = 0;
    double valence_norm = 0.0;
    double arousal_norm = 0.0;
};

inline NormalizedRating normalize(int question_id, int q_valence, int q_arousal,
                                  const CalibrationOffsets& off) {
    NormalizedRating r;
    r.question_id = question_id;
    r.valence_norm = static_cast<double>(q_valence) - off.valence;
    r.arousal_norm = static_cast<double>(q_arousal) - off.arousal;
    return r;
}

// Three ordered clusters over one dimension's pooled normalized scores.
// classify() uses half-open boundaries at the upper clusters' member minima,
// which reproduces the training assignment exactly and stays monotone for
// unseen values. Display style: [m0, m1) name0, [m1, m2) name1, [m2, max] name2.
struct LabelMap {
    Dimension dimension = Dimension::valence;
    std::uint64_t seed = 0;
    double inertia = 0.0;
    std::array<double, 3> centers{};     // ascending
    std::array<double, 3> member_min{};  // per cluster
    std::array<double, 3> member_max{};

    int classify(double v) const {
        if (v < member_min[1]) return 0;
        if (v < member_min[2]) return 1;
        return 2;
    }

    std::string interval_string(int cls) const {
        std::string lo = fmt_g9(member_min[static_cast<std::size_t>(cls)]);
        if (cls < 2) return "[" + lo + "," + fmt_g9(member_min[static_cast<std::size_t>(cls) + 1]) + ")";
        return "[" + lo + "," + fmt_g9(member_max[2]) + "]";
    }

    json to_json() const {
        json j;
        j["dimension"] = dimension_name(dimension);
        j["seed"] = seed;
        j["inertia"] = inertia;
        j["centers"] = std::vector<double>(centers.begin(), centers.end());
        json ranges = json::array();
        json intervals = json::array();
        auto names = three_class_names(dimension);
        json cls = json::array();
        for (int c = 0; c < 3; ++c) {
            ranges.push_back({member_min[c], member_max[c]});
            intervals.push_back(interval_string(c));
            cls.push_back(names[static_cast<std::size_t>(c)]);
        }
        j["ranges"] = ranges;
        j["intervals"] = intervals;
        j["class_names"] = cls;
        return j;
    }

    static LabelMap from_json(const json& j) {
        LabelMap m;
        m.dimension = dimension_from_name(j.at("dimension").get<std::string>());
        m.seed = j.at("seed").get<std::uint64_t>();
        m.inertia = j.at("inertia").get<double>();
        auto c = j.at("centers").get<std::vector<double>>();
        if (c.size() != 3 || j.at("ranges").size() != 3)
            throw CorruptContainer("label map: expected 3 clusters");
        for (int i = 0; i < 3; ++i) {
            m.centers[i] = c[static_cast<std::size_t>(i)];
            m.member_min[i] = j.at("ranges")[static_cast<std::size_t>(i)][0].get<double>();
            m.member_max[i] = j.at("ranges")[static_cast<std::size_t>(i)][1].get<double>();
        }
        return m;
    }
};

// Pooled 1-D 3-means with deterministic restarts; assignments re-derived as
// nearest sorted center with ties to the lower class, then summarized as
// member ranges.
inline LabelMap discretize(const std::vector<double>& values, Dimension dim, std::uint64_t seed,
                           std::size_t restarts = 50) {
    KmeansResult km = kmeans_1d(values, 3, seed, restarts);
    LabelMap m;
    m.dimension = dim;
    m.seed = seed;
    m.inertia = km.inertia;
    for (int c = 0; c < 3; ++c) m.centers[c] = km.centers[static_cast<std::size_t>(c)];

    bool first[3] = {true, true, true};
    for (double v : values) {
        int best = 0;
        double bd = std::abs(v - m.centers[0]);
        for (int c = 1; c < 3; ++c) {
            double d = std::abs(v - m.centers[c]);
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        if (first[best]) {
            m.member_min[best] = m.member_max[best] = v;
            first[best] = false;
        } else {
            m.member_min[best] = std::min(m.member_min[best], v);
            m.member_max[best] = std::max(m.member_max[best], v);
        }
    }
    if (first[0] || first[1] || first[2])
        throw DegenerateInput("discretize: a cluster has no members");
    return m;
}

struct SubjectExclusion {
    std::string subject_id;
    std::string reason;  // low_variance_valence | low_variance_arousal | incomplete_data
};

struct QualityDecision {
    std::vector<std::string> kept;  // subject ids, input order
    std::vector<SubjectExclusion> excluded;
};

// Drop subjects whose raw rating population std is < 1.0 (strictly) in either
// dimension; valence is checked first. Pre-recorded exclusions (sessions that
// failed to load) go in as incomplete_data.
inline QualityDecision quality_filter(const std::vector<SessionFeatures>& sessions,
                                      const std::vector<SubjectExclusion>& pre_excluded = {}) {
    QualityDecision q;
    q.excluded = pre_excluded;
    for (const auto& s : sessions) {
        std::vector<double> v, a;
        for (const auto& fv : s.questions) {
            v.push_back(static_cast<double>(fv.rating_valence));
            a.push_back(static_cast<double>(fv.rating_arousal));
        }
        if (v.empty()) {
            q.excluded.push_back({s.subject_id, "incomplete_data"});
        } else if (pop_std(v) < 1.0) {
            q.excluded.push_back({s.subject_id, "low_variance_valence"});
        } else if (pop_std(a) < 1.0) {
            q.excluded.push_back({s.subject_id, "low_variance_arousal"});
        } else {
            q.kept.push_back(s.subject_id);
        }
    }
    return q;
}

// One dimension's binary dataset: neutral items dropped, class 0 = the
// positive/high pole, class 1 = the negative/low pole.
struct GoldStandard {
    Dimension dimension = Dimension::valence;
    LabelMap map;
    std::vector<FeatureVector> vectors;
    std::vector<int> labels;
    std::vector<double> normalized;
    std::size_t dropped_neutral = 0;
    std::size_t total_rated = 0;

    std::array<std::size_t, 2> class_counts() const {
        std::array<std::size_t, 2> c{0, 0};
        for (int l : labels) ++c[static_cast<std::size_t>(l)];
        return c;
    }
};

struct LabelingResult {
    QualityDecision quality;
    GoldStandard valence;
    GoldStandard arousal;
    std::size_t voice_dim = 0;

    const GoldStandard& gold(Dimension d) const {
        return d == Dimension::valence ? valence : arousal;
    }
};

// Full labeling pass: quality filter, per-subject calibration normalization,
// pooled discretization of kept subjects, neutral drop, binary relabeling.
inline LabelingResult build_gold_standard(const std::vector<SessionFeatures>& sessions,
                                          std::uint64_t seed,
                                          const std::vector<SubjectExclusion>& pre_excluded = {}) {
    LabelingResult out;
    out.quality = quality_filter(sessions, pre_excluded);

    std::vector<const SessionFeatures*> kept;
    for (const auto& s : sessions) {
        bool k = false;
        for (const auto& id : out.quality.kept)
            if (id == s.subject_id) {
                k = true;
                break;
            }
        if (k) kept.push_back(&s);
    }
    if (!kept.empty()) out.voice_dim = kept.front()->voice_dim;

    std::vector<double> pool_v, pool_a;
    std::vector<CalibrationOffsets> offsets(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        offsets[i] = calibration_offsets(kept[i]->calibration);
        for (const auto& fv : kept[i]->questions) {
            NormalizedRating nr =
                normalize(fv.question_id, fv.rating_valence, fv.rating_arousal, offsets[i]);
            pool_v.push_back(nr.valence_norm);
            pool_a.push_back(nr.arousal_norm);
        }
    }

    out.valence.dimension = Dimension::valence;
    out.arousal.dimension = Dimension::arousal;
    out.valence.map = discretize(pool_v, Dimension::valence, mix_seed(seed, 1));
    out.arousal.map = discretize(pool_a, Dimension::arousal, mix_seed(seed, 2));

    for (std::size_t i = 0; i < kept.size(); ++i) {
        for (const auto& fv : kept[i]->questions) {
            NormalizedRating nr =
                normalize(fv.question_id, fv.rating_valence, fv.rating_arousal, offsets[i]);
            for (GoldStandard* g : {&out.valence, &out.arousal}) {
                const double score =
                    g->dimension == Dimension::valence ? nr.valence_norm : nr.arousal_norm;
                ++g->total_rated;
                const int cls = g->map.classify(score);
                if (cls == 1) {
                    ++g->dropped_neutral;
                    continue;
                }
                g->vectors.push_back(fv);
                g->labels.push_back(cls == 2 ? 0 : 1);
                g->normalized.push_back(score);
            }
        }
    }
    return out;
}

}  // namespace biovoice
