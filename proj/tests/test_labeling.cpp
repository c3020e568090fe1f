#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "biovoice/core/rng.hpp"
#include "biovoice/label/labeling.hpp"
#include "biovoice/ml/kmeans.hpp"

using namespace biovoice;

namespace {

// Exhaustive optimal 3-interval partition SSE over sorted points.
double best_three_interval_sse(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        s1[i + 1] = s1[i] + v[i];
        s2[i + 1] = s2[i] + v[i] * v[i];
    }
    auto seg = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
        const double cnt = static_cast<double>(hi - lo);
        const double sum = s1[hi] - s1[lo];
        return (s2[hi] - s2[lo]) - sum * sum / cnt;
    };
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            best = std::min(best, seg(0, i) + seg(i, j) + seg(j, n));
    return best;
}

std::vector<double> three_lump_points() {
    Rng rng(314);
    std::vector<double> pts;
    for (int c = 0; c < 3; ++c) {
        const double center = -3.0 + 3.0 * c;
        for (int i = 0; i < 16; ++i) pts.push_back(rng.normal(center, 0.3));
    }
    return pts;
}

// A session whose per-question ratings are given directly; calibration at the
// scale midpoint so the offset is exactly 5.5.
SessionFeatures session_with_ratings(const std::string& id,
                                     const std::vector<std::pair<int, int>>& ratings) {
    SessionFeatures s;
    s.subject_id = id;
    s.voice_dim = 160;
    s.calibration.picture_valence = {50.0};
    s.calibration.picture_arousal = {50.0};
    int qid = 1;
    for (auto [v, a] : ratings) {
        FeatureVector fv;
        fv.subject_id = id;
        fv.question_id = qid++;
        fv.rating_valence = v;
        fv.rating_arousal = a;
        fv.bio.assign(kBioFeatureDim, 0.5);
        s.questions.push_back(fv);
    }
    return s;
}

}  // namespace

TEST_CASE("calibration offsets map the picture scale onto the rating scale") {
    CalibrationRecord rec;
    rec.picture_valence = {10.0, 50.0, 90.0};
    rec.picture_arousal = {20.0, 60.0};
    CalibrationOffsets off = calibration_offsets(rec);
    REQUIRE(off.valence == Catch::Approx(5.5));
    REQUIRE(off.arousal == Catch::Approx(4.6));

    NormalizedRating nr = normalize(7, 7, 3, off);
    REQUIRE(nr.question_id == 7);
    REQUIRE(nr.valence_norm == Catch::Approx(1.5));
    REQUIRE(nr.arousal_norm == Catch::Approx(-1.6));

    CalibrationRecord empty;
    empty.picture_arousal = {50.0};
    REQUIRE_THROWS_AS(calibration_offsets(empty), EmptyCalibration);
}

TEST_CASE("1-D 3-means with restarts attains the optimal interval partition") {
    auto pts = three_lump_points();
    KmeansResult km = kmeans_1d(pts, 3, 17);
    REQUIRE(km.centers.size() == 3);
    REQUIRE(km.centers[0] < km.centers[1]);
    REQUIRE(km.centers[1] < km.centers[2]);
    REQUIRE(km.assignments.size() == pts.size());

    const double oracle = best_three_interval_sse(pts);
    REQUIRE(std::abs(km.inertia - oracle) <= 1e-9);

    // the returned assignment is the nearest sorted center, ties downward
    for (std::size_t i = 0; i < pts.size(); ++i) {
        int best = 0;
        double bd = std::abs(pts[i] - km.centers[0]);
        for (int c = 1; c < 3; ++c) {
            double d = std::abs(pts[i] - km.centers[c]);
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        REQUIRE(km.assignments[i] == best);
    }

    // deterministic in the seed
    KmeansResult again = kmeans_1d(pts, 3, 17);
    REQUIRE(again.centers == km.centers);
    REQUIRE(again.assignments == km.assignments);
}

TEST_CASE("kmeans needs k distinct values") {
    REQUIRE_THROWS_AS(kmeans_1d({1.0, 1.0, 2.0, 2.0}, 3, 0), DegenerateInput);
    REQUIRE_NOTHROW(kmeans_1d({1.0, 2.0, 3.0}, 3, 0));
}

TEST_CASE("discretize produces ordered non-overlapping member ranges") {
    auto pts = three_lump_points();
    LabelMap m = discretize(pts, Dimension::valence, 17);
    REQUIRE(m.dimension == Dimension::valence);
    REQUIRE(m.seed == 17);
    REQUIRE(m.inertia == Catch::Approx(kmeans_1d(pts, 3, 17).inertia));
    for (int c = 0; c < 3; ++c) REQUIRE(m.member_min[c] <= m.member_max[c]);
    REQUIRE(m.member_max[0] < m.member_min[1]);
    REQUIRE(m.member_max[1] < m.member_min[2]);

    // classify reproduces the nearest-center training assignment for every point
    for (double v : pts) {
        int best = 0;
        double bd = std::abs(v - m.centers[0]);
        for (int c = 1; c < 3; ++c) {
            double d = std::abs(v - m.centers[c]);
            if (d < bd) {
                bd = d;
                best = c;
            }
        }
        REQUIRE(m.classify(v) == best);
    }
    // monotone on unseen values
    REQUIRE(m.classify(-100.0) == 0);
    REQUIRE(m.classify(100.0) == 2);

    REQUIRE_THROWS_AS(discretize({1.0, 1.0, 2.0}, Dimension::valence, 0), DegenerateInput);
}

TEST_CASE("label map serializes and parses losslessly") {
    LabelMap m = discretize(three_lump_points(), Dimension::arousal, 23);
    json j = m.to_json();
    REQUIRE(j["dimension"] == "arousal");
    REQUIRE(j["class_names"] == json::array({"low", "neutral", "high"}));
    REQUIRE(j["intervals"].size() == 3);

    LabelMap back = LabelMap::from_json(j);
    REQUIRE(back.dimension == m.dimension);
    REQUIRE(back.seed == m.seed);
    REQUIRE(back.inertia == m.inertia);
    for (int c = 0; c < 3; ++c) {
        REQUIRE(back.centers[c] == m.centers[c]);
        REQUIRE(back.member_min[c] == m.member_min[c]);
        REQUIRE(back.member_max[c] == m.member_max[c]);
    }

    json bad = j;
    bad["centers"] = {1.0, 2.0};
    REQUIRE_THROWS_AS(LabelMap::from_json(bad), CorruptContainer);
}

TEST_CASE("interval strings use half-open bins and a closed top") {
    LabelMap m;
    m.member_min = {-4.0, -1.0, 2.0};
    m.member_max = {-2.0, 1.0, 4.0};
    REQUIRE(m.interval_string(0) == "[-4,-1)");
    REQUIRE(m.interval_string(1) == "[-1,2)");
    REQUIRE(m.interval_string(2) == "[2,4]");
}

TEST_CASE("quality filter drops flat or empty subjects, valence checked first") {
    std::vector<SessionFeatures> sessions;
    sessions.push_back(session_with_ratings("A", {{1, 5}, {10, 6}, {1, 5}, {10, 6}}));
    sessions.push_back(session_with_ratings("B", {{5, 1}, {5, 10}, {5, 1}, {5, 10}}));
    sessions.push_back(session_with_ratings("C", {{1, 1}, {10, 10}, {1, 1}, {10, 10}}));
    sessions.push_back(session_with_ratings("D", {}));

    QualityDecision q = quality_filter(sessions, {{"S99", "incomplete_data"}});
    REQUIRE(q.kept == std::vector<std::string>{"C"});
    REQUIRE(q.excluded.size() == 4);
    REQUIRE(q.excluded[0].subject_id == "S99");
    REQUIRE(q.excluded[0].reason == "incomplete_data");
    REQUIRE(q.excluded[1].subject_id == "A");
    REQUIRE(q.excluded[1].reason == "low_variance_arousal");
    REQUIRE(q.excluded[2].subject_id == "B");
    REQUIRE(q.excluded[2].reason == "low_variance_valence");
    REQUIRE(q.excluded[3].subject_id == "D");
    REQUIRE(q.excluded[3].reason == "incomplete_data");
}

TEST_CASE("gold standard pools kept subjects, drops neutrals, maps poles to binary") {
    // ratings chosen so normalized scores form lumps at -4.5/-3.5, -0.5/+0.5, +3.5/+4.5
    std::vector<std::pair<int, int>> plan = {{1, 10}, {2, 9}, {5, 6}, {6, 5}, {9, 2}, {10, 1}};
    std::vector<SessionFeatures> sessions = {session_with_ratings("S01", plan),
                                             session_with_ratings("S02", plan),
                                             session_with_ratings("S03", plan)};
    LabelingResult r = build_gold_standard(sessions, 99);

    REQUIRE(r.quality.kept.size() == 3);
    REQUIRE(r.voice_dim == 160);

    for (Dimension d : {Dimension::valence, Dimension::arousal}) {
        const GoldStandard& g = r.gold(d);
        REQUIRE(g.dimension == d);
        REQUIRE(g.total_rated == 18);
        REQUIRE(g.dropped_neutral == 6);  // two midscale questions per subject
        REQUIRE(g.vectors.size() == 12);
        REQUIRE(g.labels.size() == 12);
        REQUIRE(g.normalized.size() == 12);
        auto counts = g.class_counts();
        REQUIRE(counts[0] == 6);
        REQUIRE(counts[1] == 6);
        // class 0 is the positive/high pole (upper cluster)
        for (std::size_t i = 0; i < g.labels.size(); ++i) {
            const int cls3 = g.map.classify(g.normalized[i]);
            REQUIRE(cls3 != 1);
            REQUIRE(g.labels[i] == (cls3 == 2 ? 0 : 1));
        }
    }

    // valence ratings descend through the plan while arousal ascends:
    // question 1 is positive valence (class 0) and low arousal (class 1)
    REQUIRE(r.valence.vectors[0].question_id == 1);
    REQUIRE(r.valence.labels[0] == 1);  // rating 1 -> negative pole
    REQUIRE(r.arousal.labels[0] == 0);  // rating 10 -> high pole

    // deterministic end to end
    LabelingResult r2 = build_gold_standard(sessions, 99);
    REQUIRE(r2.valence.labels == r.valence.labels);
    REQUIRE(r2.arousal.labels == r.arousal.labels);
    REQUIRE(r2.valence.map.centers == r.valence.map.centers);

    // excluded subjects contribute nothing to the pool
    std::vector<SessionFeatures> with_flat = sessions;
    with_flat.push_back(session_with_ratings("S04", {{5, 5}, {5, 5}, {5, 5}, {5, 5}}));
    LabelingResult r3 = build_gold_standard(with_flat, 99);
    REQUIRE(r3.quality.excluded.size() == 1);
    REQUIRE(r3.valence.total_rated == 18);
    REQUIRE(r3.valence.labels == r.valence.labels);
}
