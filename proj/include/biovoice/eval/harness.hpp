#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/mathutil.hpp"
#include "biovoice/core/rng.hpp"
#include "biovoice/eval/metrics.hpp"
#include "biovoice/eval/split.hpp"
#include "biovoice/eval/tune.hpp"
#include "biovoice/label/labeling.hpp"
#include "biovoice/ml/classifier.hpp"
#include "biovoice/ml/impute.hpp"
#include "biovoice/ml/scaler.hpp"
#include "biovoice/ml/smote.hpp"

namespace biovoice {

enum class FeatureSet { biofeedback, voice, combined };

inline const char* feature_set_name(FeatureSet f) {
    switch (f) {
        case FeatureSet::biofeedback: return "biofeedback";
        case FeatureSet::voice: return "voice";
        case FeatureSet::combined: return "combined";
    }
    return "?";
}
inline FeatureSet feature_set_from_name(const std::string& s) {
    if (s == "biofeedback") return FeatureSet::biofeedback;
    if (s == "voice") return FeatureSet::voice;
    if (s == "combined") return FeatureSet::combined;
    throw RangeViolation("unknown feature set: " + s);
}

struct PipelineConfig {
    bool balancing = false;   // SMOTE on the training split
    bool scaling = false;     // standardization fitted on the training split
    bool imputation = false;  // k-NN voice imputation fitted on the training split
    ClassifierKind classifier = ClassifierKind::RF;

    std::string label() const {
        std::string s = classifier_name(classifier);
        s += balancing ? " bal=1" : " bal=0";
        s += scaling ? " scale=1" : " scale=0";
        s += imputation ? " imp=1" : " imp=0";
        return s;
    }
};

struct RunRecord {
    std::size_t repetition = 0;  // 0-based
    std::uint64_t split_seed = 0;
    HyperParams chosen;
    double chosen_loo_f1 = 0.0;
    Metrics model;
    Metrics baseline;
    std::size_t n_train = 0;  // original training rows, pre-SMOTE
    std::size_t n_test = 0;
    std::size_t n_synthetic = 0;
    std::uint64_t scaler_fingerprint = 0;   // 0 when scaling disabled
    std::uint64_t imputer_fingerprint = 0;  // 0 when imputation disabled
};

struct ConfigReport {
    PipelineConfig config;
    std::string error;  // nonempty = config aborted, runs incomplete
    std::size_t n_vectors = 0;
    std::size_t n_first = 0, n_second = 0;  // class counts in the config's regime
    std::vector<RunRecord> runs;
    Metrics mean_model;
    Metrics mean_baseline;
};

struct ExperimentPlan {
    FeatureSet feature_set = FeatureSet::combined;
    std::vector<PipelineConfig> configs;
    std::size_t repetitions = 10;
    double split_ratio = 0.7;
    std::uint64_t master_seed = 0;
    unsigned jobs = 1;
};

struct EvalReport {
    FeatureSet feature_set = FeatureSet::combined;
    Dimension dimension = Dimension::valence;
    std::size_t repetitions = 0;
    double split_ratio = 0.7;
    std::uint64_t master_seed = 0;
    std::uint64_t dataset_fingerprint = 0;
    std::size_t total_vectors = 0;
    std::size_t voice_complete = 0;
    std::vector<ConfigReport> configs;
};

namespace detail {

inline Metrics mean_metrics(const std::vector<RunRecord>& runs, bool baseline) {
    Metrics m;
    if (runs.empty()) return m;
    for (const auto& r : runs) {
        const Metrics& s = baseline ? r.baseline : r.model;
        m.precision += s.precision;
        m.recall += s.recall;
        m.f1 += s.f1;
        m.accuracy += s.accuracy;
    }
    const double inv = 1.0 / static_cast<double>(runs.size());
    m.precision *= inv;
    m.recall *= inv;
    m.f1 *= inv;
    m.accuracy *= inv;
    return m;
}

}  // namespace detail

// Content identity of a gold standard: feature bytes, missing masks, labels.
inline std::uint64_t gold_fingerprint(const GoldStandard& g) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t i = 0; i < g.vectors.size(); ++i) {
        h = fnv1a64(g.vectors[i].bio, h);
        h = fnv1a64(g.vectors[i].voice, h);
        const char miss = g.vectors[i].voice_missing ? 1 : 0;
        h = fnv1a64(&miss, 1, h);
        const char lab = static_cast<char>(g.labels[i]);
        h = fnv1a64(&lab, 1, h);
    }
    return h;
}

// One classifier configuration evaluated over all repetitions of the plan's
// split protocol. Per repetition: stratified split, impute (train-fitted),
// SMOTE (train only), scale (train-fitted), LOO-tune, train, test.
inline ConfigReport run_config(const ExperimentPlan& plan, const PipelineConfig& cfg,
                               const GoldStandard& gold, std::size_t voice_dim) {
    ConfigReport rep;
    rep.config = cfg;

    // Assemble the config's dataset regime. Without imputation, voice-bearing
    // feature sets restrict to rows with complete voice features.
    const bool needs_voice = plan.feature_set != FeatureSet::biofeedback;
    Matrix X;
    std::vector<int> y;
    std::vector<char> missing;
    for (std::size_t i = 0; i < gold.vectors.size(); ++i) {
        const FeatureVector& fv = gold.vectors[i];
        if (needs_voice && !cfg.imputation && fv.voice_missing) continue;
        std::vector<double> row = fv.bio;
        if (needs_voice) {
            if (fv.voice_missing)
                row.insert(row.end(), voice_dim, std::nan(""));
            else
                row.insert(row.end(), fv.voice.begin(), fv.voice.end());
        }
        X.push_back(std::move(row));
        y.push_back(gold.labels[i]);
        missing.push_back(fv.voice_missing ? 1 : 0);
    }
    rep.n_vectors = X.size();
    for (int v : y) ++(v == 0 ? rep.n_first : rep.n_second);

    // Column range used for learning after imputation.
    const std::size_t col_lo = plan.feature_set == FeatureSet::voice ? kBioFeatureDim : 0;
    const std::size_t col_hi =
        plan.feature_set == FeatureSet::biofeedback ? kBioFeatureDim : kBioFeatureDim + voice_dim;
    auto project = [&](const std::vector<double>& row) {
        return std::vector<double>(row.begin() + static_cast<std::ptrdiff_t>(col_lo),
                                   row.begin() + static_cast<std::ptrdiff_t>(col_hi));
    };

    try {
        for (std::size_t r = 0; r < plan.repetitions; ++r) {
            RunRecord run;
            run.repetition = r;
            run.split_seed = mix_seed(plan.master_seed, r);
            SplitIndices split = stratified_split(y, plan.split_ratio, run.split_seed);
            run.n_train = split.train.size();
            run.n_test = split.test.size();

            Matrix train_X, test_X;
            std::vector<int> train_y, test_y;
            std::vector<char> train_missing, origin;  // origin: 0 original, 1 synthetic
            for (std::size_t i : split.train) {
                train_X.push_back(X[i]);
                train_y.push_back(y[i]);
                train_missing.push_back(missing[i]);
                origin.push_back(0);
            }
            for (std::size_t i : split.test) {
                test_X.push_back(X[i]);
                test_y.push_back(y[i]);
            }
            run.baseline = majority_baseline(train_y, test_y);

            if (cfg.imputation && needs_voice) {
                KnnImputer imp = KnnImputer::fit(train_X, train_missing, kBioFeatureDim, 5);
                run.imputer_fingerprint = imp.fingerprint();
                for (std::size_t i = 0; i < train_X.size(); ++i)
                    if (train_missing[i]) train_X[i] = imp.impute_row(train_X[i]);
                for (std::size_t i = 0; i < test_X.size(); ++i)
                    if (!all_finite(test_X[i])) test_X[i] = imp.impute_row(test_X[i]);
                if (imp.fingerprint() != run.imputer_fingerprint)
                    throw RangeViolation("imputer changed between train and test application");
            }
            if (col_lo != 0 || col_hi != X[0].size()) {
                for (auto& row : train_X) row = project(row);
                for (auto& row : test_X) row = project(row);
            }

            if (cfg.balancing) {
                Rng srng(mix_seed(run.split_seed, 0x534d4f54ULL));
                SmoteResult sm = smote(train_X, train_y, 5, srng);
                train_X = std::move(sm.X);
                train_y = std::move(sm.y);
                origin.assign(sm.synthetic.begin(), sm.synthetic.end());
                for (const char o : sm.synthetic)
                    if (o) ++run.n_synthetic;
            }
            // Origin audit: the test matrix was frozen from dataset rows before
            // balancing; train-side synthetic tags must account for every
            // appended row and never reach the test side.
            if (origin.size() != train_X.size() ||
                run.n_synthetic != train_X.size() - run.n_train)
                throw RangeViolation("origin audit: synthetic row bookkeeping is inconsistent");

            if (cfg.scaling) {
                ScalerModel sc = fit_scaler(train_X);
                run.scaler_fingerprint = sc.fingerprint();
                train_X = apply_scaler(sc, train_X);
                test_X = apply_scaler(sc, test_X);
                if (sc.fingerprint() != run.scaler_fingerprint)
                    throw RangeViolation("scaler changed between train and test application");
            }

            TuneResult tuned = loo_tune(cfg.classifier, default_grid(cfg.classifier), train_X,
                                        train_y, run.split_seed, plan.jobs);
            run.chosen = tuned.best;
            run.chosen_loo_f1 = tuned.macro_f1[tuned.best_index];

            TrainedModel model =
                train_classifier(cfg.classifier, tuned.best, train_X, train_y, run.split_seed);
            run.model = macro_metrics(model.predict(test_X), test_y);
            rep.runs.push_back(run);
        }
        rep.mean_model = detail::mean_metrics(rep.runs, false);
        rep.mean_baseline = detail::mean_metrics(rep.runs, true);
    } catch (const std::exception& e) {
        rep.error = e.what();
    }
    return rep;
}

inline EvalReport run_experiment(const ExperimentPlan& plan, const GoldStandard& gold,
                                 std::size_t voice_dim) {
    EvalReport report;
    report.feature_set = plan.feature_set;
    report.dimension = gold.dimension;
    report.repetitions = plan.repetitions;
    report.split_ratio = plan.split_ratio;
    report.master_seed = plan.master_seed;
    report.dataset_fingerprint = gold_fingerprint(gold);
    report.total_vectors = gold.vectors.size();
    for (const auto& fv : gold.vectors)
        if (!fv.voice_missing) ++report.voice_complete;
    for (const auto& cfg : plan.configs)
        report.configs.push_back(run_config(plan, cfg, gold, voice_dim));
    return report;
}

}  // namespace biovoice
