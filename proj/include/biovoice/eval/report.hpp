#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/jsonutil.hpp"
#include "biovoice/eval/harness.hpp"

namespace biovoice {

namespace detail {

inline std::string fmt_fixed4(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

// Percentage improvement (model - baseline) / baseline; degenerate baselines
// report 0 rather than infinity.
inline double improvement_pct(double model, double baseline) {
    if (baseline <= 0.0) return 0.0;
    return 100.0 * (model - baseline) / baseline;
}

inline json metrics_json(const Metrics& m) {
    return json{{"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"accuracy", m.accuracy}};
}

inline std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

inline std::uint64_t parse_hex64(const std::string& s) {
    std::uint64_t v = 0;
    for (char c : s) {
        int d;
        if (c >= '0' && c <= '9')
            d = c - '0';
        else if (c >= 'a' && c <= 'f')
            d = c - 'a' + 10;
        else if (c >= 'A' && c <= 'F')
            d = c - 'A' + 10;
        else
            throw CorruptContainer("bad fingerprint: " + s);
        v = (v << 4) | static_cast<std::uint64_t>(d);
    }
    return v;
}

inline Metrics metrics_from_json(const json& j) {
    Metrics m;
    m.precision = j.at("precision").get<double>();
    m.recall = j.at("recall").get<double>();
    m.f1 = j.at("f1").get<double>();
    m.accuracy = j.at("accuracy").get<double>();
    return m;
}

}  // namespace detail

// Index of the error-free configuration with the highest mean macro-F1
// (first wins ties); -1 when every configuration failed.
inline int best_config_index(const EvalReport& r) {
    int best = -1;
    for (std::size_t i = 0; i < r.configs.size(); ++i) {
        if (!r.configs[i].error.empty()) continue;
        if (best < 0 || r.configs[i].mean_model.f1 >
                            r.configs[static_cast<std::size_t>(best)].mean_model.f1)
            best = static_cast<int>(i);
    }
    return best;
}

inline json eval_report_to_json(const EvalReport& r) {
    if (r.configs.empty()) throw RangeViolation("eval report: no configurations");
    json j;
    j["feature_set"] = feature_set_name(r.feature_set);
    j["dimension"] = dimension_name(r.dimension);
    j["repetitions"] = r.repetitions;
    j["split_ratio"] = r.split_ratio;
    j["master_seed"] = r.master_seed;
    j["dataset_fingerprint"] = detail::hex64(r.dataset_fingerprint);
    j["total_vectors"] = r.total_vectors;
    j["voice_complete"] = r.voice_complete;
    j["configs"] = json::array();
    for (const auto& c : r.configs) {
        json cj;
        cj["classifier"] = classifier_name(c.config.classifier);
        cj["balancing"] = c.config.balancing;
        cj["scaling"] = c.config.scaling;
        cj["imputation"] = c.config.imputation;
        cj["error"] = c.error;
        cj["n_vectors"] = c.n_vectors;
        cj["class_counts"] = {c.n_first, c.n_second};
        cj["mean"] = detail::metrics_json(c.mean_model);
        cj["baseline"] = detail::metrics_json(c.mean_baseline);
        // Improvements are derived from the serialized (9-significant-digit)
        // metric values so regenerating tables from this JSON is a fixed point.
        auto imp = [&](double m, double b) {
            return detail::improvement_pct(round_g9(m), round_g9(b));
        };
        cj["improvement_pct"] = {
            {"precision", imp(c.mean_model.precision, c.mean_baseline.precision)},
            {"recall", imp(c.mean_model.recall, c.mean_baseline.recall)},
            {"f1", imp(c.mean_model.f1, c.mean_baseline.f1)},
            {"accuracy", imp(c.mean_model.accuracy, c.mean_baseline.accuracy)}};
        cj["runs"] = json::array();
        for (const auto& run : c.runs) {
            json rj;
            rj["repetition"] = run.repetition;
            rj["split_seed"] = run.split_seed;
            rj["chosen"] = run.chosen.to_json(c.config.classifier);
            rj["chosen_label"] = run.chosen.label(c.config.classifier);
            rj["loo_f1"] = run.chosen_loo_f1;
            rj["metrics"] = detail::metrics_json(run.model);
            rj["baseline"] = detail::metrics_json(run.baseline);
            rj["n_train"] = run.n_train;
            rj["n_test"] = run.n_test;
            rj["n_synthetic"] = run.n_synthetic;
            rj["scaler_fingerprint"] = detail::hex64(run.scaler_fingerprint);
            rj["imputer_fingerprint"] = detail::hex64(run.imputer_fingerprint);
            cj["runs"].push_back(rj);
        }
        j["configs"].push_back(cj);
    }
    return j;
}

// Inverse of eval_report_to_json; the JSON artifact is lossless, so tables can
// be regenerated from it without re-running the experiment.
inline EvalReport eval_report_from_json(const json& j) {
    EvalReport r;
    r.feature_set = feature_set_from_name(j.at("feature_set").get<std::string>());
    r.dimension = dimension_from_name(j.at("dimension").get<std::string>());
    r.repetitions = j.at("repetitions").get<std::size_t>();
    r.split_ratio = j.at("split_ratio").get<double>();
    r.master_seed = j.at("master_seed").get<std::uint64_t>();
    r.dataset_fingerprint = detail::parse_hex64(j.at("dataset_fingerprint").get<std::string>());
    r.total_vectors = j.at("total_vectors").get<std::size_t>();
    r.voice_complete = j.at("voice_complete").get<std::size_t>();
    for (const auto& cj : j.at("configs")) {
        ConfigReport c;
        c.config.classifier = classifier_from_name(cj.at("classifier").get<std::string>());
        c.config.balancing = cj.at("balancing").get<bool>();
        c.config.scaling = cj.at("scaling").get<bool>();
        c.config.imputation = cj.at("imputation").get<bool>();
        c.error = cj.at("error").get<std::string>();
        c.n_vectors = cj.at("n_vectors").get<std::size_t>();
        c.n_first = cj.at("class_counts").at(0).get<std::size_t>();
        c.n_second = cj.at("class_counts").at(1).get<std::size_t>();
        c.mean_model = detail::metrics_from_json(cj.at("mean"));
        c.mean_baseline = detail::metrics_from_json(cj.at("baseline"));
        for (const auto& rj : cj.at("runs")) {
            RunRecord run;
            run.repetition = rj.at("repetition").get<std::size_t>();
            run.split_seed = rj.at("split_seed").get<std::uint64_t>();
            run.chosen = HyperParams::from_json(c.config.classifier, rj.at("chosen"));
            run.chosen_loo_f1 = rj.at("loo_f1").get<double>();
            run.model = detail::metrics_from_json(rj.at("metrics"));
            run.baseline = detail::metrics_from_json(rj.at("baseline"));
            run.n_train = rj.at("n_train").get<std::size_t>();
            run.n_test = rj.at("n_test").get<std::size_t>();
            run.n_synthetic = rj.at("n_synthetic").get<std::size_t>();
            run.scaler_fingerprint =
                detail::parse_hex64(rj.at("scaler_fingerprint").get<std::string>());
            run.imputer_fingerprint =
                detail::parse_hex64(rj.at("imputer_fingerprint").get<std::string>());
            c.runs.push_back(std::move(run));
        }
        r.configs.push_back(std::move(c));
    }
    return r;
}

inline std::string eval_report_to_csv(const EvalReport& r) {
    if (r.configs.empty()) throw RangeViolation("eval report: no configurations");
    std::string out =
        "classifier,balancing,scaling,imputation,precision,recall,f1,accuracy,"
        "baseline_precision,baseline_recall,baseline_f1,baseline_accuracy,"
        "improve_precision_pct,improve_recall_pct,improve_f1_pct,improve_accuracy_pct,error\n";
    auto row = [&](const std::string& name, bool bal, bool sc, bool imp, const Metrics& m,
                   const Metrics& b, const std::string& err) {
        out += name;
        out += bal ? ",1" : ",0";
        out += sc ? ",1" : ",0";
        out += imp ? ",1" : ",0";
        for (double v : {m.precision, m.recall, m.f1, m.accuracy, b.precision, b.recall, b.f1,
                         b.accuracy})
            out += "," + detail::fmt_fixed4(v);
        for (double v :
             {detail::improvement_pct(m.precision, b.precision),
              detail::improvement_pct(m.recall, b.recall), detail::improvement_pct(m.f1, b.f1),
              detail::improvement_pct(m.accuracy, b.accuracy)})
            out += "," + detail::fmt_fixed4(v);
        out += "," + err + "\n";
    };
    // One baseline row per dataset regime present (imputation changes the
    // eligible row set for voice-bearing feature sets).
    bool seen[2] = {false, false};
    for (const auto& c : r.configs) {
        const int regime = c.config.imputation ? 1 : 0;
        if (!seen[regime] && c.error.empty()) {
            row("baseline", false, false, c.config.imputation, c.mean_baseline, c.mean_baseline,
                "");
            seen[regime] = true;
        }
    }
    for (const auto& c : r.configs)
        row(classifier_name(c.config.classifier), c.config.balancing, c.config.scaling,
            c.config.imputation, c.mean_model, c.mean_baseline, c.error);
    return out;
}

inline std::string eval_report_to_markdown(const EvalReport& r) {
    if (r.configs.empty()) throw RangeViolation("eval report: no configurations");
    std::string out = "# Results: " + std::string(feature_set_name(r.feature_set)) + " / " +
                      dimension_name(r.dimension) + "\n\n";
    out += "Repetitions: " + std::to_string(r.repetitions) +
           ", split ratio: " + fmt_g9(r.split_ratio) +
           ", master seed: " + std::to_string(r.master_seed) + "\n\n";
    out +=
        "| Classifier | Bal. | Scale | Imp. | Precision | Recall | F1 | Accuracy | ΔF1 vs "
        "baseline |\n";
    out += "|---|---|---|---|---|---|---|---|---|\n";
    auto row = [&](const std::string& name, const std::string& bal, const std::string& sc,
                   const std::string& imp, const Metrics& m, double df1, bool show_delta) {
        out += "| " + name + " | " + bal + " | " + sc + " | " + imp + " | " +
               detail::fmt_fixed4(m.precision) + " | " + detail::fmt_fixed4(m.recall) + " | " +
               detail::fmt_fixed4(m.f1) + " | " + detail::fmt_fixed4(m.accuracy) + " | " +
               (show_delta ? (df1 >= 0 ? "+" : "") + detail::fmt_fixed4(df1) + "%" : "—") +
               " |\n";
    };
    bool seen[2] = {false, false};
    for (const auto& c : r.configs) {
        const int regime = c.config.imputation ? 1 : 0;
        if (!seen[regime] && c.error.empty()) {
            row("baseline", "—", "—", c.config.imputation ? "yes" : "no", c.mean_baseline, 0.0,
                false);
            seen[regime] = true;
        }
    }
    const int best = best_config_index(r);
    for (std::size_t ci = 0; ci < r.configs.size(); ++ci) {
        const auto& c = r.configs[ci];
        if (!c.error.empty()) {
            out += "| " + std::string(classifier_name(c.config.classifier)) +
                   " | — | — | — | failed: " + c.error + " | | | | |\n";
            continue;
        }
        const bool flag = static_cast<int>(ci) == best;
        std::string name = classifier_name(c.config.classifier);
        if (flag) name = "**" + name + "**";
        row(name, c.config.balancing ? "yes" : "no", c.config.scaling ? "yes" : "no",
            c.config.imputation ? "yes" : "no", c.mean_model,
            detail::improvement_pct(c.mean_model.f1, c.mean_baseline.f1), true);
    }
    if (best >= 0) {
        const auto& c = r.configs[static_cast<std::size_t>(best)];
        const double d = detail::improvement_pct(c.mean_model.f1, c.mean_baseline.f1);
        out += "\nBest configuration: **" + c.config.label() + "** — macro-F1 " +
               detail::fmt_fixed4(c.mean_model.f1) + " vs baseline " +
               detail::fmt_fixed4(c.mean_baseline.f1) + " (" + (d >= 0 ? "+" : "") +
               detail::fmt_fixed4(d) + "%).\n";
    }
    return out;
}

// Writes results_<featureset>_<dimension>.{csv,json,md} and returns the paths.
inline std::vector<std::string> write_eval_report(const EvalReport& r,
                                                  const std::string& out_dir) {
    const std::string stem = out_dir + "/results_" + feature_set_name(r.feature_set) + "_" +
                             dimension_name(r.dimension);
    write_json_file(stem + ".json", eval_report_to_json(r));
    write_text_file(stem + ".csv", eval_report_to_csv(r));
    write_text_file(stem + ".md", eval_report_to_markdown(r));
    return {stem + ".json", stem + ".csv", stem + ".md"};
}

}  // namespace biovoice
