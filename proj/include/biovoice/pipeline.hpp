#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "biovoice/core/error.hpp"
#include "biovoice/core/jsonutil.hpp"
#include "biovoice/core/parallel.hpp"
#include "biovoice/eval/harness.hpp"
#include "biovoice/eval/report.hpp"
#include "biovoice/eval/stats.hpp"
#include "biovoice/features/extract.hpp"
#include "biovoice/io/session.hpp"
#include "biovoice/label/labeling.hpp"

namespace biovoice {

// ---------------------------------------------------------------------------
// Corpus discovery
// ---------------------------------------------------------------------------

// Session bundle directories directly under `root` (those with a manifest),
// sorted by name for deterministic processing order.
inline std::vector<std::filesystem::path> find_session_dirs(const std::filesystem::path& root) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(root)) throw RangeViolation("not a directory: " + root.string());
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(root))
        if (e.is_directory() && fs::exists(e.path() / "manifest.json")) dirs.push_back(e.path());
    std::sort(dirs.begin(), dirs.end());
    return dirs;
}

// ---------------------------------------------------------------------------
// Extraction: session bundles -> one features file per session + a log
// ---------------------------------------------------------------------------

struct SessionOutcome {
    std::string directory;   // bundle directory name
    std::string subject_id;  // empty when the manifest itself was unreadable
    bool ok = false;
    std::string error;                  // diagnostic when !ok
    std::vector<std::string> warnings;  // e.g. sample-rate deviations
    std::size_t n_questions = 0;
    bool voice_present = false;
};

struct ExtractionSummary {
    std::vector<SessionOutcome> outcomes;

    std::size_t n_ok() const {
        std::size_t n = 0;
        for (const auto& o : outcomes) n += o.ok ? 1 : 0;
        return n;
    }
    std::size_t n_failed() const { return outcomes.size() - n_ok(); }

    // Failed sessions as labeling pre-exclusions.
    std::vector<SubjectExclusion> failed_as_exclusions() const {
        std::vector<SubjectExclusion> out;
        for (const auto& o : outcomes)
            if (!o.ok)
                out.push_back({o.subject_id.empty() ? o.directory : o.subject_id,
                               "incomplete_data"});
        return out;
    }
};

inline json extraction_summary_to_json(const ExtractionSummary& sum) {
    json j;
    j["container"] = "biovoice-extraction-log";
    j["version"] = 1;
    j["n_ok"] = sum.n_ok();
    j["n_failed"] = sum.n_failed();
    j["sessions"] = json::array();
    for (const auto& o : sum.outcomes)
        j["sessions"].push_back({{"directory", o.directory},
                                 {"subject_id", o.subject_id},
                                 {"ok", o.ok},
                                 {"error", o.error},
                                 {"warnings", o.warnings},
                                 {"n_questions", o.n_questions},
                                 {"voice_present", o.voice_present}});
    return j;
}

inline ExtractionSummary extraction_summary_from_json(const json& j) {
    if (!j.is_object() || j.value("container", "") != "biovoice-extraction-log")
        throw CorruptContainer("not an extraction log");
    ExtractionSummary sum;
    for (const auto& e : j.at("sessions")) {
        SessionOutcome o;
        o.directory = e.at("directory").get<std::string>();
        o.subject_id = e.at("subject_id").get<std::string>();
        o.ok = e.at("ok").get<bool>();
        o.error = e.at("error").get<std::string>();
        o.warnings = e.at("warnings").get<std::vector<std::string>>();
        o.n_questions = e.at("n_questions").get<std::size_t>();
        o.voice_present = e.at("voice_present").get<bool>();
        sum.outcomes.push_back(std::move(o));
    }
    return sum;
}

// Extract every bundle under `corpus_dir`; continues past failed sessions and
// records a per-session diagnostic instead. Writes
// `<out_dir>/<bundle>.features.json` per successful session plus
// `extraction_log.json`.
inline ExtractionSummary extract_corpus(const std::filesystem::path& corpus_dir,
                                        const std::filesystem::path& out_dir,
                                        const ExtractionParams& params = {}, unsigned jobs = 1) {
    const auto dirs = find_session_dirs(corpus_dir);
    if (dirs.empty())
        throw RangeViolation("no session bundles under " + corpus_dir.string());
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw UnwritablePath("cannot create directory: " + out_dir.string());

    ExtractionSummary sum;
    sum.outcomes.resize(dirs.size());
    parallel_for(dirs.size(), jobs, [&](std::size_t i) {
        SessionOutcome& o = sum.outcomes[i];
        o.directory = dirs[i].filename().string();
        try {
            InterviewSession s = load_session(dirs[i], &o.warnings);
            o.subject_id = s.subject_id;
            SessionFeatures f = extract_session(s, params);
            o.n_questions = f.questions.size();
            for (const auto& q : f.questions)
                if (!q.voice_missing) {
                    o.voice_present = true;
                    break;
                }
            write_json_file(out_dir / (o.directory + ".features.json"),
                            session_features_to_json(f));
            o.ok = true;
        } catch (const Error& e) {
            o.error = e.what();
        }
    });
    write_json_file(out_dir / "extraction_log.json", extraction_summary_to_json(sum));
    return sum;
}

// All feature files in a directory, sorted by file name.
inline std::vector<SessionFeatures> load_features_dir(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(dir)) throw RangeViolation("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        const std::string name = e.path().filename().string();
        if (e.is_regular_file() && name.size() > 14 &&
            name.substr(name.size() - 14) == ".features.json")
            files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<SessionFeatures> out;
    for (const auto& f : files) out.push_back(session_features_from_json(read_json_file(f)));
    return out;
}

// Pre-exclusions recorded by extract_corpus, if a log is present.
inline std::vector<SubjectExclusion> load_extraction_exclusions(
    const std::filesystem::path& dir) {
    const auto log = dir / "extraction_log.json";
    if (!std::filesystem::exists(log)) return {};
    return extraction_summary_from_json(read_json_file(log)).failed_as_exclusions();
}

// ---------------------------------------------------------------------------
// Labeling: features files -> labelmap.json + gold.json
// ---------------------------------------------------------------------------

inline json gold_standard_to_json(const GoldStandard& g) {
    json j;
    j["dimension"] = dimension_name(g.dimension);
    j["map"] = g.map.to_json();
    j["dropped_neutral"] = g.dropped_neutral;
    j["total_rated"] = g.total_rated;
    const auto names = binary_class_names(g.dimension);
    j["class_names"] = {names[0], names[1]};
    j["vectors"] = json::array();
    for (std::size_t i = 0; i < g.vectors.size(); ++i) {
        const FeatureVector& q = g.vectors[i];
        json e;
        e["subject_id"] = q.subject_id;
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
        e["label"] = g.labels[i];
        e["normalized"] = g.normalized[i];
        j["vectors"].push_back(std::move(e));
    }
    return j;
}

inline GoldStandard gold_standard_from_json(const json& j) {
    GoldStandard g;
    g.dimension = dimension_from_name(j.at("dimension").get<std::string>());
    g.map = LabelMap::from_json(j.at("map"));
    g.dropped_neutral = j.at("dropped_neutral").get<std::size_t>();
    g.total_rated = j.at("total_rated").get<std::size_t>();
    for (const auto& e : j.at("vectors")) {
        FeatureVector q;
        q.subject_id = e.at("subject_id").get<std::string>();
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
        g.vectors.push_back(std::move(q));
        g.labels.push_back(e.at("label").get<int>());
        g.normalized.push_back(e.at("normalized").get<double>());
    }
    return g;
}

// The machine-readable gold-standard artifact (both dimensions).
struct GoldFile {
    std::uint64_t seed = 0;
    std::size_t voice_dim = 0;
    GoldStandard valence;
    GoldStandard arousal;

    const GoldStandard& gold(Dimension d) const {
        return d == Dimension::valence ? valence : arousal;
    }
};

inline json gold_file_to_json(const GoldFile& g) {
    json j;
    j["container"] = "biovoice-gold";
    j["version"] = 1;
    j["seed"] = g.seed;
    j["voice_dim"] = g.voice_dim;
    j["valence"] = gold_standard_to_json(g.valence);
    j["arousal"] = gold_standard_to_json(g.arousal);
    return j;
}

inline GoldFile gold_file_from_json(const json& j) {
    if (!j.is_object() || j.value("container", "") != "biovoice-gold")
        throw CorruptContainer("not a gold-standard file");
    GoldFile g;
    g.seed = j.at("seed").get<std::uint64_t>();
    g.voice_dim = j.at("voice_dim").get<std::size_t>();
    g.valence = gold_standard_from_json(j.at("valence"));
    g.arousal = gold_standard_from_json(j.at("arousal"));
    return g;
}

namespace detail {

inline json label_summary(const GoldStandard& g) {
    const auto names = binary_class_names(g.dimension);
    const auto counts = g.class_counts();
    auto pct = [&](std::size_t n) {
        return g.total_rated == 0
                   ? 0.0
                   : 100.0 * static_cast<double>(n) / static_cast<double>(g.total_rated);
    };
    json d;
    d["map"] = g.map.to_json();
    d["intervals"] = {g.map.interval_string(0), g.map.interval_string(1),
                      g.map.interval_string(2)};
    d["total_rated"] = g.total_rated;
    d["classes"] = {{names[0], {{"count", counts[0]}, {"percent", pct(counts[0])}}},
                    {names[1], {{"count", counts[1]}, {"percent", pct(counts[1])}}},
                    {"neutral",
                     {{"count", g.dropped_neutral}, {"percent", pct(g.dropped_neutral)}}}};
    return d;
}

}  // namespace detail

// Build the gold standard from a features directory and write labelmap.json
// (human-oriented summary: quality decisions, intervals, class counts) plus
// gold.json (the machine-readable dataset).
inline LabelingResult label_corpus(const std::filesystem::path& features_dir,
                                   const std::filesystem::path& out_dir, std::uint64_t seed) {
    const auto sessions = load_features_dir(features_dir);
    if (sessions.empty())
        throw RangeViolation("no feature files under " + features_dir.string());
    const auto pre = load_extraction_exclusions(features_dir);
    LabelingResult r = build_gold_standard(sessions, seed, pre);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw UnwritablePath("cannot create directory: " + out_dir.string());

    json lm;
    lm["container"] = "biovoice-labelmap";
    lm["version"] = 1;
    lm["seed"] = seed;
    lm["quality"]["kept"] = r.quality.kept;
    lm["quality"]["excluded"] = json::array();
    for (const auto& x : r.quality.excluded)
        lm["quality"]["excluded"].push_back(
            {{"subject_id", x.subject_id}, {"reason", x.reason}});
    lm["valence"] = detail::label_summary(r.valence);
    lm["arousal"] = detail::label_summary(r.arousal);
    write_json_file(out_dir / "labelmap.json", lm);

    GoldFile g;
    g.seed = seed;
    g.voice_dim = r.voice_dim;
    g.valence = r.valence;
    g.arousal = r.arousal;
    write_json_file(out_dir / "gold.json", gold_file_to_json(g));
    return r;
}

// ---------------------------------------------------------------------------
// Evaluation: gold.json -> result tables
// ---------------------------------------------------------------------------

// Cross product in declaration order: classifier, balancing, scaling, imputation.
inline std::vector<PipelineConfig> build_config_matrix(const std::vector<ClassifierKind>& kinds,
                                                       const std::vector<bool>& balancing,
                                                       const std::vector<bool>& scaling,
                                                       const std::vector<bool>& imputation) {
    if (kinds.empty() || balancing.empty() || scaling.empty() || imputation.empty())
        throw RangeViolation("empty configuration axis");
    std::vector<PipelineConfig> out;
    for (ClassifierKind k : kinds)
        for (bool b : balancing)
            for (bool s : scaling)
                for (bool i : imputation) out.push_back({b, s, i, k});
    return out;
}

struct EvaluateOptions {
    FeatureSet feature_set = FeatureSet::combined;
    std::vector<Dimension> dimensions = {Dimension::valence, Dimension::arousal};
    std::vector<ClassifierKind> classifiers = all_classifier_kinds();
    std::vector<bool> balancing = {false, true};
    std::vector<bool> scaling = {false, true};
    std::vector<bool> imputation = {false, true};
    std::size_t repetitions = 10;
    double split_ratio = 0.7;
    std::uint64_t master_seed = 0;
    unsigned jobs = 1;
};

// Run the experiment matrix per requested dimension and write
// results_<featureset>_<dimension>.{json,csv,md} into out_dir.
inline std::vector<EvalReport> evaluate_gold(const GoldFile& gold, const EvaluateOptions& opt,
                                             const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw UnwritablePath("cannot create directory: " + out_dir.string());
    std::vector<EvalReport> reports;
    for (Dimension d : opt.dimensions) {
        ExperimentPlan plan;
        plan.feature_set = opt.feature_set;
        plan.configs =
            build_config_matrix(opt.classifiers, opt.balancing, opt.scaling, opt.imputation);
        plan.repetitions = opt.repetitions;
        plan.split_ratio = opt.split_ratio;
        plan.master_seed = opt.master_seed;
        plan.jobs = opt.jobs;
        EvalReport r = run_experiment(plan, gold.gold(d), gold.voice_dim);
        write_eval_report(r, out_dir);
        reports.push_back(std::move(r));
    }
    return reports;
}

// ---------------------------------------------------------------------------
// Descriptive statistics: features files -> stats.json
// ---------------------------------------------------------------------------

inline DescriptiveStats stats_corpus(const std::filesystem::path& features_dir,
                                     const std::filesystem::path& out_dir) {
    const auto sessions = load_features_dir(features_dir);
    if (sessions.empty())
        throw RangeViolation("no feature files under " + features_dir.string());
    const auto pre = load_extraction_exclusions(features_dir);
    const QualityDecision q = quality_filter(sessions, pre);
    std::vector<SessionFeatures> kept;
    for (const auto& s : sessions)
        if (std::find(q.kept.begin(), q.kept.end(), s.subject_id) != q.kept.end())
            kept.push_back(s);
    const DescriptiveStats st = descriptive_stats(kept);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw UnwritablePath("cannot create directory: " + out_dir.string());
    write_json_file(out_dir / "stats.json", stats_to_json(st));
    return st;
}

}  // namespace biovoice
