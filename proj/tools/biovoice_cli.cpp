// biovoice: command-line driver for the engagement-prediction pipeline.
//
//   synth     generate a synthetic session corpus with planted labels
//   extract   session bundles -> per-session feature files
//   label     feature files -> label maps + binary gold standard
//   evaluate  gold standard -> classifier experiment matrix + result tables
//   report    regenerate CSV/Markdown tables from a results JSON
//   stats     descriptive rating statistics (per dimension and per topic)
//
// Exit codes: 0 success, 1 data/processing failure, 2 usage error.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "biovoice/biovoice.hpp"

namespace {

namespace fs = std::filesystem;
using biovoice::json;

int g_exit = 0;  // set by callbacks that finish with per-item failures

unsigned default_jobs() {
    const unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// ---------------------------------------------------------------------------
// Config file: flat `key = value` lines (# comments), merged under the
// command-line flags of the invoked subcommand; explicit flags win. Unknown
// keys become unknown options, i.e. usage errors.
// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> config_tokens(const fs::path& path) {
    if (!fs::exists(path))
        throw CLI::FileError::Missing(path.string());
    std::vector<std::string> tokens;
    std::istringstream in(biovoice::read_text_file(path));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos || trim(t.substr(0, eq)).empty())
            throw CLI::ParseError("config " + path.string() + ":" + std::to_string(lineno) +
                                      ": expected key = value",
                                  static_cast<int>(CLI::ExitCodes::InvalidError));
        tokens.push_back("--" + trim(t.substr(0, eq)) + "=" + trim(t.substr(eq + 1)));
    }
    return tokens;
}

// Strip --config from argv, splice the file's tokens in right after the
// subcommand name (so explicit flags, parsed later, override them).
std::vector<std::string> merge_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    std::string cfg;
    for (std::size_t i = 0; i < args.size();) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            cfg = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                       args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
        } else if (args[i].rfind("--config=", 0) == 0) {
            cfg = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
        } else {
            ++i;
        }
    }
    if (!cfg.empty() && !args.empty()) {
        const auto toks = config_tokens(cfg);
        args.insert(args.begin() + 1, toks.begin(), toks.end());
    }
    return args;
}

// All value options take the last occurrence so config-file tokens (spliced in
// first) lose to explicit flags.
CLI::Option* last_wins(CLI::Option* o) {
    return o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

void add_config_stub(CLI::App* cmd) {
    // Parsed and removed in merge_config; declared so help lists it.
    last_wins(cmd->add_option("--config", "Config file with key = value lines (flags win)")
                  ->type_name("FILE"));
}

std::vector<biovoice::ClassifierKind> parse_classifier_list(const std::string& csv) {
    std::vector<biovoice::ClassifierKind> kinds;
    std::string cur;
    std::istringstream in(csv);
    while (std::getline(in, cur, ',')) {
        cur = trim(cur);
        if (cur.empty()) continue;
        kinds.push_back(biovoice::classifier_from_name(cur));
    }
    if (kinds.empty()) throw biovoice::RangeViolation("no classifiers selected");
    return kinds;
}

std::vector<bool> parse_axis(const std::string& v, const char* on_name) {
    if (v == "both") return {false, true};
    if (v == "none") return {false};
    if (v == on_name) return {true};
    throw biovoice::RangeViolation(std::string("unknown axis value: ") + v);
}

void print_gold_summary(const biovoice::LabelingResult& r) {
    using biovoice::Dimension;
    for (Dimension d : {Dimension::valence, Dimension::arousal}) {
        const biovoice::GoldStandard& g = d == Dimension::valence ? r.valence : r.arousal;
        const auto names = biovoice::binary_class_names(d);
        const auto counts = g.class_counts();
        auto pct = [&](std::size_t n) {
            return g.total_rated == 0 ? 0.0 : 100.0 * static_cast<double>(n) /
                                                  static_cast<double>(g.total_rated);
        };
        std::cout << biovoice::dimension_name(d) << ": intervals "
                  << g.map.interval_string(0) << " | " << g.map.interval_string(1) << " | "
                  << g.map.interval_string(2) << "\n";
        char buf[160];
        std::snprintf(buf, sizeof(buf), "  %s %zu (%.0f%%), %s %zu (%.0f%%), neutral %zu (%.0f%%)",
                      names[0], counts[0], pct(counts[0]), names[1], counts[1], pct(counts[1]),
                      g.dropped_neutral, pct(g.dropped_neutral));
        std::cout << buf << "\n";
    }
    for (const auto& x : r.quality.excluded)
        std::cout << "excluded: " << x.subject_id << " (" << x.reason << ")\n";
}

void print_report_summary(const biovoice::EvalReport& r) {
    std::cout << "== " << biovoice::feature_set_name(r.feature_set) << " / "
              << biovoice::dimension_name(r.dimension) << ": " << r.total_vectors
              << " vectors (" << r.voice_complete << " voice-complete), "
              << r.repetitions << " repetitions ==\n";
    for (const auto& c : r.configs) {
        if (!c.error.empty()) {
            std::cout << "  " << c.config.label() << ": failed: " << c.error << "\n";
            continue;
        }
        char buf[200];
        std::snprintf(buf, sizeof(buf), "  %-24s n=%-4zu F1=%.4f (baseline %.4f)",
                      c.config.label().c_str(), c.n_vectors, c.mean_model.f1,
                      c.mean_baseline.f1);
        std::cout << buf << "\n";
    }
    const int best = biovoice::best_config_index(r);
    if (best >= 0) {
        const auto& c = r.configs[static_cast<std::size_t>(best)];
        char buf[200];
        std::snprintf(buf, sizeof(buf),
                      "  best: %s  macro-F1 %.4f vs baseline %.4f (%+.1f%%)",
                      c.config.label().c_str(), c.mean_model.f1, c.mean_baseline.f1,
                      biovoice::detail::improvement_pct(c.mean_model.f1, c.mean_baseline.f1));
        std::cout << buf << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"biovoice: multimodal engagement prediction pipeline"};
    app.require_subcommand(1);

    // ---- synth ----
    auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with planted labels");
    biovoice::GeneratorSpec gspec;
    std::string synth_out;
    unsigned synth_jobs = default_jobs();
    last_wins(synth->add_option("--subjects", gspec.n_subjects, "Number of subjects (>= 1)")
                  ->capture_default_str());
    last_wins(synth
                  ->add_option("--questions", gspec.questions_per_subject,
                               "Questions per subject (>= 4)")
                  ->capture_default_str());
    last_wins(synth
                  ->add_option("--delta", gspec.class_separation,
                               "Planted class separation (0 = labels carry no signal)")
                  ->capture_default_str());
    last_wins(synth
                  ->add_option("--neutral-fraction", gspec.neutral_fraction,
                               "Probability a question is planted neutral, [0,1)")
                  ->capture_default_str());
    last_wins(synth
                  ->add_option("--audio-fraction", gspec.audio_present_fraction,
                               "Probability a session has audio, (0,1]")
                  ->capture_default_str());
    last_wins(synth->add_option("--seed", gspec.seed, "Master seed")->capture_default_str());
    last_wins(synth->add_option("--jobs", synth_jobs, "Worker threads")->capture_default_str());
    last_wins(synth->add_option("--out", synth_out, "Output corpus directory")->required());
    add_config_stub(synth);
    synth->callback([&] {
        biovoice::generate_corpus(gspec, synth_out, synth_jobs);
        std::cout << "wrote " << gspec.n_subjects << " session bundles + truth.json to "
                  << synth_out << "\n";
    });

    // ---- extract ----
    auto* extract =
        app.add_subcommand("extract", "Extract per-question features from session bundles");
    std::string ex_data, ex_out = "features";
    unsigned ex_jobs = default_jobs();
    last_wins(extract->add_option("--data", ex_data, "Corpus directory of session bundles")
                  ->required());
    last_wins(extract->add_option("--out", ex_out, "Output directory for feature files")
                  ->capture_default_str());
    last_wins(extract->add_option("--jobs", ex_jobs, "Worker threads")->capture_default_str());
    add_config_stub(extract);
    extract->callback([&] {
        const auto sum = biovoice::extract_corpus(ex_data, ex_out, {}, ex_jobs);
        for (const auto& o : sum.outcomes) {
            for (const auto& w : o.warnings) std::cerr << "warning: " << w << "\n";
            if (!o.ok) std::cerr << "failed: " << o.directory << ": " << o.error << "\n";
        }
        std::cout << "extracted " << sum.n_ok() << "/" << sum.outcomes.size() << " sessions to "
                  << ex_out << "\n";
        if (sum.n_failed() > 0) g_exit = 1;
    });

    // ---- label ----
    auto* label =
        app.add_subcommand("label", "Build calibration-normalized gold-standard labels");
    std::string lb_features = "features", lb_out = "labels";
    std::uint64_t lb_seed = 0;
    last_wins(label->add_option("--features", lb_features, "Directory with feature files")
                  ->capture_default_str());
    last_wins(
        label->add_option("--out", lb_out, "Output directory for labelmap.json + gold.json")
            ->capture_default_str());
    last_wins(label->add_option("--seed", lb_seed, "Clustering seed")->capture_default_str());
    add_config_stub(label);
    label->callback([&] {
        const auto r = biovoice::label_corpus(lb_features, lb_out, lb_seed);
        print_gold_summary(r);
        std::cout << "wrote " << (fs::path(lb_out) / "labelmap.json").string() << " and "
                  << (fs::path(lb_out) / "gold.json").string() << "\n";
    });

    // ---- evaluate ----
    auto* evaluate =
        app.add_subcommand("evaluate", "Run the classifier experiment matrix on a gold standard");
    std::string ev_gold = "labels/gold.json", ev_features = "combined", ev_dimension = "both";
    std::string ev_classifiers = "nb,dtree,svm,rf,mlp";
    std::string ev_balancing = "both", ev_scaling = "both", ev_imputation = "both";
    bool ev_no_imputation = false;
    std::size_t ev_reps = 10;
    double ev_split = 0.7;
    std::uint64_t ev_seed = 0;
    unsigned ev_jobs = default_jobs();
    std::string ev_out = "results";
    last_wins(evaluate->add_option("--gold", ev_gold, "gold.json path")->capture_default_str());
    last_wins(evaluate->add_option("--features", ev_features, "Feature set")
                  ->check(CLI::IsMember({"biofeedback", "voice", "combined"}))
                  ->capture_default_str());
    last_wins(evaluate->add_option("--dimension", ev_dimension, "Affect dimension")
                  ->check(CLI::IsMember({"valence", "arousal", "both"}))
                  ->capture_default_str());
    last_wins(evaluate
                  ->add_option("--classifiers", ev_classifiers,
                               "Comma list from nb,dtree,svm,rf,mlp")
                  ->capture_default_str());
    last_wins(evaluate->add_option("--balancing", ev_balancing, "SMOTE axis")
                  ->check(CLI::IsMember({"both", "none", "smote"}))
                  ->capture_default_str());
    last_wins(evaluate->add_option("--scaling", ev_scaling, "Standardization axis")
                  ->check(CLI::IsMember({"both", "none", "zscore"}))
                  ->capture_default_str());
    last_wins(evaluate->add_option("--imputation", ev_imputation, "Voice-imputation axis")
                  ->check(CLI::IsMember({"both", "none", "knn"}))
                  ->capture_default_str());
    evaluate->add_flag("--no-imputation", ev_no_imputation,
                       "Restrict to voice-complete vectors (no imputation configs)");
    last_wins(evaluate->add_option("--repetitions", ev_reps, "Train/test repetitions")
                  ->capture_default_str());
    last_wins(evaluate->add_option("--split-ratio", ev_split, "Training fraction")
                  ->capture_default_str());
    last_wins(evaluate->add_option("--seed", ev_seed, "Master seed")->capture_default_str());
    last_wins(evaluate->add_option("--jobs", ev_jobs, "Worker threads")->capture_default_str());
    last_wins(
        evaluate->add_option("--out", ev_out, "Output directory for result tables")
            ->capture_default_str());
    add_config_stub(evaluate);
    evaluate->callback([&] {
        const auto gold = biovoice::gold_file_from_json(biovoice::read_json_file(ev_gold));
        biovoice::EvaluateOptions opt;
        opt.feature_set = biovoice::feature_set_from_name(ev_features);
        opt.dimensions.clear();
        if (ev_dimension != "arousal") opt.dimensions.push_back(biovoice::Dimension::valence);
        if (ev_dimension != "valence") opt.dimensions.push_back(biovoice::Dimension::arousal);
        opt.classifiers = parse_classifier_list(ev_classifiers);
        opt.balancing = parse_axis(ev_balancing, "smote");
        opt.scaling = parse_axis(ev_scaling, "zscore");
        opt.imputation = ev_no_imputation ? std::vector<bool>{false}
                                          : parse_axis(ev_imputation, "knn");
        opt.repetitions = ev_reps;
        opt.split_ratio = ev_split;
        opt.master_seed = ev_seed;
        opt.jobs = ev_jobs;
        const auto reports = biovoice::evaluate_gold(gold, opt, ev_out);
        for (const auto& r : reports) print_report_summary(r);
        std::cout << "wrote result tables to " << ev_out << "\n";
    });

    // ---- report ----
    auto* report =
        app.add_subcommand("report", "Regenerate CSV/Markdown tables from a results JSON");
    std::string rp_results, rp_out;
    last_wins(report
                  ->add_option("--results", rp_results,
                               "results_*.json file, or a directory containing them")
                  ->required());
    last_wins(report->add_option("--out", rp_out,
                                 "Output directory (default: alongside the input)"));
    add_config_stub(report);
    report->callback([&] {
        std::vector<fs::path> files;
        if (fs::is_directory(rp_results)) {
            for (const auto& e : fs::directory_iterator(rp_results)) {
                const std::string name = e.path().filename().string();
                if (e.is_regular_file() && name.rfind("results_", 0) == 0 &&
                    name.size() > 5 && name.substr(name.size() - 5) == ".json")
                    files.push_back(e.path());
            }
            std::sort(files.begin(), files.end());
        } else {
            files.push_back(rp_results);
        }
        if (files.empty())
            throw biovoice::RangeViolation("no results_*.json under " + rp_results);
        for (const auto& f : files) {
            const auto r = biovoice::eval_report_from_json(biovoice::read_json_file(f));
            std::string out_dir = rp_out.empty() ? f.parent_path().string() : rp_out;
            if (out_dir.empty()) out_dir = ".";
            std::error_code ec;
            fs::create_directories(out_dir, ec);
            if (ec) throw biovoice::UnwritablePath("cannot create directory: " + out_dir);
            const auto paths = biovoice::write_eval_report(r, out_dir);
            print_report_summary(r);
            for (const auto& p : paths) std::cout << "wrote " << p << "\n";
        }
    });

    // ---- stats ----
    auto* stats = app.add_subcommand(
        "stats", "Descriptive rating statistics over quality-filtered subjects");
    std::string st_features = "features", st_out = "stats";
    last_wins(stats->add_option("--features", st_features, "Directory with feature files")
                  ->capture_default_str());
    last_wins(stats->add_option("--out", st_out, "Output directory for stats.json")
                  ->capture_default_str());
    add_config_stub(stats);
    stats->callback([&] {
        const auto st = biovoice::stats_corpus(st_features, st_out);
        auto line = [](const char* name, const biovoice::DimensionStats& d) {
            char buf[200];
            std::snprintf(buf, sizeof(buf),
                          "%s: n=%zu raw mean %.2f [%g, %g] sd %.2f | normalized mean %.2f sd %.2f",
                          name, d.n, d.raw_mean, d.raw_min, d.raw_max, d.raw_std, d.norm_mean,
                          d.norm_std);
            std::cout << buf << "\n";
        };
        line("valence", st.valence);
        line("arousal", st.arousal);
        std::cout << "wrote " << (fs::path(st_out) / "stats.json").string() << "\n";
    });

    try {
        auto args = merge_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11's vector parse wants reversed args
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const biovoice::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return g_exit;
}
