#pragma once

// Pipeline commands: ingest -> ground-truth -> features -> experiment.
// Each reads its inputs from the config (and the output of earlier stages)
// and writes deterministic files under output_dir.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "expred/cli/config.hpp"
#include "expred/cli/corpus_io.hpp"
#include "expred/dataset.hpp"
#include "expred/eval/experiment.hpp"
#include "expred/eval/ttest.hpp"
#include "expred/features/keywords.hpp"
#include "expred/groundtruth.hpp"

namespace expred::cli {

namespace fs = std::filesystem;
using nlohmann::json;

/// A pipeline failure tagged with the stage that raised it.
class StageError : public PipelineError {
public:
    StageError(std::string stage, const std::string& what) : PipelineError(what), stage_(std::move(stage)) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

template <class F>
auto in_stage(const std::string& stage, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InputError&) {
        throw;
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

inline fs::path corpus_dir(const ExperimentConfig& c) { return fs::path(c.output_dir) / "corpus"; }
inline fs::path ground_truth_dir(const ExperimentConfig& c) { return fs::path(c.output_dir) / "ground_truth"; }

inline json diagnostics_json(const ingest::Diagnostics& d) {
    json entries = json::array();
    for (const auto& e : d.entries) entries.push_back({{"source", e.source}, {"location", e.location}, {"message", e.message}});
    json warnings = json::array();
    for (const auto& e : d.warnings) warnings.push_back({{"source", e.source}, {"location", e.location}, {"message", e.message}});
    return {{"records_in", d.records_in},
            {"records_out", d.records_out},
            {"skipped", d.entries.size()},
            {"entries", entries},
            {"warnings", warnings}};
}

// ------------------------------------------------------------
// ingest
// ------------------------------------------------------------

inline json cmd_ingest(const ExperimentConfig& c) {
    for (const auto& p : c.data.nvd) {
        if (!fs::exists(p)) throw InputError("input path does not exist: " + p);
    }
    for (const auto& p : {c.data.tweets, c.data.poc_listing, c.data.poc_cve_map}) {
        if (!fs::exists(p)) throw InputError("input path does not exist: " + p);
    }
    for (const auto& [v, p] : c.data.vendors) {
        if (!fs::exists(p)) throw InputError("input path does not exist: " + p);
    }

    Corpus corpus;
    json summary;

    ingest::Diagnostics nvd_diag;
    std::set<CveId> seen;
    for (const auto& path : c.data.nvd) {
        for (auto& rec : ingest::parse_nvd_feed(path, nvd_diag)) {
            if (!seen.insert(rec.id).second) {
                --nvd_diag.records_out;
                nvd_diag.skip(path, rec.id.str(), "duplicate of a record in an earlier feed");
                continue;
            }
            corpus.cves.push_back(std::move(rec));
        }
    }
    std::sort(corpus.cves.begin(), corpus.cves.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    summary["nvd"] = diagnostics_json(nvd_diag);

    ingest::Diagnostics tweet_diag;
    corpus.tweets = ingest::load_tweets(c.data.tweets, tweet_diag);
    summary["tweets"] = diagnostics_json(tweet_diag);

    json vendors = json::object();
    for (const auto& [vendor, path] : c.data.vendors) {
        ingest::Diagnostics d;
        auto entries = ingest::parse_vendor_signatures(vendor, path, d);
        corpus.signatures.insert(corpus.signatures.end(), entries.begin(), entries.end());
        vendors[std::string(ingest::vendor_name(vendor))] = diagnostics_json(d);
    }
    summary["signatures"] = vendors;

    ingest::Diagnostics poc_diag;
    corpus.pocs = ingest::load_poc_listing(c.data.poc_listing, c.data.poc_cve_map, poc_diag);
    summary["poc"] = diagnostics_json(poc_diag);

    std::set<CveId> mentioned;
    for (const auto& t : corpus.tweets) mentioned.insert(t.mentioned_cves.begin(), t.mentioned_cves.end());
    summary["counts"] = {{"cve_records", corpus.cves.size()},
                         {"tweets", corpus.tweets.size()},
                         {"tweet_authors",
                          [&] {
                              std::set<std::string> a;
                              for (const auto& t : corpus.tweets) a.insert(t.author_id);
                              return a.size();
                          }()},
                         {"tweeted_cves", mentioned.size()},
                         {"signatures", corpus.signatures.size()},
                         {"poc_entries", corpus.pocs.size()}};

    write_corpus(corpus_dir(c), corpus);
    write_text(corpus_dir(c) / "ingest_summary.json", summary.dump(2) + "\n");
    return summary;
}

// ------------------------------------------------------------
// ground truth and coverage
// ------------------------------------------------------------

inline std::set<CveId> tweeted_cves(const std::vector<TweetRecord>& tweets, YearRange range) {
    std::set<CveId> out;
    for (const auto& t : tweets) {
        for (const auto& id : t.mentioned_cves) {
            if (range.contains(id.year())) out.insert(id);
        }
    }
    return out;
}

inline std::set<CveId> restrict_years(const std::set<CveId>& ids, YearRange range) {
    std::set<CveId> out;
    for (const auto& id : ids) {
        if (range.contains(id.year())) out.insert(id);
    }
    return out;
}

/// Coverage-by-year CSV/JSON and the Symantec / other vendors / EDB overlap.
inline void write_coverage_reports(const ExperimentConfig& c, const Corpus& corpus, const fs::path& dir) {
    const auto by_source = cves_by_source(corpus.pocs, corpus.signatures);
    const auto buckets = coverage_buckets(by_source);
    const auto rows = coverage_by_year(buckets, tweeted_cves(corpus.tweets, c.year_range), c.years());
    write_text(dir / "coverage.csv", coverage_csv(rows));
    write_text(dir / "coverage.json", coverage_json(rows).dump(2) + "\n");

    std::set<CveId> symantec, others, edb;
    for (const auto& [s, ids] : by_source) {
        auto& target = s == Source::Edb ? edb
                       : (s == Source::SymantecAv || s == Source::SymantecIps) ? symantec
                                                                                 : others;
        target.insert(ids.begin(), ids.end());
    }
    const auto report = intersection_report(restrict_years(symantec, c.year_range), restrict_years(others, c.year_range),
                                            restrict_years(edb, c.year_range));
    json j = intersection_json(report, "SYMANTEC", "OTHER_VENDORS", "EDB");
    j["year_range"] = {c.year_range.first, c.year_range.last};
    write_text(dir / "intersection.json", j.dump(2) + "\n");
}

inline json cmd_ground_truth(const ExperimentConfig& c) {
    if (c.sources.empty()) throw InputError("ground truth needs at least one selected source");
    const Corpus corpus = read_corpus(corpus_dir(c));
    const LabelSet labels = merge_ground_truth(corpus.pocs, corpus.signatures, c.sources);
    const fs::path dir = ground_truth_dir(c);
    json sources = json::array();
    for (Source s : c.sources) sources.push_back(source_name(s));
    json labels_doc = label_set_json(labels);
    labels_doc["selected_sources"] = sources;
    write_text(dir / "labels.json", labels_doc.dump(2) + "\n");
    write_coverage_reports(c, corpus, dir);
    return {{"labels", labels.size()},
            {"rw", labels.cves(ExploitKind::Rw).size()},
            {"poc", labels.cves(ExploitKind::Poc).size()}};
}

inline json cmd_coverage(const ExperimentConfig& c) {
    const Corpus corpus = read_corpus(corpus_dir(c));
    write_coverage_reports(c, corpus, fs::path(c.output_dir) / "coverage");
    return {{"written", (fs::path(c.output_dir) / "coverage").string()}};
}

// ------------------------------------------------------------
// features and experiments
// ------------------------------------------------------------

inline features::KeywordList load_keywords(const ExperimentConfig& c) {
    return c.data.keywords ? features::KeywordList::from_file(*c.data.keywords) : features::KeywordList::defaults();
}

inline LabelSet load_labels(const ExperimentConfig& c) {
    const fs::path p = ground_truth_dir(c) / "labels.json";
    if (!fs::exists(p)) throw InputError("label set missing: " + p.string() + " (run `ground-truth` first)");
    try {
        return label_set_from_json(json::parse(ingest::read_file(p.string())));
    } catch (const json::exception& e) {
        throw InputError("malformed label file " + p.string() + ": " + e.what());
    }
}

inline Dataset load_dataset(const ExperimentConfig& c, AssemblyReport* report = nullptr) {
    const Corpus corpus = read_corpus(corpus_dir(c));
    const LabelSet labels = load_labels(c);
    const auto keywords = load_keywords(c);
    return in_stage("features", [&] {
        return assemble_dataset(corpus.cves, corpus.tweets, labels, c.year_range, keywords, report);
    });
}

inline json assembly_json(const AssemblyReport& r, const Dataset& ds) {
    json missing = json::array();
    for (const auto& id : r.missing_records) missing.push_back(id.str());
    std::size_t rw = 0, poc = 0;
    for (const auto& inst : ds.instances()) {
        rw += inst.label_rw;
        poc += inst.label_poc;
    }
    return {{"instances", ds.size()},
            {"rw_positives", rw},
            {"poc_positives", poc},
            {"tweets_used", r.tweets_used},
            {"out_of_range_mentions", r.out_of_range_mentions},
            {"missing_records", missing.size()},
            {"missing_record_ids", missing}};
}

inline json cmd_features(const ExperimentConfig& c) {
    AssemblyReport rep;
    const Dataset ds = load_dataset(c, &rep);
    const fs::path dir = fs::path(c.output_dir) / "features";
    write_text(dir / "features.csv", feature_matrix_csv(ds));
    const json summary = assembly_json(rep, ds);
    write_text(dir / "assembly.json", summary.dump(2) + "\n");
    return summary;
}

inline json sampler_json(const balance::SamplerConfig& s) {
    return {{"kind", balance::sampler_name(s.kind)}, {"k", s.k}, {"k_max", s.k_max}, {"target_ratio", s.target_ratio}};
}

inline json cmd_experiment(const ExperimentConfig& c) {
    const fs::path dir = fs::path(c.output_dir) / "experiment";
    if (c.kind == ExperimentKind::Coverage) {
        const Corpus corpus = read_corpus(corpus_dir(c));
        write_coverage_reports(c, corpus, dir);
        return {{"experiment", "COVERAGE"}};
    }

    AssemblyReport rep;
    const Dataset ds = load_dataset(c, &rep);
    json report{{"label", c.label == ExploitKind::Rw ? "RW" : "POC"},
                {"k", c.k},
                {"seed", c.seed},
                {"sampler", sampler_json(c.sampler)},
                {"year_range", {c.year_range.first, c.year_range.last}},
                {"dataset", assembly_json(rep, ds)}};
    report["dataset"].erase("missing_record_ids");
    json models = json::array();

    if (c.kind == ExperimentKind::Cv) {
        report["experiment"] = "CV";
        const DesignMatrix m = in_stage("features", [&] { return build_matrix(ds); });
        std::vector<eval::CvResult> results;
        for (std::size_t i = 0; i < c.classifiers.size(); ++i) {
            const auto& spec = c.classifiers[i];
            const std::string name(learn::classifier_name(spec.kind()));
            auto cv = in_stage("cross-validation (" + name + ")",
                               [&] { return eval::cross_validate(spec, c.sampler, m.X, m.labels(c.label), c.k, c.seed); });
            json folds = json::array();
            for (std::size_t f = 0; f < cv.folds.size(); ++f) {
                json fj = eval::metrics_json(cv.folds[f]);
                const auto& cc = cv.fold_counts[f];
                fj["tp"] = cc.tp;
                fj["fp"] = cc.fp;
                fj["fn"] = cc.fn;
                fj["tn"] = cc.tn;
                folds.push_back(std::move(fj));
            }
            const std::string curve_file = "pr_curve_" + std::to_string(i) + "_" + name + ".csv";
            write_text(dir / curve_file, eval::pr_curve_csv(cv.curve));
            models.push_back({{"classifier", name},
                              {"hyperparameters", spec.hyperparameters()},
                              {"threshold", cv.threshold},
                              {"per_fold", folds},
                              {"mean", eval::metrics_json(cv.mean)},
                              {"mean_fold_fscore", cv.mean_fold_fscore},
                              {"average_precision", cv.curve.average_precision},
                              {"pr_curve_file", curve_file}});
            results.push_back(std::move(cv));
        }
        if (results.size() == 2) {
            auto t = in_stage("t-test", [&] { return eval::paired_ttest(results[1].fold_fscores(), results[0].fold_fscores()); });
            json tj = eval::ttest_json(t);
            tj["a"] = learn::classifier_name(c.classifiers[1].kind());
            tj["b"] = learn::classifier_name(c.classifiers[0].kind());
            tj["statistic"] = "fold F-score differences a - b";
            report["ttest"] = tj;
        }
    } else {
        report["experiment"] = "TEMPORAL";
        report["train_years"] = c.train_years;
        report["test_year"] = *c.test_year;
        for (std::size_t i = 0; i < c.classifiers.size(); ++i) {
            const auto& spec = c.classifiers[i];
            const std::string name(learn::classifier_name(spec.kind()));
            auto r = in_stage("temporal (" + name + ")", [&] {
                return eval::temporal_experiment(ds, c.label, c.train_years, *c.test_year, spec, c.sampler, c.k, c.seed);
            });
            const std::string curve_file = "pr_curve_" + std::to_string(i) + "_" + name + ".csv";
            write_text(dir / curve_file, eval::pr_curve_csv(r.curve));
            models.push_back({{"classifier", name},
                              {"hyperparameters", spec.hyperparameters()},
                              {"mode", r.single_year ? "single-year-cv" : "disjoint"},
                              {"metrics", eval::metrics_json(r.metrics)},
                              {"average_precision", r.curve.average_precision},
                              {"train_size", r.train_size},
                              {"test_size", r.test_size},
                              {"pr_curve_file", curve_file}});
        }
    }
    report["models"] = models;
    write_text(dir / "report.json", report.dump(2) + "\n");
    return report;
}

}  // namespace expred::cli
