#pragma once

// Experiment configuration: a JSON document validated in full before any
// stage runs. Unknown keys are rejected at every level; relative paths are
// resolved against the config file's directory.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "expred/balance.hpp"
#include "expred/dataset.hpp"
#include "expred/groundtruth.hpp"
#include "expred/ingest/diagnostics.hpp"
#include "expred/learn/classifier.hpp"

namespace expred::cli {

enum class ExperimentKind { Cv, Temporal, Coverage };

struct DataPaths {
    std::vector<std::string> nvd;
    std::string tweets;
    std::map<ingest::Vendor, std::string> vendors;
    std::string poc_listing;
    std::string poc_cve_map;
    std::optional<std::string> keywords;
};

struct ExperimentConfig {
    DataPaths data;
    std::set<Source> sources;
    ExploitKind label = ExploitKind::Rw;
    std::vector<learn::ClassifierSpec> classifiers;
    balance::SamplerConfig sampler;
    std::size_t k = 10;
    std::uint64_t seed = 0;
    YearRange year_range;
    ExperimentKind kind = ExperimentKind::Cv;
    std::set<int> train_years;
    std::optional<int> test_year;
    std::string output_dir;

    std::vector<int> years() const {
        std::vector<int> out;
        for (int y = year_range.first; y <= year_range.last; ++y) out.push_back(y);
        return out;
    }
};

namespace config_detail {

using nlohmann::json;

inline void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw InputError("config: " + where + " must be an object");
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw InputError("config: unknown key '" + key + "' in " + where);
    }
}

inline const json& required(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError("config: missing '" + std::string(key) + "' in " + where);
    return *it;
}

inline std::string path_value(const json& v, const std::filesystem::path& base, const std::string& what) {
    if (!v.is_string() || v.get<std::string>().empty()) throw InputError("config: " + what + " must be a path string");
    const std::filesystem::path p(v.get<std::string>());
    return (p.is_absolute() ? p : base / p).lexically_normal().string();
}

inline long long int_value(const json& v, const std::string& what) {
    if (!v.is_number_integer()) throw InputError("config: " + what + " must be an integer");
    return v.get<long long>();
}

}  // namespace config_detail

inline ExperimentConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir) {
    using namespace config_detail;
    only_keys(doc, "config", {"data", "ground_truth", "label", "classifiers", "sampler", "k", "seed", "year_range",
                              "experiment", "output_dir"});
    ExperimentConfig c;

    const json& data = required(doc, "data", "config");
    only_keys(data, "data", {"nvd", "tweets", "vendors", "poc_listing", "poc_cve_map", "keywords"});
    const json& nvd = required(data, "nvd", "data");
    if (nvd.is_string()) {
        c.data.nvd.push_back(path_value(nvd, base_dir, "data.nvd"));
    } else if (nvd.is_array() && !nvd.empty()) {
        for (const auto& p : nvd) c.data.nvd.push_back(path_value(p, base_dir, "data.nvd[]"));
    } else {
        throw InputError("config: data.nvd must be a path or a non-empty list of paths");
    }
    c.data.tweets = path_value(required(data, "tweets", "data"), base_dir, "data.tweets");
    if (auto it = data.find("vendors"); it != data.end()) {
        if (!it->is_object()) throw InputError("config: data.vendors must be an object");
        for (const auto& [name, path] : it->items()) {
            auto v = ingest::parse_vendor(name);
            if (!v) throw InputError("config: unknown vendor '" + name + "' in data.vendors");
            c.data.vendors[*v] = path_value(path, base_dir, "data.vendors." + name);
        }
    }
    c.data.poc_listing = path_value(required(data, "poc_listing", "data"), base_dir, "data.poc_listing");
    c.data.poc_cve_map = path_value(required(data, "poc_cve_map", "data"), base_dir, "data.poc_cve_map");
    if (auto it = data.find("keywords"); it != data.end()) c.data.keywords = path_value(*it, base_dir, "data.keywords");

    if (auto it = doc.find("ground_truth"); it != doc.end()) {
        only_keys(*it, "ground_truth", {"sources"});
        const json& src = required(*it, "sources", "ground_truth");
        if (!src.is_array()) throw InputError("config: ground_truth.sources must be a list");
        for (const auto& s : src) {
            if (!s.is_string()) throw InputError("config: ground_truth.sources entries must be strings");
            auto parsed = parse_source(s.get<std::string>());
            if (!parsed) throw InputError("config: unknown ground-truth source '" + s.get<std::string>() + "'");
            c.sources.insert(*parsed);
        }
        if (c.sources.empty()) throw InputError("config: ground_truth.sources is empty");
    } else {
        c.sources.insert(kAllSources.begin(), kAllSources.end());
    }

    if (auto it = doc.find("label"); it != doc.end()) {
        const std::string l = it->is_string() ? to_upper(it->get<std::string>()) : "";
        if (l == "RW") {
            c.label = ExploitKind::Rw;
        } else if (l == "POC") {
            c.label = ExploitKind::Poc;
        } else {
            throw InputError("config: label must be \"RW\" or \"POC\"");
        }
    }

    if (auto it = doc.find("classifiers"); it != doc.end()) {
        if (!it->is_array()) throw InputError("config: classifiers must be a list");
        for (const auto& cl : *it) {
            only_keys(cl, "classifiers[]", {"kind", "hyperparameters"});
            const json& kind = required(cl, "kind", "classifiers[]");
            auto k = kind.is_string() ? learn::parse_classifier(kind.get<std::string>()) : std::nullopt;
            if (!k) throw InputError("config: unknown classifier kind " + kind.dump());
            learn::ClassifierSpec::Params params;
            if (auto hp = cl.find("hyperparameters"); hp != cl.end()) {
                if (!hp->is_object()) throw InputError("config: hyperparameters must be an object");
                for (const auto& [name, v] : hp->items()) {
                    if (!v.is_number()) throw InputError("config: hyperparameter " + name + " must be a number");
                    params[name] = v.get<double>();
                }
            }
            c.classifiers.emplace_back(*k, params);
        }
    }
    if (c.classifiers.empty()) c.classifiers.emplace_back(learn::ClassifierKind::Gbdt);
    if (c.classifiers.size() > 2) throw InputError("config: at most two classifiers can be compared");

    if (auto it = doc.find("sampler"); it != doc.end()) {
        only_keys(*it, "sampler", {"kind", "k", "k_max", "target_ratio"});
        const json& kind = required(*it, "kind", "sampler");
        auto k = kind.is_string() ? balance::parse_sampler(kind.get<std::string>()) : std::nullopt;
        if (!k) throw InputError("config: unknown sampler kind " + kind.dump());
        c.sampler.kind = *k;
        if (auto v = it->find("k"); v != it->end()) {
            const auto n = int_value(*v, "sampler.k");
            if (n < 1) throw InputError("config: sampler.k must be >= 1");
            c.sampler.k = static_cast<std::size_t>(n);
        }
        if (auto v = it->find("k_max"); v != it->end()) {
            const auto n = int_value(*v, "sampler.k_max");
            if (n < 1) throw InputError("config: sampler.k_max must be >= 1");
            c.sampler.k_max = static_cast<std::size_t>(n);
        }
        if (auto v = it->find("target_ratio"); v != it->end()) {
            if (!v->is_number()) throw InputError("config: sampler.target_ratio must be a number");
            c.sampler.target_ratio = v->get<double>();
            if (!(c.sampler.target_ratio > 0.0 && c.sampler.target_ratio <= 1.0)) {
                throw InputError("config: sampler.target_ratio must be in (0, 1]");
            }
        }
    }

    if (auto it = doc.find("k"); it != doc.end()) {
        const auto k = int_value(*it, "k");
        if (k < 2) throw InputError("config: k must be >= 2");
        c.k = static_cast<std::size_t>(k);
    }
    if (auto it = doc.find("seed"); it != doc.end()) {
        const auto s = int_value(*it, "seed");
        if (s < 0) throw InputError("config: seed must be non-negative");
        c.seed = static_cast<std::uint64_t>(s);
    }
    if (auto it = doc.find("year_range"); it != doc.end()) {
        if (!it->is_array() || it->size() != 2) throw InputError("config: year_range must be [first, last]");
        c.year_range = {static_cast<int>(int_value((*it)[0], "year_range[0]")),
                        static_cast<int>(int_value((*it)[1], "year_range[1]"))};
        if (c.year_range.first > c.year_range.last || c.year_range.first < CveId::kMinYear ||
            c.year_range.last > CveId::kMaxYear) {
            throw InputError("config: year_range is not a valid interval within [1999, 2100]");
        }
    }

    if (auto it = doc.find("experiment"); it != doc.end()) {
        only_keys(*it, "experiment", {"kind", "train_years", "test_year"});
        const std::string kind = it->contains("kind") && it->at("kind").is_string()
                                     ? to_upper(it->at("kind").get<std::string>())
                                     : "";
        if (kind == "CV") {
            c.kind = ExperimentKind::Cv;
        } else if (kind == "TEMPORAL") {
            c.kind = ExperimentKind::Temporal;
        } else if (kind == "COVERAGE") {
            c.kind = ExperimentKind::Coverage;
        } else {
            throw InputError("config: experiment.kind must be CV, TEMPORAL or COVERAGE");
        }
        if (auto ty = it->find("train_years"); ty != it->end()) {
            if (!ty->is_array()) throw InputError("config: experiment.train_years must be a list");
            for (const auto& y : *ty) c.train_years.insert(static_cast<int>(int_value(y, "experiment.train_years[]")));
        }
        if (auto ty = it->find("test_year"); ty != it->end()) {
            c.test_year = static_cast<int>(int_value(*ty, "experiment.test_year"));
        }
        if (c.kind == ExperimentKind::Temporal) {
            if (c.train_years.empty() || !c.test_year) {
                throw InputError("config: TEMPORAL experiments need train_years and test_year");
            }
            if (c.train_years.count(*c.test_year) && c.train_years.size() > 1) {
                throw InputError("config: test_year must not overlap train_years (unless they are equal)");
            }
        }
    }

    c.output_dir = doc.contains("output_dir") ? path_value(doc.at("output_dir"), base_dir, "output_dir")
                                              : (base_dir / "out").lexically_normal().string();
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(ingest::read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("config " + path + " is not valid JSON: " + e.what(), e.byte);
    }
    return parse_config(doc, std::filesystem::absolute(path).parent_path());
}

}  // namespace expred::cli
