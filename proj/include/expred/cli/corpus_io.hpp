#pragma once

// Normalised corpus files written by `ingest` and read by later stages:
// one JSON object per line, keys sorted, records in a deterministic order.

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "expred/ingest/nvd.hpp"
#include "expred/ingest/poc.hpp"
#include "expred/ingest/signatures.hpp"
#include "expred/ingest/tweets.hpp"
#include "expred/records.hpp"

namespace expred::cli {

using nlohmann::json;

inline json cve_to_json(const CveRecord& r) {
    json refs = json::array();
    for (const auto& ref : r.references) refs.push_back({{"url", ref.url}, {"tags", ref.tags}});
    json cpes = json::array();
    for (const auto& c : r.cpe_entries) cpes.push_back({{"vendor", c.vendor}, {"product", c.product}});
    json j{{"cve_id", r.id.str()},       {"published_date", format_date(r.published_date)},
           {"description", r.description}, {"references", refs},
           {"cpe_entries", cpes},         {"cwe_ids", r.cwe_ids}};
    if (r.cvss2) {
        j["cvss2"] = {{"vector", cvss2_vector_string(*r.cvss2)},
                      {"base_score", r.cvss2->base_score},
                      {"impact_subscore", r.cvss2->impact_subscore},
                      {"exploitability_subscore", r.cvss2->exploitability_subscore}};
    }
    if (r.cvss3) {
        j["cvss3"] = {{"vector", cvss3_vector_string(*r.cvss3)},
                      {"base_score", r.cvss3->base_score},
                      {"impact_subscore", r.cvss3->impact_subscore},
                      {"exploitability_subscore", r.cvss3->exploitability_subscore}};
    }
    return j;
}

inline CveRecord cve_from_json(const json& j) {
    auto date = parse_date(j.at("published_date").get<std::string>());
    if (!date) throw InputError("bad published_date in corpus");
    CveRecord r{CveId::from_string(j.at("cve_id").get<std::string>()), *date, j.at("description").get<std::string>(),
                {}, {}, {}, {}, j.at("cwe_ids").get<std::vector<std::string>>()};
    for (const auto& ref : j.at("references")) {
        r.references.push_back({ref.at("url").get<std::string>(), ref.at("tags").get<std::set<std::string>>()});
    }
    for (const auto& c : j.at("cpe_entries")) {
        r.cpe_entries.push_back({c.at("vendor").get<std::string>(), c.at("product").get<std::string>()});
    }
    if (auto it = j.find("cvss2"); it != j.end()) {
        CvssV2Vector v = parse_cvss2_vector(it->at("vector").get<std::string>());
        v.base_score = it->at("base_score").get<double>();
        v.impact_subscore = it->at("impact_subscore").get<double>();
        v.exploitability_subscore = it->at("exploitability_subscore").get<double>();
        r.cvss2 = v;
    }
    if (auto it = j.find("cvss3"); it != j.end()) {
        CvssV3Vector v = parse_cvss3_vector(it->at("vector").get<std::string>());
        v.base_score = it->at("base_score").get<double>();
        v.impact_subscore = it->at("impact_subscore").get<double>();
        v.exploitability_subscore = it->at("exploitability_subscore").get<double>();
        r.cvss3 = v;
    }
    return r;
}

inline json signature_to_json(const ingest::VendorSignatureEntry& e) {
    json ids = json::array();
    for (const auto& id : e.mentioned_cves) ids.push_back(id.str());
    json j{{"vendor", ingest::vendor_name(e.vendor)},
           {"signature_id", e.signature_id},
           {"title", e.title},
           {"description", e.description},
           {"mentioned_cves", ids},
           {"page", e.page}};
    j["published_date"] = e.published_date ? json(format_date(*e.published_date)) : json(nullptr);
    return j;
}

inline ingest::VendorSignatureEntry signature_from_json(const json& j) {
    auto vendor = ingest::parse_vendor(j.at("vendor").get<std::string>());
    if (!vendor) throw InputError("unknown vendor in corpus");
    ingest::VendorSignatureEntry e{*vendor,
                                   j.at("signature_id").get<std::string>(),
                                   j.at("title").get<std::string>(),
                                   j.at("description").get<std::string>(),
                                   {},
                                   {},
                                   j.at("page").get<std::string>()};
    for (const auto& id : j.at("mentioned_cves")) e.mentioned_cves.insert(CveId::from_string(id.get<std::string>()));
    if (!j.at("published_date").is_null()) e.published_date = parse_date(j.at("published_date").get<std::string>());
    return e;
}

inline json poc_to_json(const ingest::PocEntry& p) {
    json ids = json::array();
    for (const auto& id : p.cve_ids) ids.push_back(id.str());
    return {{"edb_id", p.edb_id},
            {"cve_ids", ids},
            {"published_date", p.published_date ? json(format_date(*p.published_date)) : json(nullptr)}};
}

inline ingest::PocEntry poc_from_json(const json& j) {
    ingest::PocEntry p{j.at("edb_id").get<std::string>(), {}, {}};
    for (const auto& id : j.at("cve_ids")) p.cve_ids.insert(CveId::from_string(id.get<std::string>()));
    if (!j.at("published_date").is_null()) p.published_date = parse_date(j.at("published_date").get<std::string>());
    return p;
}

inline void write_text(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot write " + path.string());
    out << content;
}

template <class T, class F>
void write_jsonl(const std::filesystem::path& path, const std::vector<T>& items, F&& to_json) {
    std::string text;
    for (const auto& it : items) text += to_json(it).dump() + "\n";
    write_text(path, text);
}

template <class F>
auto read_jsonl(const std::filesystem::path& path, F&& from_json) {
    const std::string text = ingest::read_file(path.string());
    std::vector<decltype(from_json(json{}))> out;
    std::size_t pos = 0, line = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        ++line;
        const std::string_view sv = trim(std::string_view(text).substr(pos, end - pos));
        pos = end + 1;
        if (sv.empty()) continue;
        try {
            out.push_back(from_json(json::parse(sv)));
        } catch (const json::exception& e) {
            throw InputError(path.string() + " line " + std::to_string(line) + ": " + e.what());
        }
    }
    return out;
}

/// The four normalised sources.
struct Corpus {
    std::vector<CveRecord> cves;
    std::vector<TweetRecord> tweets;
    std::vector<ingest::VendorSignatureEntry> signatures;
    std::vector<ingest::PocEntry> pocs;
};

inline void write_corpus(const std::filesystem::path& dir, const Corpus& c) {
    write_jsonl(dir / "cves.jsonl", c.cves, cve_to_json);
    write_jsonl(dir / "tweets.jsonl", c.tweets, ingest::tweet_to_json);
    write_jsonl(dir / "signatures.jsonl", c.signatures, signature_to_json);
    write_jsonl(dir / "poc.jsonl", c.pocs, poc_to_json);
}

inline Corpus read_corpus(const std::filesystem::path& dir) {
    for (const char* f : {"cves.jsonl", "tweets.jsonl", "signatures.jsonl", "poc.jsonl"}) {
        if (!std::filesystem::exists(dir / f)) {
            throw InputError("normalised corpus file missing: " + (dir / f).string() + " (run `ingest` first)");
        }
    }
    Corpus c;
    c.cves = read_jsonl(dir / "cves.jsonl", cve_from_json);
    c.tweets = read_jsonl(dir / "tweets.jsonl", [](const json& j) { return ingest::tweet_from_json(j); });
    c.signatures = read_jsonl(dir / "signatures.jsonl", signature_from_json);
    c.pocs = read_jsonl(dir / "poc.jsonl", poc_from_json);
    return c;
}

}  // namespace expred::cli
