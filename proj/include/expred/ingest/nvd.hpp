#pragma once

// NVD JSON data feed (schema 1.0 / 1.1) reader.

#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "expred/ingest/diagnostics.hpp"
#include "expred/records.hpp"

namespace expred::ingest {

namespace nvd_detail {

using nlohmann::json;

inline const json* find_path(const json& j, std::initializer_list<const char*> keys) {
    const json* cur = &j;
    for (const char* k : keys) {
        if (!cur->is_object()) return nullptr;
        auto it = cur->find(k);
        if (it == cur->end()) return nullptr;
        cur = &*it;
    }
    return cur;
}

inline double score_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) throw InputError(std::string("missing numeric field ") + key);
    const double v = it->get<double>();
    if (!(v >= 0.0 && v <= 10.0)) throw InputError(std::string(key) + " out of [0,10]");
    return v;
}

// cpe:2.3:part:vendor:product:...   or   cpe:/part:vendor:product:...
inline CpeEntry decompose_cpe(const std::string& uri) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= uri.size(); ++i) {
        if (i == uri.size() || uri[i] == ':') {
            parts.push_back(uri.substr(start, i - start));
            start = i + 1;
        }
    }
    if (parts.size() >= 5 && parts[0] == "cpe" && parts[1] == "2.3") return {parts[3], parts[4]};
    if (parts.size() >= 4 && parts[0] == "cpe" && parts[1].size() >= 2 && parts[1][0] == '/') {
        return {parts[2], parts[3]};
    }
    throw InputError("malformed CPE URI '" + uri + "'");
}

inline void collect_cpes(const json& node, std::vector<CpeEntry>& out) {
    for (const char* key : {"cpe_match", "cpe"}) {
        if (auto it = node.find(key); it != node.end() && it->is_array()) {
            for (const auto& m : *it) {
                std::string uri;
                if (auto u = m.find("cpe23Uri"); u != m.end() && u->is_string()) {
                    uri = u->get<std::string>();
                } else if (auto u22 = m.find("cpe22Uri"); u22 != m.end() && u22->is_string()) {
                    uri = u22->get<std::string>();
                } else {
                    throw InputError("CPE match without URI");
                }
                out.push_back(decompose_cpe(uri));
            }
        }
    }
    if (auto it = node.find("children"); it != node.end() && it->is_array()) {
        for (const auto& child : *it) collect_cpes(child, out);
    }
}

inline CveRecord parse_entry(const json& item) {
    const json* id_node = find_path(item, {"cve", "CVE_data_meta", "ID"});
    if (id_node == nullptr || !id_node->is_string()) throw InputError("missing cve.CVE_data_meta.ID");
    const auto id = CveId::parse(id_node->get<std::string>());
    if (!id) throw InputError("invalid CVE id '" + id_node->get<std::string>() + "'");

    const json* pub = find_path(item, {"publishedDate"});
    if (pub == nullptr || !pub->is_string()) throw InputError(id->str() + ": missing publishedDate");
    const auto date = parse_date(pub->get<std::string>());
    if (!date) throw InputError(id->str() + ": unparseable publishedDate");

    CveRecord rec{*id, *date, {}, {}, {}, {}, {}, {}};

    if (const json* desc = find_path(item, {"cve", "description", "description_data"}); desc && desc->is_array()) {
        for (const auto& d : *desc) {
            if (d.value("lang", "") == "en" || rec.description.empty()) {
                rec.description = d.value("value", "");
                if (d.value("lang", "") == "en") break;
            }
        }
    }

    if (const json* refs = find_path(item, {"cve", "references", "reference_data"}); refs && refs->is_array()) {
        for (const auto& r : *refs) {
            Reference ref;
            ref.url = r.value("url", "");
            if (auto t = r.find("tags"); t != r.end() && t->is_array()) {
                for (const auto& tag : *t) ref.tags.insert(tag.get<std::string>());
            }
            rec.references.push_back(std::move(ref));
        }
    }

    if (const json* pt = find_path(item, {"cve", "problemtype", "problemtype_data"}); pt && pt->is_array()) {
        for (const auto& p : *pt) {
            if (auto d = p.find("description"); d != p.end() && d->is_array()) {
                for (const auto& e : *d) {
                    std::string v = e.value("value", "");
                    if (v.rfind("CWE-", 0) == 0) rec.cwe_ids.push_back(std::move(v));
                }
            }
        }
    }

    if (const json* nodes = find_path(item, {"configurations", "nodes"}); nodes && nodes->is_array()) {
        for (const auto& n : *nodes) collect_cpes(n, rec.cpe_entries);
    }

    if (const json* v2 = find_path(item, {"impact", "baseMetricV2"}); v2 && v2->is_object()) {
        const json* cv = find_path(*v2, {"cvssV2"});
        if (cv == nullptr || !cv->contains("vectorString")) throw InputError(id->str() + ": baseMetricV2 without vector");
        CvssV2Vector vec = parse_cvss2_vector(cv->at("vectorString").get<std::string>());
        vec.base_score = score_field(*cv, "baseScore");
        vec.impact_subscore = score_field(*v2, "impactScore");
        vec.exploitability_subscore = score_field(*v2, "exploitabilityScore");
        rec.cvss2 = vec;
    }
    if (const json* v3 = find_path(item, {"impact", "baseMetricV3"}); v3 && v3->is_object()) {
        const json* cv = find_path(*v3, {"cvssV3"});
        if (cv == nullptr || !cv->contains("vectorString")) throw InputError(id->str() + ": baseMetricV3 without vector");
        CvssV3Vector vec = parse_cvss3_vector(cv->at("vectorString").get<std::string>());
        vec.base_score = score_field(*cv, "baseScore");
        vec.impact_subscore = score_field(*v3, "impactScore");
        vec.exploitability_subscore = score_field(*v3, "exploitabilityScore");
        rec.cvss3 = vec;
    }
    return rec;
}

}  // namespace nvd_detail

/// Parses an NVD feed (plain or gzip). A document that is not valid JSON, or
/// has no CVE_Items array, throws ParseError. Entries with bad fields are
/// skipped into `diag`.
inline std::vector<CveRecord> parse_nvd_feed(const std::string& path, Diagnostics& diag) {
    using nlohmann::json;
    const std::string text = read_file(path);
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("malformed NVD feed " + path + ": " + e.what(), e.byte);
    }
    auto items = doc.find("CVE_Items");
    if (!doc.is_object() || items == doc.end() || !items->is_array()) {
        throw ParseError("NVD feed " + path + " has no CVE_Items array", 0);
    }
    std::vector<CveRecord> out;
    std::set<CveId> seen;
    std::size_t index = 0;
    for (const auto& item : *items) {
        ++diag.records_in;
        const std::string where = "CVE_Items[" + std::to_string(index++) + "]";
        try {
            CveRecord rec = nvd_detail::parse_entry(item);
            if (!seen.insert(rec.id).second) {
                diag.skip(path, where, "duplicate " + rec.id.str());
                continue;
            }
            out.push_back(std::move(rec));
            ++diag.records_out;
        } catch (const InputError& e) {
            diag.skip(path, where, e.what());
        } catch (const json::exception& e) {
            diag.skip(path, where, e.what());
        }
    }
    return out;
}

}  // namespace expred::ingest
