#pragma once

// Merging exploit evidence into PoC / real-world labels, plus the coverage and
// overlap reports built from the per-source CVE sets.

#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "expred/cve_id.hpp"
#include "expred/ingest/poc.hpp"
#include "expred/ingest/signatures.hpp"

namespace expred {

/// Evidence sources: the exploit archive plus every signature vendor.
enum class Source { Edb, SymantecAv, SymantecIps, Avast, Eset, TrendMicro, Kaspersky };

inline constexpr std::array kAllSources{Source::Edb,  Source::SymantecAv, Source::SymantecIps, Source::Avast,
                                        Source::Eset, Source::TrendMicro, Source::Kaspersky};

inline Source source_of(ingest::Vendor v) { return static_cast<Source>(static_cast<int>(v) + 1); }

inline bool is_vendor(Source s) { return s != Source::Edb; }

inline std::string_view source_name(Source s) {
    return s == Source::Edb ? std::string_view("EDB")
                            : ingest::vendor_name(static_cast<ingest::Vendor>(static_cast<int>(s) - 1));
}

inline std::optional<Source> parse_source(std::string_view name) {
    if (to_upper(trim(name)) == "EDB") return Source::Edb;
    if (auto v = ingest::parse_vendor(name)) return source_of(*v);
    return std::nullopt;
}

enum class ExploitKind { Poc, Rw };

struct LabelEntry {
    bool poc = false;
    bool rw = false;
    std::set<Source> sources;

    friend bool operator==(const LabelEntry&, const LabelEntry&) = default;
};

/// CVE -> label. Only CVEs with evidence from a selected source are present;
/// anything absent is negative for both kinds.
class LabelSet {
public:
    void add(const CveId& id, Source s) {
        auto& e = labels_[id];
        e.sources.insert(s);
        if (s == Source::Edb) {
            e.poc = true;
        } else {
            e.rw = true;
        }
    }

    bool is_positive(const CveId& id, ExploitKind kind) const {
        auto it = labels_.find(id);
        if (it == labels_.end()) return false;
        return kind == ExploitKind::Poc ? it->second.poc : it->second.rw;
    }

    std::set<CveId> cves(ExploitKind kind) const {
        std::set<CveId> out;
        for (const auto& [id, e] : labels_) {
            if (kind == ExploitKind::Poc ? e.poc : e.rw) out.insert(id);
        }
        return out;
    }

    const std::map<CveId, LabelEntry>& entries() const { return labels_; }
    std::size_t size() const { return labels_.size(); }

    friend bool operator==(const LabelSet&, const LabelSet&) = default;

private:
    std::map<CveId, LabelEntry> labels_;
};

/// rw iff some selected vendor mentions the CVE; poc iff EDB is selected and lists it.
inline LabelSet merge_ground_truth(const std::vector<ingest::PocEntry>& poc_entries,
                                   const std::vector<ingest::VendorSignatureEntry>& vendor_entries,
                                   const std::set<Source>& selected_sources) {
    if (selected_sources.empty()) throw InputError("ground truth needs at least one selected source");
    LabelSet out;
    if (selected_sources.count(Source::Edb)) {
        for (const auto& p : poc_entries) {
            for (const auto& id : p.cve_ids) out.add(id, Source::Edb);
        }
    }
    for (const auto& v : vendor_entries) {
        const Source s = source_of(v.vendor);
        if (!selected_sources.count(s)) continue;
        for (const auto& id : v.mentioned_cves) out.add(id, s);
    }
    return out;
}

/// CVE sets per source, the building block of the coverage reports.
inline std::map<Source, std::set<CveId>> cves_by_source(const std::vector<ingest::PocEntry>& poc_entries,
                                                        const std::vector<ingest::VendorSignatureEntry>& vendor_entries) {
    std::map<Source, std::set<CveId>> out;
    for (const auto& p : poc_entries) out[Source::Edb].insert(p.cve_ids.begin(), p.cve_ids.end());
    for (const auto& v : vendor_entries) {
        out[source_of(v.vendor)].insert(v.mentioned_cves.begin(), v.mentioned_cves.end());
    }
    return out;
}

/// Report rows: Symantec (AV + IPS), Avast, Other (ESET, Trend Micro,
/// Kaspersky) and PoC.
inline std::map<std::string, std::set<CveId>> coverage_buckets(const std::map<Source, std::set<CveId>>& by_source) {
    std::map<std::string, std::set<CveId>> out{{"SYMANTEC", {}}, {"AVAST", {}}, {"OTHER", {}}, {"POC", {}}};
    for (const auto& [s, ids] : by_source) {
        std::string bucket;
        switch (s) {
            case Source::Edb: bucket = "POC"; break;
            case Source::SymantecAv:
            case Source::SymantecIps: bucket = "SYMANTEC"; break;
            case Source::Avast: bucket = "AVAST"; break;
            default: bucket = "OTHER"; break;
        }
        out[bucket].insert(ids.begin(), ids.end());
    }
    return out;
}

struct CoverageCell {
    std::size_t tweeted = 0;
    std::size_t total = 0;

    friend bool operator==(const CoverageCell&, const CoverageCell&) = default;
};

struct CoverageRow {
    std::string source;
    std::map<int, CoverageCell> by_year;
    CoverageCell row_sum;  // arithmetic sum over the reported years
};

/// For each labelled source and each year: CVEs disclosed that year (from the
/// id), and how many of those appear in `tweeted_cves`.
inline std::vector<CoverageRow> coverage_by_year(const std::map<std::string, std::set<CveId>>& label_set_per_source,
                                                 const std::set<CveId>& tweeted_cves, const std::vector<int>& years) {
    std::vector<CoverageRow> rows;
    for (const auto& [source, ids] : label_set_per_source) {
        CoverageRow row{source, {}, {}};
        for (int y : years) row.by_year[y] = {};
        for (const auto& id : ids) {
            auto it = row.by_year.find(id.year());
            if (it == row.by_year.end()) continue;
            ++it->second.total;
            if (tweeted_cves.count(id)) ++it->second.tweeted;
        }
        for (const auto& [y, cell] : row.by_year) {
            row.row_sum.tweeted += cell.tweeted;
            row.row_sum.total += cell.total;
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Region counts of the three-set Venn diagram (A = Symantec, B = other
/// vendors, C = exploit archive).
struct IntersectionReport {
    std::size_t only_a = 0, only_b = 0, only_c = 0;
    std::size_t a_b = 0, a_c = 0, b_c = 0;  // exactly two
    std::size_t a_b_c = 0;

    std::size_t total() const { return only_a + only_b + only_c + a_b + a_c + b_c + a_b_c; }
    friend bool operator==(const IntersectionReport&, const IntersectionReport&) = default;
};

inline IntersectionReport intersection_report(const std::set<CveId>& a, const std::set<CveId>& b,
                                              const std::set<CveId>& c) {
    std::set<CveId> all(a);
    all.insert(b.begin(), b.end());
    all.insert(c.begin(), c.end());
    IntersectionReport r;
    for (const auto& id : all) {
        const int mask = (a.count(id) ? 1 : 0) | (b.count(id) ? 2 : 0) | (c.count(id) ? 4 : 0);
        switch (mask) {
            case 1: ++r.only_a; break;
            case 2: ++r.only_b; break;
            case 4: ++r.only_c; break;
            case 3: ++r.a_b; break;
            case 5: ++r.a_c; break;
            case 6: ++r.b_c; break;
            case 7: ++r.a_b_c; break;
        }
    }
    return r;
}

// ------------------------------------------------------------
// report serialisation
// ------------------------------------------------------------

inline constexpr std::string_view kCoverageTotalsNote =
    "Total = arithmetic sum of the per-year cells computed from the ingested data. "
    "Reference totals for this table can disagree with their own row sums "
    "(e.g. a tweeted row of 43+29+58+131 = 261 listed as 267); such totals are never copied here.";

inline std::string coverage_csv(const std::vector<CoverageRow>& rows) {
    std::string out = "source,year,tweeted_count,total_count\n";
    for (const auto& r : rows) {
        for (const auto& [y, cell] : r.by_year) {
            out += r.source + "," + std::to_string(y) + "," + std::to_string(cell.tweeted) + "," +
                   std::to_string(cell.total) + "\n";
        }
        out += r.source + ",TOTAL," + std::to_string(r.row_sum.tweeted) + "," + std::to_string(r.row_sum.total) + "\n";
    }
    return out;
}

inline nlohmann::json coverage_json(const std::vector<CoverageRow>& rows) {
    nlohmann::json j;
    j["totals_policy"] = kCoverageTotalsNote;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json row{{"source", r.source}};
        row["years"] = nlohmann::json::object();
        for (const auto& [y, cell] : r.by_year) {
            row["years"][std::to_string(y)] = {{"tweeted_count", cell.tweeted}, {"total_count", cell.total}};
        }
        row["total"] = {{"tweeted_count", r.row_sum.tweeted}, {"total_count", r.row_sum.total}};
        j["rows"].push_back(std::move(row));
    }
    return j;
}

inline nlohmann::json intersection_json(const IntersectionReport& r, std::string_view a, std::string_view b,
                                        std::string_view c) {
    const std::string A(a), B(b), C(c);
    return {{"sets", {A, B, C}},
            {"regions",
             {{A + " only", r.only_a},
              {B + " only", r.only_b},
              {C + " only", r.only_c},
              {A + " & " + B, r.a_b},
              {A + " & " + C, r.a_c},
              {B + " & " + C, r.b_c},
              {A + " & " + B + " & " + C, r.a_b_c}}},
            {"union", r.total()}};
}

inline nlohmann::json label_set_json(const LabelSet& labels) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [id, e] : labels.entries()) {
        nlohmann::json sources = nlohmann::json::array();
        for (Source s : e.sources) sources.push_back(source_name(s));
        arr.push_back({{"cve_id", id.str()}, {"poc", e.poc}, {"rw", e.rw}, {"sources", sources}});
    }
    return {{"labels", arr}};
}

inline LabelSet label_set_from_json(const nlohmann::json& j) {
    LabelSet out;
    for (const auto& e : j.at("labels")) {
        const CveId id = CveId::from_string(e.at("cve_id").get<std::string>());
        for (const auto& s : e.at("sources")) {
            auto src = parse_source(s.get<std::string>());
            if (!src) throw InputError("unknown label source '" + s.get<std::string>() + "'");
            out.add(id, *src);
        }
    }
    return out;
}

}  // namespace expred
