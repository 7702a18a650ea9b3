#pragma once

// Exploit-archive index (CSV) joined with an external EDB id -> CVE map.

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "expred/cve_id.hpp"
#include "expred/ingest/csv.hpp"
#include "expred/ingest/diagnostics.hpp"
#include "expred/records.hpp"

namespace expred::ingest {

struct PocEntry {
    std::string edb_id;
    std::set<CveId> cve_ids;  // never empty
    std::optional<Date> published_date;

    friend bool operator==(const PocEntry&, const PocEntry&) = default;
};

/// Reads the (edb_id, cve_id) map. Rows with an invalid CVE are reported as warnings.
inline std::map<std::string, std::set<CveId>> load_cve_map(const std::string& map_path, Diagnostics& diag) {
    if (!std::filesystem::is_regular_file(map_path)) throw InputError("CVE map file not found: " + map_path);
    const csv::Table table = csv::parse(read_file(map_path));
    const std::size_t edb_col = table.column("edb_id").value_or(0);
    const std::size_t cve_col = table.column("cve_id").value_or(1);
    std::map<std::string, std::set<CveId>> out;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = "line " + std::to_string(table.line_numbers[r]);
        if (row.size() <= std::max(edb_col, cve_col)) {
            diag.warn(map_path, where, "short row");
            continue;
        }
        auto id = CveId::parse(row[cve_col]);
        if (!id) {
            diag.warn(map_path, where, "invalid CVE id '" + row[cve_col] + "'");
            continue;
        }
        out[std::string(trim(row[edb_col]))].insert(*id);
    }
    return out;
}

/// One entry per listed exploit with at least one mapped CVE; unmapped
/// exploits are dropped into `diag`.
inline std::vector<PocEntry> load_poc_listing(const std::string& listing_path, const std::string& map_path,
                                              Diagnostics& diag) {
    const auto cve_map = load_cve_map(map_path, diag);
    const csv::Table table = csv::parse(read_file(listing_path));
    const auto id_col = table.column("id");
    if (!id_col) throw ParseError("exploit listing " + listing_path + " has no 'id' column", 0);
    auto date_col = table.column("date_published");
    if (!date_col) date_col = table.column("date");

    std::vector<PocEntry> out;
    std::set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        ++diag.records_in;
        const std::string where = "line " + std::to_string(table.line_numbers[r]);
        if (row.size() <= *id_col) {
            diag.skip(listing_path, where, "short row");
            continue;
        }
        const std::string edb_id(trim(row[*id_col]));
        if (!seen.insert(edb_id).second) {
            diag.skip(listing_path, where, "duplicate edb id " + edb_id);
            continue;
        }
        auto it = cve_map.find(edb_id);
        if (it == cve_map.end()) {
            diag.skip(listing_path, where, "edb id " + edb_id + " has no CVE mapping");
            continue;
        }
        PocEntry e{edb_id, it->second, std::nullopt};
        if (date_col && row.size() > *date_col) e.published_date = parse_date(row[*date_col]);
        out.push_back(std::move(e));
        ++diag.records_out;
    }
    return out;
}

}  // namespace expred::ingest
