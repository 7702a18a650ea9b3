#pragma once

// Antivirus / IPS signature encyclopedia pages (pre-fetched HTML or text).

#include <algorithm>
#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "expred/cve_id.hpp"
#include "expred/ingest/diagnostics.hpp"
#include "expred/records.hpp"

namespace expred::ingest {

enum class Vendor { SymantecAv, SymantecIps, Avast, Eset, TrendMicro, Kaspersky };

inline constexpr std::array kAllVendors{Vendor::SymantecAv, Vendor::SymantecIps, Vendor::Avast,
                                        Vendor::Eset,       Vendor::TrendMicro,  Vendor::Kaspersky};

inline std::string_view vendor_name(Vendor v) {
    switch (v) {
        case Vendor::SymantecAv: return "SYMANTEC_AV";
        case Vendor::SymantecIps: return "SYMANTEC_IPS";
        case Vendor::Avast: return "AVAST";
        case Vendor::Eset: return "ESET";
        case Vendor::TrendMicro: return "TRENDMICRO";
        case Vendor::Kaspersky: return "KASPERSKY";
    }
    return "?";
}

inline std::optional<Vendor> parse_vendor(std::string_view name) {
    const std::string up = to_upper(trim(name));
    for (Vendor v : kAllVendors) {
        if (vendor_name(v) == up) return v;
    }
    return std::nullopt;
}

struct VendorSignatureEntry {
    Vendor vendor;
    std::string signature_id;
    std::string title;
    std::string description;
    std::set<CveId> mentioned_cves;
    std::optional<Date> published_date;
    std::string page;  // file name the entry came from

    friend bool operator==(const VendorSignatureEntry&, const VendorSignatureEntry&) = default;
};

namespace sig_detail {

inline bool iequals_prefix(std::string_view s, std::size_t pos, std::string_view lit) {
    if (pos + lit.size() > s.size()) return false;
    for (std::size_t i = 0; i < lit.size(); ++i) {
        char c = s[pos + i];
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
        if (c != lit[i]) return false;
    }
    return true;
}

inline std::size_t ifind(std::string_view s, std::string_view lit, std::size_t from = 0) {
    for (std::size_t i = from; i + lit.size() <= s.size(); ++i) {
        if (iequals_prefix(s, i, lit)) return i;
    }
    return std::string_view::npos;
}

inline std::string decode_entities(std::string_view s) {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> table{{
        {"&amp;", "&"}, {"&lt;", "<"}, {"&gt;", ">"}, {"&quot;", "\""}, {"&#39;", "'"}, {"&apos;", "'"}, {"&nbsp;", " "},
    }};
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        bool replaced = false;
        if (s[i] == '&') {
            for (const auto& [ent, rep] : table) {
                if (s.substr(i, ent.size()) == ent) {
                    out += rep;
                    i += ent.size();
                    replaced = true;
                    break;
                }
            }
        }
        if (!replaced) out += s[i++];
    }
    return out;
}

// Tag-free text with block-level tags turned into newlines.
inline std::string html_to_text(std::string_view html) {
    std::string out;
    std::size_t i = 0;
    while (i < html.size()) {
        if (html[i] != '<') {
            out += html[i++];
            continue;
        }
        for (std::string_view skip : {"script", "style"}) {
            if (iequals_prefix(html, i + 1, skip)) {
                const std::string closing = "</" + std::string(skip);
                const std::size_t close = ifind(html, closing, i);
                i = close == std::string_view::npos ? html.size() : close;
                break;
            }
        }
        const std::size_t end = html.find('>', i);
        if (end == std::string_view::npos) break;
        std::string_view tag = html.substr(i + 1, end - i - 1);
        if (!tag.empty() && tag[0] == '/') tag.remove_prefix(1);
        bool block = false;
        for (std::string_view b : {"br", "p", "div", "li", "tr", "h1", "h2", "h3", "h4", "title", "dt", "dd", "td"}) {
            if (iequals_prefix(tag, 0, b) && (tag.size() == b.size() || tag[b.size()] == ' ' ||
                                              tag[b.size()] == '/' || tag[b.size()] == '>')) {
                block = true;
                break;
            }
        }
        out += block ? '\n' : ' ';
        i = end + 1;
    }
    return decode_entities(out);
}

inline std::optional<std::string> element_text(std::string_view html, std::string_view tag) {
    const std::size_t open = ifind(html, "<" + std::string(tag));
    if (open == std::string_view::npos) return std::nullopt;
    const std::size_t start = html.find('>', open);
    if (start == std::string_view::npos) return std::nullopt;
    const std::size_t close = ifind(html, "</" + std::string(tag), start);
    if (close == std::string_view::npos) return std::nullopt;
    std::string text = html_to_text(html.substr(start + 1, close - start - 1));
    return std::string(trim(text));
}

inline std::optional<std::string> meta_content(std::string_view html, std::string_view name) {
    const std::string needle = "name=\"" + std::string(name) + "\"";
    const std::size_t at = ifind(html, needle);
    if (at == std::string_view::npos) return std::nullopt;
    const std::size_t tag_end = html.find('>', at);
    const std::size_t c = ifind(html, "content=\"", at);
    if (c == std::string_view::npos || c > tag_end) return std::nullopt;
    const std::size_t vstart = c + 9;
    const std::size_t vend = html.find('"', vstart);
    if (vend == std::string_view::npos) return std::nullopt;
    return decode_entities(trim(html.substr(vstart, vend - vstart)));
}

// Labels preceding the signature identifier on a vendor page, most specific first.
inline std::vector<std::string_view> id_labels(Vendor v) {
    std::vector<std::string_view> labels;
    switch (v) {
        case Vendor::SymantecIps: labels = {"attack signature", "signature id"}; break;
        case Vendor::SymantecAv: labels = {"risk name", "threat name"}; break;
        case Vendor::Avast: labels = {"detection", "virus name"}; break;
        case Vendor::Eset: labels = {"detection name", "detection"}; break;
        case Vendor::TrendMicro: labels = {"rule", "threat name", "rule id"}; break;
        case Vendor::Kaspersky: labels = {"verdict", "detection"}; break;
    }
    for (std::string_view g : {"signature id", "signature name", "signature", "threat name", "detection name", "id"}) {
        labels.push_back(g);
    }
    return labels;
}

struct LabeledLine {
    std::string label;
    std::string value;
};

inline std::vector<LabeledLine> labeled_lines(std::string_view text) {
    std::vector<LabeledLine> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = trim(text.substr(pos, end - pos));
        pos = end + 1;
        const std::size_t colon = line.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon > 40) continue;
        std::string value(trim(line.substr(colon + 1)));
        if (value.empty()) continue;
        out.push_back({to_lower(trim(line.substr(0, colon))), std::move(value)});
    }
    return out;
}

inline bool looks_like_html(std::string_view raw) {
    return ifind(raw.substr(0, std::min<std::size_t>(raw.size(), 2048)), "<html") != std::string_view::npos ||
           ifind(raw.substr(0, std::min<std::size_t>(raw.size(), 2048)), "<!doctype") != std::string_view::npos;
}

}  // namespace sig_detail

/// Parses one page. Returns nullopt if no signature id can be found.
inline std::optional<VendorSignatureEntry> parse_signature_page(Vendor vendor, std::string_view raw,
                                                                std::string page_name = {}) {
    using namespace sig_detail;
    const bool html = looks_like_html(raw);
    const std::string text = html ? html_to_text(raw) : std::string(raw);

    VendorSignatureEntry e{vendor, {}, {}, {}, {}, {}, std::move(page_name)};
    if (html) {
        e.title = element_text(raw, "title").value_or("");
        if (e.title.empty()) e.title = element_text(raw, "h1").value_or("");
    } else {
        std::size_t p = 0;
        while (p < text.size() && e.title.empty()) {
            std::size_t end = text.find('\n', p);
            if (end == std::string::npos) end = text.size();
            e.title = std::string(trim(std::string_view(text).substr(p, end - p)));
            p = end + 1;
        }
    }

    const auto lines = labeled_lines(text);
    if (html) {
        if (auto m = meta_content(raw, "signature-id")) e.signature_id = *m;
    }
    for (std::string_view label : id_labels(vendor)) {
        if (!e.signature_id.empty()) break;
        for (const auto& l : lines) {
            if (l.label == label) {
                e.signature_id = l.value;
                break;
            }
        }
    }
    if (e.signature_id.empty()) return std::nullopt;

    for (const auto& l : lines) {
        if (l.label == "published" || l.label == "discovered" || l.label == "release date" || l.label == "date") {
            if (auto d = parse_date(l.value)) {
                e.published_date = d;
                break;
            }
        }
    }

    e.description = std::string(trim(text));
    // Mentions come from every text field; anything not literally present in
    // the raw page is discarded.
    const auto raw_ids = extract_cve_ids(raw);
    for (const auto& id : extract_cve_ids(e.title + "\n" + e.description)) {
        if (raw_ids.count(id)) e.mentioned_cves.insert(id);
    }
    return e;
}

/// `path` is one page or a directory of pages (read in file-name order).
inline std::vector<VendorSignatureEntry> parse_vendor_signatures(Vendor vendor, const std::string& path,
                                                                 Diagnostics& diag) {
    namespace fs = std::filesystem;
    std::vector<fs::path> pages;
    std::error_code ec;
    if (fs::is_directory(path, ec)) {
        for (const auto& de : fs::directory_iterator(path)) {
            if (de.is_regular_file()) pages.push_back(de.path());
        }
        std::sort(pages.begin(), pages.end());
    } else if (fs::is_regular_file(path, ec)) {
        pages.emplace_back(path);
    } else {
        throw InputError("signature path does not exist: " + path);
    }

    std::vector<VendorSignatureEntry> out;
    for (const auto& p : pages) {
        ++diag.records_in;
        const std::string raw = read_file(p.string());
        auto entry = parse_signature_page(vendor, raw, p.filename().string());
        if (!entry) {
            diag.skip(p.string(), p.filename().string(), "no signature id found");
            continue;
        }
        out.push_back(std::move(*entry));
        ++diag.records_out;
    }
    return out;
}

}  // namespace expred::ingest
