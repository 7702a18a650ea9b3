#pragma once

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "expred/common.hpp"

namespace expred {

/// CVE identifier, "CVE-<year>-<sequence>". The sequence keeps its digits as
/// text so "0160" survives.
class CveId {
public:
    static constexpr int kMinYear = 1999;
    static constexpr int kMaxYear = 2100;

    /// Parses a full identifier (case-insensitive, surrounding whitespace ignored).
    static std::optional<CveId> parse(std::string_view text) {
        text = trim(text);
        if (text.size() < 13) return std::nullopt;
        if (to_upper(text.substr(0, 4)) != "CVE-") return std::nullopt;
        const std::size_t len = match_body(text, 4);
        if (len == 0 || 4 + len != text.size()) return std::nullopt;
        return from_parts(text.substr(4, 4), text.substr(9));
    }

    static CveId from_string(std::string_view text) {
        auto id = parse(text);
        if (!id) throw InputError("invalid CVE id: '" + std::string(text) + "'");
        return *id;
    }

    int year() const noexcept { return year_; }
    const std::string& sequence() const noexcept { return sequence_; }
    std::string str() const { return "CVE-" + std::to_string(year_) + "-" + sequence_; }

    friend bool operator==(const CveId&, const CveId&) = default;

    /// Numeric order: year, then sequence number.
    friend std::strong_ordering operator<=>(const CveId& a, const CveId& b) {
        if (auto c = a.year_ <=> b.year_; c != 0) return c;
        if (auto c = a.sequence_.size() <=> b.sequence_.size(); c != 0) return c;
        const int cmp = a.sequence_.compare(b.sequence_);
        return cmp < 0 ? std::strong_ordering::less
                       : (cmp > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    // Length of "<4 digits>-<4..7 digits>" starting at pos, or 0. The sequence
    // must not continue into an eighth digit.
    static std::size_t match_body(std::string_view text, std::size_t pos) {
        const auto digit = [&](std::size_t i) { return i < text.size() && text[i] >= '0' && text[i] <= '9'; };
        for (std::size_t i = 0; i < 4; ++i) {
            if (!digit(pos + i)) return 0;
        }
        if (pos + 4 >= text.size() || text[pos + 4] != '-') return 0;
        std::size_t n = 0;
        while (digit(pos + 5 + n)) ++n;
        if (n < 4 || n > 7) return 0;
        return 5 + n;
    }

private:
    CveId(int year, std::string seq) : year_(year), sequence_(std::move(seq)) {}

    static std::optional<CveId> from_parts(std::string_view year_digits, std::string_view seq) {
        const int year = std::stoi(std::string(year_digits));
        if (year < kMinYear || year > kMaxYear) return std::nullopt;
        return CveId(year, std::string(seq));
    }

    friend std::set<CveId> extract_cve_ids(std::string_view text);

    int year_ = 0;
    std::string sequence_;
};

/// Every CVE-<4 digits>-<4..7 digits> occurrence in text, case-insensitive,
/// canonicalised to upper case; duplicates collapse.
inline std::set<CveId> extract_cve_ids(std::string_view text) {
    std::set<CveId> out;
    for (std::size_t i = 0; i + 13 <= text.size(); ++i) {
        const char c = text[i];
        if (c != 'c' && c != 'C') continue;
        if ((text[i + 1] | 0x20) != 'v' || (text[i + 2] | 0x20) != 'e' || text[i + 3] != '-') continue;
        const std::size_t len = CveId::match_body(text, i + 4);
        if (len == 0) continue;
        if (auto id = CveId::from_parts(text.substr(i + 4, 4), text.substr(i + 9, len - 5))) {
            out.insert(*id);
        }
        i += 3 + len;
    }
    return out;
}

}  // namespace expred
