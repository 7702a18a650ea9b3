#pragma once

// Core domain records: calendar types, CVSS vectors, NVD records and tweets.

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "expred/common.hpp"
#include "expred/cve_id.hpp"

namespace expred {

using Date = std::chrono::year_month_day;
using Timestamp = std::chrono::sys_seconds;

namespace detail {

inline std::optional<int> parse_fixed_int(std::string_view s, std::size_t pos, std::size_t len) {
    if (pos + len > s.size()) return std::nullopt;
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data() + pos, s.data() + pos + len, v);
    if (ec != std::errc{} || ptr != s.data() + pos + len) return std::nullopt;
    return v;
}

}  // namespace detail

/// Accepts "YYYY-MM-DD" optionally followed by a time part.
inline std::optional<Date> parse_date(std::string_view s) {
    s = trim(s);
    if (s.size() < 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    if (s.size() > 10 && s[10] != 'T' && s[10] != ' ') return std::nullopt;
    auto y = detail::parse_fixed_int(s, 0, 4);
    auto m = detail::parse_fixed_int(s, 5, 2);
    auto d = detail::parse_fixed_int(s, 8, 2);
    if (!y || !m || !d) return std::nullopt;
    Date date{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*m)},
              std::chrono::day{static_cast<unsigned>(*d)}};
    if (!date.ok()) return std::nullopt;
    return date;
}

/// Accepts "YYYY-MM-DDTHH:MM[:SS][.fff][Z]" (UTC) or a bare date.
inline std::optional<Timestamp> parse_timestamp(std::string_view s) {
    s = trim(s);
    auto date = parse_date(s);
    if (!date) return std::nullopt;
    int hh = 0, mm = 0, ss = 0;
    if (s.size() > 10) {
        auto h = detail::parse_fixed_int(s, 11, 2);
        if (!h || s.size() < 16 || s[13] != ':') return std::nullopt;
        auto m = detail::parse_fixed_int(s, 14, 2);
        if (!m) return std::nullopt;
        hh = *h;
        mm = *m;
        std::size_t pos = 16;
        if (pos < s.size() && s[pos] == ':') {
            auto sec = detail::parse_fixed_int(s, pos + 1, 2);
            if (!sec) return std::nullopt;
            ss = *sec;
            pos += 3;
            if (pos < s.size() && s[pos] == '.') {
                ++pos;
                while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
            }
        }
        const std::string_view rest = s.substr(pos);
        if (!(rest.empty() || rest == "Z" || rest == "+00:00" || rest == "+0000")) return std::nullopt;
        if (hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    }
    return std::chrono::sys_days{*date} + std::chrono::hours{hh} + std::chrono::minutes{mm} +
           std::chrono::seconds{ss};
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

inline std::string format_timestamp(const Timestamp& t) {
    const auto day = std::chrono::floor<std::chrono::days>(t);
    const std::chrono::hh_mm_ss tod{t - day};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%sT%02d:%02d:%02dZ", format_date(Date{day}).c_str(),
                  static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                  static_cast<int>(tod.seconds().count()));
    return buf;
}

// ------------------------------------------------------------
// CVSS
// ------------------------------------------------------------
// Enumerator values are the ordinal feature encodings, ordered by severity.

enum class AccessVector2 { Local = 0, Adjacent = 1, Network = 2 };
enum class AccessComplexity2 { High = 0, Medium = 1, Low = 2 };
enum class Authentication2 { Multiple = 0, Single = 1, None = 2 };
enum class Impact2 { None = 0, Partial = 1, Complete = 2 };

enum class AttackVector3 { Physical = 0, Local = 1, Adjacent = 2, Network = 3 };
enum class AttackComplexity3 { High = 0, Low = 1 };
enum class PrivilegesRequired3 { High = 0, Low = 1, None = 2 };
enum class UserInteraction3 { Required = 0, None = 1 };
enum class Scope3 { Unchanged = 0, Changed = 1 };
enum class Impact3 { None = 0, Low = 1, High = 2 };

struct CvssV2Vector {
    double base_score = 0.0;
    double impact_subscore = 0.0;
    double exploitability_subscore = 0.0;
    AccessVector2 access_vector = AccessVector2::Local;
    AccessComplexity2 access_complexity = AccessComplexity2::High;
    Authentication2 authentication = Authentication2::Multiple;
    Impact2 conf_impact = Impact2::None;
    Impact2 integ_impact = Impact2::None;
    Impact2 avail_impact = Impact2::None;

    friend bool operator==(const CvssV2Vector&, const CvssV2Vector&) = default;
};

struct CvssV3Vector {
    double base_score = 0.0;
    double impact_subscore = 0.0;
    double exploitability_subscore = 0.0;
    AttackVector3 attack_vector = AttackVector3::Physical;
    AttackComplexity3 attack_complexity = AttackComplexity3::High;
    PrivilegesRequired3 privileges_required = PrivilegesRequired3::High;
    UserInteraction3 user_interaction = UserInteraction3::Required;
    Scope3 scope = Scope3::Unchanged;
    Impact3 conf = Impact3::None;
    Impact3 integ = Impact3::None;
    Impact3 avail = Impact3::None;

    friend bool operator==(const CvssV3Vector&, const CvssV3Vector&) = default;
};

namespace detail {

// Splits "K:V/K:V/..." into a map; rejects duplicate or empty keys.
inline std::map<std::string, std::string> split_vector(std::string_view vec) {
    std::map<std::string, std::string> out;
    std::size_t start = 0;
    while (start <= vec.size()) {
        std::size_t end = vec.find('/', start);
        if (end == std::string_view::npos) end = vec.size();
        const std::string_view part = vec.substr(start, end - start);
        const std::size_t colon = part.find(':');
        if (colon == std::string_view::npos || colon == 0 || colon + 1 == part.size()) {
            throw InputError("malformed CVSS component '" + std::string(part) + "'");
        }
        auto [it, inserted] = out.emplace(std::string(part.substr(0, colon)), std::string(part.substr(colon + 1)));
        if (!inserted) throw InputError("duplicate CVSS metric '" + it->first + "'");
        start = end + 1;
    }
    return out;
}

template <class Enum, std::size_t N>
Enum lookup_metric(const std::map<std::string, std::string>& m, const std::string& key,
                   const std::array<std::pair<const char*, Enum>, N>& table) {
    auto it = m.find(key);
    if (it == m.end()) throw InputError("CVSS vector missing metric " + key);
    for (const auto& [code, value] : table) {
        if (it->second == code) return value;
    }
    throw InputError("CVSS metric " + key + " has unknown value '" + it->second + "'");
}

}  // namespace detail

/// Decodes the categorical part of a v2 vector ("AV:N/AC:L/Au:N/C:P/I:P/A:P").
/// Scores are left at zero; NVD carries them separately.
inline CvssV2Vector parse_cvss2_vector(std::string_view vec) {
    using detail::lookup_metric;
    if (vec.size() > 1 && vec.front() == '(' && vec.back() == ')') vec = vec.substr(1, vec.size() - 2);
    const auto m = detail::split_vector(vec);
    CvssV2Vector v;
    v.access_vector = lookup_metric(m, "AV", std::array{std::pair{"L", AccessVector2::Local},
                                                        std::pair{"A", AccessVector2::Adjacent},
                                                        std::pair{"N", AccessVector2::Network}});
    v.access_complexity = lookup_metric(m, "AC", std::array{std::pair{"H", AccessComplexity2::High},
                                                            std::pair{"M", AccessComplexity2::Medium},
                                                            std::pair{"L", AccessComplexity2::Low}});
    v.authentication = lookup_metric(m, "Au", std::array{std::pair{"M", Authentication2::Multiple},
                                                         std::pair{"S", Authentication2::Single},
                                                         std::pair{"N", Authentication2::None}});
    const std::array impact{std::pair{"N", Impact2::None}, std::pair{"P", Impact2::Partial},
                            std::pair{"C", Impact2::Complete}};
    v.conf_impact = lookup_metric(m, "C", impact);
    v.integ_impact = lookup_metric(m, "I", impact);
    v.avail_impact = lookup_metric(m, "A", impact);
    return v;
}

/// Decodes a v3.x vector ("CVSS:3.0/AV:N/AC:L/PR:N/UI:N/S:U/C:H/I:H/A:H").
inline CvssV3Vector parse_cvss3_vector(std::string_view vec) {
    using detail::lookup_metric;
    auto m = detail::split_vector(vec);
    if (auto it = m.find("CVSS"); it != m.end()) {
        if (it->second.empty() || it->second[0] != '3') throw InputError("unsupported CVSS version " + it->second);
        m.erase(it);
    }
    CvssV3Vector v;
    v.attack_vector = lookup_metric(m, "AV", std::array{std::pair{"P", AttackVector3::Physical},
                                                        std::pair{"L", AttackVector3::Local},
                                                        std::pair{"A", AttackVector3::Adjacent},
                                                        std::pair{"N", AttackVector3::Network}});
    v.attack_complexity = lookup_metric(
        m, "AC", std::array{std::pair{"H", AttackComplexity3::High}, std::pair{"L", AttackComplexity3::Low}});
    v.privileges_required = lookup_metric(m, "PR", std::array{std::pair{"H", PrivilegesRequired3::High},
                                                              std::pair{"L", PrivilegesRequired3::Low},
                                                              std::pair{"N", PrivilegesRequired3::None}});
    v.user_interaction = lookup_metric(
        m, "UI", std::array{std::pair{"R", UserInteraction3::Required}, std::pair{"N", UserInteraction3::None}});
    v.scope = lookup_metric(m, "S", std::array{std::pair{"U", Scope3::Unchanged}, std::pair{"C", Scope3::Changed}});
    const std::array impact{std::pair{"N", Impact3::None}, std::pair{"L", Impact3::Low},
                            std::pair{"H", Impact3::High}};
    v.conf = lookup_metric(m, "C", impact);
    v.integ = lookup_metric(m, "I", impact);
    v.avail = lookup_metric(m, "A", impact);
    return v;
}

inline std::string cvss2_vector_string(const CvssV2Vector& v) {
    static constexpr const char* av[] = {"L", "A", "N"};
    static constexpr const char* ac[] = {"H", "M", "L"};
    static constexpr const char* au[] = {"M", "S", "N"};
    static constexpr const char* imp[] = {"N", "P", "C"};
    return std::string("AV:") + av[static_cast<int>(v.access_vector)] + "/AC:" +
           ac[static_cast<int>(v.access_complexity)] + "/Au:" + au[static_cast<int>(v.authentication)] +
           "/C:" + imp[static_cast<int>(v.conf_impact)] + "/I:" + imp[static_cast<int>(v.integ_impact)] +
           "/A:" + imp[static_cast<int>(v.avail_impact)];
}

inline std::string cvss3_vector_string(const CvssV3Vector& v) {
    static constexpr const char* av[] = {"P", "L", "A", "N"};
    static constexpr const char* hl[] = {"H", "L"};
    static constexpr const char* pr[] = {"H", "L", "N"};
    static constexpr const char* ui[] = {"R", "N"};
    static constexpr const char* sc[] = {"U", "C"};
    static constexpr const char* imp[] = {"N", "L", "H"};
    return std::string("CVSS:3.0/AV:") + av[static_cast<int>(v.attack_vector)] +
           "/AC:" + hl[static_cast<int>(v.attack_complexity)] + "/PR:" + pr[static_cast<int>(v.privileges_required)] +
           "/UI:" + ui[static_cast<int>(v.user_interaction)] + "/S:" + sc[static_cast<int>(v.scope)] +
           "/C:" + imp[static_cast<int>(v.conf)] + "/I:" + imp[static_cast<int>(v.integ)] +
           "/A:" + imp[static_cast<int>(v.avail)];
}

// ------------------------------------------------------------
// records
// ------------------------------------------------------------

struct Reference {
    std::string url;
    std::set<std::string> tags;

    friend bool operator==(const Reference&, const Reference&) = default;
};

struct CpeEntry {
    std::string vendor;
    std::string product;

    friend bool operator==(const CpeEntry&, const CpeEntry&) = default;
};

struct CveRecord {
    CveId id;
    Date published_date;
    std::string description;
    std::optional<CvssV2Vector> cvss2;
    std::optional<CvssV3Vector> cvss3;
    std::vector<Reference> references;
    std::vector<CpeEntry> cpe_entries;
    std::vector<std::string> cwe_ids;

    friend bool operator==(const CveRecord&, const CveRecord&) = default;
};

struct TweetRecord {
    std::string tweet_id;
    std::string author_id;
    Timestamp posted_at;
    std::string text;
    std::int64_t retweet_count = 0;
    std::int64_t favorite_count = 0;
    std::int64_t author_followers = 0;
    std::int64_t author_friends = 0;
    bool author_verified = false;
    std::int64_t hashtag_count = 0;
    std::int64_t url_count = 0;
    std::set<CveId> mentioned_cves;

    friend bool operator==(const TweetRecord&, const TweetRecord&) = default;
};

}  // namespace expred
