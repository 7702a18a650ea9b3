#pragma once

// Per-CVE feature groups.

#include <algorithm>
#include <array>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "expred/features/keywords.hpp"
#include "expred/features/schema.hpp"
#include "expred/records.hpp"

namespace expred::features {

/// Calls f(token) for every maximal run of ASCII letters/digits, lower-cased.
template <class F>
void for_each_token(std::string_view text, F&& f) {
    std::string tok;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        char c = i < text.size() ? text[i] : ' ';
        const bool alnum = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
        if (alnum) {
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            tok += c;
        } else if (!tok.empty()) {
            f(std::string_view(tok));
            tok.clear();
        }
    }
}

/// Keyword occurrence counts summed over all tweets.
inline std::array<double, kWordCount> bow_features(std::span<const TweetRecord* const> tweets,
                                                   const KeywordList& keywords) {
    std::unordered_map<std::string_view, std::size_t> index;
    for (std::size_t i = 0; i < keywords.size(); ++i) index.emplace(keywords[i], i);
    std::array<double, kWordCount> out{};
    for (const TweetRecord* t : tweets) {
        for_each_token(t->text, [&](std::string_view tok) {
            if (auto it = index.find(tok); it != index.end()) out[it->second] += 1.0;
        });
    }
    return out;
}

/// Counts and sums over tweets; follower figures are per distinct author
/// (largest value seen for that author), verified counts distinct authors.
inline std::array<double, kTwitterStatCount> twitter_stats(std::span<const TweetRecord* const> tweets) {
    struct Author {
        std::int64_t followers = 0;
        bool verified = false;
    };
    std::map<std::string, Author> authors;
    double retweet_sum = 0, retweet_max = 0, favorite_sum = 0, favorite_max = 0, hashtags = 0, urls = 0;
    for (const TweetRecord* t : tweets) {
        auto& a = authors[t->author_id];
        a.followers = std::max(a.followers, t->author_followers);
        a.verified = a.verified || t->author_verified;
        retweet_sum += static_cast<double>(t->retweet_count);
        retweet_max = std::max(retweet_max, static_cast<double>(t->retweet_count));
        favorite_sum += static_cast<double>(t->favorite_count);
        favorite_max = std::max(favorite_max, static_cast<double>(t->favorite_count));
        hashtags += static_cast<double>(t->hashtag_count);
        urls += static_cast<double>(t->url_count);
    }
    double followers_sum = 0, followers_max = 0, verified = 0;
    for (const auto& [id, a] : authors) {
        followers_sum += static_cast<double>(a.followers);
        followers_max = std::max(followers_max, static_cast<double>(a.followers));
        if (a.verified) verified += 1;
    }
    const double users = static_cast<double>(authors.size());
    return {static_cast<double>(tweets.size()),
            users,
            retweet_sum,
            retweet_max,
            favorite_sum,
            favorite_max,
            followers_sum,
            followers_max,
            users > 0 ? followers_sum / users : 0.0,
            verified,
            hashtags,
            urls};
}

inline std::array<double, kCvss2Count> cvss2_features(const CveRecord& rec) {
    std::array<double, kCvss2Count> out;
    if (!rec.cvss2) {
        out.fill(kMissing);
        return out;
    }
    const auto& v = *rec.cvss2;
    return {v.base_score,
            v.impact_subscore,
            v.exploitability_subscore,
            static_cast<double>(v.access_vector),
            static_cast<double>(v.access_complexity),
            static_cast<double>(v.authentication),
            static_cast<double>(v.conf_impact),
            static_cast<double>(v.integ_impact),
            static_cast<double>(v.avail_impact)};
}

inline std::array<double, kCvss3Count> cvss3_features(const CveRecord& rec) {
    std::array<double, kCvss3Count> out;
    if (!rec.cvss3) {
        out.fill(kMissing);
        return out;
    }
    const auto& v = *rec.cvss3;
    return {v.base_score,
            v.impact_subscore,
            v.exploitability_subscore,
            static_cast<double>(v.attack_vector),
            static_cast<double>(v.attack_complexity),
            static_cast<double>(v.privileges_required),
            static_cast<double>(v.user_interaction),
            static_cast<double>(v.scope),
            static_cast<double>(v.conf),
            static_cast<double>(v.integ),
            static_cast<double>(v.avail)};
}

namespace detail {

inline bool has_tag(const CveRecord& rec, std::string_view tag) {
    const std::string want = to_lower(tag);
    for (const auto& r : rec.references) {
        for (const auto& t : r.tags) {
            if (to_lower(t) == want) return true;
        }
    }
    return false;
}

inline std::size_t whitespace_tokens(std::string_view s) {
    std::size_t n = 0;
    bool in_tok = false;
    for (char c : s) {
        const bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
        if (!space && !in_tok) ++n;
        in_tok = !space;
    }
    return n;
}

}  // namespace detail

inline std::array<double, kDatabaseCount> db_features(const CveRecord& rec) {
    std::set<std::string> vendors;
    std::set<std::pair<std::string, std::string>> products;
    for (const auto& c : rec.cpe_entries) {
        vendors.insert(c.vendor);
        products.emplace(c.vendor, c.product);
    }
    const std::string desc = to_lower(rec.description);
    const auto b = [](bool v) { return v ? 1.0 : 0.0; };
    return {static_cast<double>(rec.references.size()),
            static_cast<double>(rec.cpe_entries.size()),
            static_cast<double>(vendors.size()),
            static_cast<double>(products.size()),
            static_cast<double>(rec.cwe_ids.size()),
            static_cast<double>(detail::whitespace_tokens(rec.description)),
            b(detail::has_tag(rec, "Exploit")),
            b(detail::has_tag(rec, "Vendor Advisory")),
            b(detail::has_tag(rec, "Patch")),
            b(desc.find("remote") != std::string::npos),
            b(desc.find("execute") != std::string::npos)};
}

/// Full 79-component row for one CVE.
inline std::vector<double> feature_row(const CveRecord& rec, std::span<const TweetRecord* const> tweets,
                                       const KeywordList& keywords) {
    std::vector<double> row;
    row.reserve(kFeatureCount);
    const auto append = [&row](const auto& part) { row.insert(row.end(), part.begin(), part.end()); };
    append(bow_features(tweets, keywords));
    append(twitter_stats(tweets));
    append(cvss2_features(rec));
    append(cvss3_features(rec));
    append(db_features(rec));
    return row;
}

}  // namespace expred::features
