#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace expred::features {

enum class Category { Words, TwitterStats, Cvss2, Cvss3, Database };
enum class Kind { Numeric, Ordinal, Binary };

inline constexpr std::size_t kWordCount = 36;
inline constexpr std::size_t kTwitterStatCount = 12;
inline constexpr std::size_t kCvss2Count = 9;
inline constexpr std::size_t kCvss3Count = 11;
inline constexpr std::size_t kDatabaseCount = 11;

inline constexpr std::size_t kWordsBegin = 0;
inline constexpr std::size_t kTwitterBegin = kWordsBegin + kWordCount;     // 36
inline constexpr std::size_t kCvss2Begin = kTwitterBegin + kTwitterStatCount;  // 48
inline constexpr std::size_t kCvss3Begin = kCvss2Begin + kCvss2Count;      // 57
inline constexpr std::size_t kDatabaseBegin = kCvss3Begin + kCvss3Count;   // 68
inline constexpr std::size_t kFeatureCount = kDatabaseBegin + kDatabaseCount;  // 79

static_assert(kFeatureCount == 79);

/// Value used for every CVSS component of an absent vector.
inline constexpr double kMissing = -1.0;

inline constexpr std::array<std::string_view, kTwitterStatCount> kTwitterStatNames{
    "tweet_count",   "distinct_user_count", "retweet_sum",    "retweet_max",
    "favorite_sum",  "favorite_max",        "followers_sum",  "followers_max",
    "followers_mean", "verified_user_count", "hashtag_sum",   "url_sum"};

inline constexpr std::array<std::string_view, kCvss2Count> kCvss2Names{
    "cvss2_base_score",        "cvss2_impact_subscore", "cvss2_exploitability_subscore",
    "cvss2_access_vector",     "cvss2_access_complexity", "cvss2_authentication",
    "cvss2_conf_impact",       "cvss2_integ_impact",    "cvss2_avail_impact"};

inline constexpr std::array<std::string_view, kCvss3Count> kCvss3Names{
    "cvss3_base_score",          "cvss3_impact_subscore", "cvss3_exploitability_subscore",
    "cvss3_attack_vector",       "cvss3_attack_complexity", "cvss3_privileges_required",
    "cvss3_user_interaction",    "cvss3_scope",           "cvss3_conf_impact",
    "cvss3_integ_impact",        "cvss3_avail_impact"};

inline constexpr std::array<std::string_view, kDatabaseCount> kDatabaseNames{
    "db_reference_count",          "db_cpe_entry_count",       "db_distinct_vendor_count",
    "db_distinct_product_count",   "db_cwe_count",             "db_description_length",
    "db_has_exploit_reference",    "db_has_vendor_advisory",   "db_has_patch_reference",
    "db_description_remote",       "db_description_execute"};

struct FeatureSpec {
    std::size_t index;
    std::string name;
    Category category;
    Kind kind;

    friend bool operator==(const FeatureSpec&, const FeatureSpec&) = default;
};

/// Ordered 79-column layout: words, Twitter statistics, CVSS 2, CVSS 3, NVD.
class FeatureSchema {
public:
    explicit FeatureSchema(const std::vector<std::string>& keywords) {
        if (keywords.size() != kWordCount) throw std::invalid_argument("schema needs exactly 36 keywords");
        for (const auto& k : keywords) add("word_" + k, Category::Words, Kind::Numeric);
        for (auto n : kTwitterStatNames) add("tw_" + std::string(n), Category::TwitterStats, Kind::Numeric);
        for (std::size_t i = 0; i < kCvss2Count; ++i) {
            add(std::string(kCvss2Names[i]), Category::Cvss2, i < 3 ? Kind::Numeric : Kind::Ordinal);
        }
        for (std::size_t i = 0; i < kCvss3Count; ++i) {
            add(std::string(kCvss3Names[i]), Category::Cvss3, i < 3 ? Kind::Numeric : Kind::Ordinal);
        }
        for (std::size_t i = 0; i < kDatabaseCount; ++i) {
            add(std::string(kDatabaseNames[i]), Category::Database, i < 6 ? Kind::Numeric : Kind::Binary);
        }
    }

    std::size_t size() const { return entries_.size(); }
    const FeatureSpec& operator[](std::size_t i) const { return entries_.at(i); }
    const std::vector<FeatureSpec>& entries() const { return entries_; }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& e : entries_) out.push_back(e.name);
        return out;
    }

    friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;

private:
    void add(std::string name, Category c, Kind k) { entries_.push_back({entries_.size(), std::move(name), c, k}); }

    std::vector<FeatureSpec> entries_;
};

}  // namespace expred::features
