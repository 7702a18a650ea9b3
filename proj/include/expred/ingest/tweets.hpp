#pragma once

// Line-delimited JSON tweet dump reader.

#include <string>
#include <vector>

#include <json.hpp>

#include "expred/ingest/diagnostics.hpp"
#include "expred/records.hpp"

namespace expred::ingest {

namespace tweet_detail {

using nlohmann::json;

inline std::string id_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(std::string("missing field ") + key);
    if (it->is_string() && !it->get<std::string>().empty()) return it->get<std::string>();
    if (it->is_number_unsigned()) return std::to_string(it->get<std::uint64_t>());
    if (it->is_number_integer() && it->get<std::int64_t>() >= 0) return std::to_string(it->get<std::int64_t>());
    throw InputError(std::string("field ") + key + " must be a non-empty string or id number");
}

inline std::int64_t count_field(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw InputError(std::string("missing field ") + key);
    if (!it->is_number_integer()) throw InputError(std::string("field ") + key + " must be an integer");
    const auto v = it->get<std::int64_t>();
    if (v < 0) throw InputError(std::string("field ") + key + " is negative");
    return v;
}

}  // namespace tweet_detail

/// Validates and converts one JSON object into a TweetRecord.
inline TweetRecord tweet_from_json(const nlohmann::json& obj) {
    using namespace tweet_detail;
    if (!obj.is_object()) throw InputError("line is not a JSON object");
    TweetRecord t;
    t.tweet_id = id_field(obj, "tweet_id");
    t.author_id = id_field(obj, "author_id");
    auto posted = obj.find("posted_at");
    if (posted == obj.end() || !posted->is_string()) throw InputError("missing field posted_at");
    auto ts = parse_timestamp(posted->get<std::string>());
    if (!ts) throw InputError("unparseable posted_at '" + posted->get<std::string>() + "'");
    t.posted_at = *ts;
    auto text = obj.find("text");
    if (text == obj.end() || !text->is_string()) throw InputError("missing field text");
    t.text = text->get<std::string>();
    t.retweet_count = count_field(obj, "retweet_count");
    t.favorite_count = count_field(obj, "favorite_count");
    t.author_followers = count_field(obj, "author_followers");
    t.author_friends = count_field(obj, "author_friends");
    auto verified = obj.find("author_verified");
    if (verified == obj.end() || !verified->is_boolean()) throw InputError("missing boolean field author_verified");
    t.author_verified = verified->get<bool>();
    t.hashtag_count = count_field(obj, "hashtag_count");
    t.url_count = count_field(obj, "url_count");
    t.mentioned_cves = extract_cve_ids(t.text);
    return t;
}

inline nlohmann::json tweet_to_json(const TweetRecord& t) {
    return {{"tweet_id", t.tweet_id},
            {"author_id", t.author_id},
            {"posted_at", format_timestamp(t.posted_at)},
            {"text", t.text},
            {"retweet_count", t.retweet_count},
            {"favorite_count", t.favorite_count},
            {"author_followers", t.author_followers},
            {"author_friends", t.author_friends},
            {"author_verified", t.author_verified},
            {"hashtag_count", t.hashtag_count},
            {"url_count", t.url_count}};
}

/// Blank lines are ignored; every other line is one record.
inline std::vector<TweetRecord> load_tweets(const std::string& path, Diagnostics& diag) {
    const std::string text = read_file(path);
    std::vector<TweetRecord> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) end = text.size();
        const std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
        pos = end + 1;
        ++line_no;
        if (line.empty()) continue;
        ++diag.records_in;
        try {
            out.push_back(tweet_from_json(nlohmann::json::parse(line)));
            ++diag.records_out;
        } catch (const nlohmann::json::exception& e) {
            diag.skip(path, "line " + std::to_string(line_no), e.what());
        } catch (const InputError& e) {
            diag.skip(path, "line " + std::to_string(line_no), e.what());
        }
    }
    return out;
}

}  // namespace expred::ingest
