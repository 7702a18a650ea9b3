#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "expred/common.hpp"
#include "expred/features/schema.hpp"
#include "expred/ingest/diagnostics.hpp"

namespace expred::features {

/// The 36 bag-of-words terms: lowercase, each a single [a-z0-9] token.
class KeywordList {
public:
    explicit KeywordList(std::vector<std::string> terms) : terms_(std::move(terms)) {
        if (terms_.size() != kWordCount) {
            throw InputError("keyword list must have exactly 36 terms, got " + std::to_string(terms_.size()));
        }
        std::set<std::string> seen;
        for (const auto& t : terms_) {
            if (t.empty()) throw InputError("empty keyword");
            for (char c : t) {
                if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9'))) {
                    throw InputError("keyword '" + t + "' must be a lowercase alphanumeric token");
                }
            }
            if (!seen.insert(t).second) throw InputError("duplicate keyword '" + t + "'");
        }
    }

    /// Default vocabulary. Only the first five are fixed by prior work; the
    /// rest are common exploit-discussion terms and can be replaced via a file.
    static KeywordList defaults() {
        return KeywordList({"0day",     "advisory",   "beware",  "ssl",       "fix",     "exploit",
                            "exploited", "poc",       "patch",   "attack",    "remote",  "rce",
                            "vulnerability", "critical", "malware", "ransomware", "hack", "hacker",
                            "metasploit", "overflow", "injection", "xss",      "sql",     "bypass",
                            "privilege", "escalation", "dos",    "crash",     "update",  "warning",
                            "alert",     "urgent",     "wild",   "backdoor",  "leak",    "ddos"});
    }

    /// One term per line; blank lines are rejected, surrounding whitespace trimmed.
    static KeywordList from_file(const std::string& path) {
        const std::string text = ingest::read_file(path);
        std::vector<std::string> terms;
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            const std::string_view line = trim(std::string_view(text).substr(pos, end - pos));
            if (line.empty()) {
                if (end != text.size()) throw InputError("keyword file " + path + " has an empty line");
            } else {
                terms.emplace_back(line);
            }
            pos = end + 1;
        }
        return KeywordList(std::move(terms));
    }

    const std::vector<std::string>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    const std::string& operator[](std::size_t i) const { return terms_[i]; }

private:
    std::vector<std::string> terms_;
};

}  // namespace expred::features
