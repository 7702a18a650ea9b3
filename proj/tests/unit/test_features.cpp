#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "expred/dataset.hpp"
#include "expred/features/extract.hpp"
#include "expred/features/standardizer.hpp"
#include "scratch.hpp"

using namespace expred;
using namespace expred::features;

namespace {

TweetRecord tweet(std::string author, std::string text, std::int64_t retweets = 0, std::int64_t followers = 0) {
    TweetRecord t;
    t.tweet_id = author + text;
    t.author_id = std::move(author);
    t.text = std::move(text);
    t.retweet_count = retweets;
    t.author_followers = followers;
    t.mentioned_cves = extract_cve_ids(t.text);
    return t;
}

std::vector<const TweetRecord*> ptrs(const std::vector<TweetRecord>& ts) {
    std::vector<const TweetRecord*> out;
    for (const auto& t : ts) out.push_back(&t);
    return out;
}

std::size_t index_of(const KeywordList& kw, const std::string& term) {
    const auto& t = kw.terms();
    return static_cast<std::size_t>(std::find(t.begin(), t.end(), term) - t.begin());
}

CveRecord record(const std::string& id) {
    return CveRecord{CveId::from_string(id), *parse_date("2018-03-01"), "", {}, {}, {}, {}, {}};
}

// Occurrences of `word` in `text` that are not glued to other letters or digits.
double substring_scan(std::string text, const std::string& word) {
    std::transform(text.begin(), text.end(), text.begin(), ::tolower);
    const auto alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; };
    double n = 0;
    for (std::size_t at = text.find(word); at != std::string::npos; at = text.find(word, at + 1)) {
        const bool left = at == 0 || !alnum(text[at - 1]);
        const bool right = at + word.size() == text.size() || !alnum(text[at + word.size()]);
        if (left && right) n += 1;
    }
    return n;
}

std::vector<TweetRecord> random_tweets(Rng& rng, std::size_t n, std::size_t users) {
    const auto keywords = KeywordList::defaults();
    const auto& terms = keywords.terms();
    const std::vector<std::string> filler{"the", "a", "CVE-2018-0001", "zeroday", "patched", "!!", "#", "http://x.y/z"};
    const std::vector<std::string> seps{" ", ", ", ".", "\n", "#", "-", "/"};
    std::vector<TweetRecord> out;
    for (std::size_t i = 0; i < n; ++i) {
        std::string text;
        const std::size_t words = 1 + rng.below(12);
        for (std::size_t w = 0; w < words; ++w) {
            std::string tok = rng.below(2) ? terms[rng.below(terms.size())] : filler[rng.below(filler.size())];
            if (rng.below(4) == 0) std::transform(tok.begin(), tok.end(), tok.begin(), ::toupper);
            text += tok + seps[rng.below(seps.size())];
        }
        auto t = tweet("u" + std::to_string(rng.below(users)), text, static_cast<std::int64_t>(rng.below(50)),
                       static_cast<std::int64_t>(rng.below(1000)));
        t.favorite_count = static_cast<std::int64_t>(rng.below(20));
        t.author_verified = rng.below(5) == 0;
        t.hashtag_count = static_cast<std::int64_t>(rng.below(3));
        t.url_count = static_cast<std::int64_t>(rng.below(2));
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace

TEST(Schema, LayoutAndKinds) {
    const FeatureSchema s(KeywordList::defaults().terms());
    ASSERT_EQ(s.size(), 79u);
    EXPECT_EQ(s[0].name, "word_0day");
    EXPECT_EQ(s[kTwitterBegin].name, "tw_tweet_count");
    EXPECT_EQ(s[kCvss2Begin + 3].kind, Kind::Ordinal);
    EXPECT_EQ(s[kCvss3Begin].category, Category::Cvss3);
    EXPECT_EQ(s[78].kind, Kind::Binary);
    EXPECT_THROW(FeatureSchema({"a"}), std::invalid_argument);
}

TEST(Keywords, Validation) {
    auto terms = KeywordList::defaults().terms();
    EXPECT_EQ(terms.size(), 36u);
    auto dup = terms;
    dup[1] = dup[0];
    EXPECT_THROW(KeywordList{dup}, InputError);
    auto upper = terms;
    upper[0] = "Zero";
    EXPECT_THROW(KeywordList{upper}, InputError);
    terms.pop_back();
    EXPECT_THROW(KeywordList{terms}, InputError);
}

TEST(Keywords, FromFile) {
    const auto dir = scratch::dir();
    std::string text;
    for (int i = 0; i < 36; ++i) text += "  w" + std::to_string(i) + "\n";
    const auto kw = KeywordList::from_file(scratch::write(dir / "kw.txt", text).string());
    EXPECT_EQ(kw[35], "w35");
    EXPECT_THROW(KeywordList::from_file(scratch::write(dir / "gap.txt", "a\n\nb\n").string()), InputError);
}

TEST(Bow, ExampleTweet) {
    const auto kw = KeywordList::defaults();
    const std::vector<TweetRecord> ts{tweet("u", "new 0day fix available")};
    const auto v = bow_features(ptrs(ts), kw);
    for (std::size_t i = 0; i < kWordCount; ++i) {
        const bool hit = i == index_of(kw, "0day") || i == index_of(kw, "fix");
        EXPECT_EQ(v[i], hit ? 1.0 : 0.0) << kw[i];
    }
}

TEST(Bow, NoTweets) {
    const auto v = bow_features({}, KeywordList::defaults());
    EXPECT_TRUE(std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
}

TEST(Bow, MatchesSubstringScan) {
    Rng rng(4);
    const auto kw = KeywordList::defaults();
    for (int trial = 0; trial < 20; ++trial) {
        const auto ts = random_tweets(rng, 50, 10);
        const auto v = bow_features(ptrs(ts), kw);
        for (std::size_t i = 0; i < kWordCount; ++i) {
            double expect = 0;
            for (const auto& t : ts) expect += substring_scan(t.text, kw[i]);
            EXPECT_EQ(v[i], expect) << kw[i];
        }
    }
}

TEST(TwitterStats, SameUserTwice) {
    const std::vector<TweetRecord> ts{tweet("u1", "a", 3, 100), tweet("u1", "b", 5, 100)};
    const auto v = twitter_stats(ptrs(ts));
    EXPECT_EQ(v[0], 2);    // tweet_count
    EXPECT_EQ(v[1], 1);    // distinct users
    EXPECT_EQ(v[2], 8);    // retweet_sum
    EXPECT_EQ(v[3], 5);    // retweet_max
    EXPECT_EQ(v[6], 100);  // followers_sum
    EXPECT_EQ(v[8], 100);  // followers_mean
}

TEST(TwitterStats, NoTweets) {
    const auto v = twitter_stats({});
    EXPECT_TRUE(std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; }));
}

TEST(TwitterStats, MatchesRecomputation) {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto ts = random_tweets(rng, 30, 7);
        const auto v = twitter_stats(ptrs(ts));

        std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) { return a.author_id < b.author_id; });
        std::vector<double> expect(12, 0.0);
        expect[0] = static_cast<double>(ts.size());
        for (std::size_t i = 0; i < ts.size();) {
            std::size_t j = i;
            std::int64_t followers = 0;
            bool verified = false;
            for (; j < ts.size() && ts[j].author_id == ts[i].author_id; ++j) {
                followers = std::max(followers, ts[j].author_followers);
                verified = verified || ts[j].author_verified;
            }
            expect[1] += 1;
            expect[6] += static_cast<double>(followers);
            expect[7] = std::max(expect[7], static_cast<double>(followers));
            expect[9] += verified;
            i = j;
        }
        for (const auto& t : ts) {
            expect[2] += static_cast<double>(t.retweet_count);
            expect[3] = std::max(expect[3], static_cast<double>(t.retweet_count));
            expect[4] += static_cast<double>(t.favorite_count);
            expect[5] = std::max(expect[5], static_cast<double>(t.favorite_count));
            expect[10] += static_cast<double>(t.hashtag_count);
            expect[11] += static_cast<double>(t.url_count);
        }
        expect[8] = expect[6] / expect[1];
        for (std::size_t k = 0; k < 12; ++k) EXPECT_DOUBLE_EQ(v[k], expect[k]) << kTwitterStatNames[k];
    }
}

TEST(CvssFeatures, V2Example) {
    auto rec = record("CVE-2018-0001");
    rec.cvss2 = parse_cvss2_vector("AV:N/AC:L/Au:N/C:P/I:P/A:P");
    rec.cvss2->base_score = 7.5;
    const auto v = cvss2_features(rec);
    EXPECT_EQ(v[0], 7.5);
    EXPECT_EQ(std::vector<double>(v.begin() + 3, v.end()), (std::vector<double>{2, 2, 2, 1, 1, 1}));
}

TEST(CvssFeatures, AbsentVectorsAreMissing) {
    const auto rec = record("CVE-2018-0001");
    const auto v3 = cvss3_features(rec);
    EXPECT_EQ(v3.size(), 11u);
    EXPECT_TRUE(std::all_of(v3.begin(), v3.end(), [](double x) { return x == -1.0; }));
    const auto v2 = cvss2_features(rec);
    EXPECT_TRUE(std::all_of(v2.begin(), v2.end(), [](double x) { return x == -1.0; }));
}

TEST(CvssFeatures, MatchesLetterTables) {
    // Severity order of the vector letters, written out per metric.
    const std::map<std::string, std::string> v2_order{{"AV", "LAN"}, {"AC", "HML"}, {"Au", "MSN"},
                                                      {"C", "NPC"},  {"I", "NPC"},  {"A", "NPC"}};
    const std::map<std::string, std::string> v3_order{{"AV", "PLAN"}, {"AC", "HL"}, {"PR", "HLN"}, {"UI", "RN"},
                                                      {"S", "UC"},    {"C", "NLH"}, {"I", "NLH"},  {"A", "NLH"}};
    const std::vector<std::string> v2_keys{"AV", "AC", "Au", "C", "I", "A"};
    const std::vector<std::string> v3_keys{"AV", "AC", "PR", "UI", "S", "C", "I", "A"};
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        auto rec = record("CVE-2017-0001");
        std::string vec2, vec3 = "CVSS:3.0";
        std::vector<double> want2, want3;
        for (const auto& k : v2_keys) {
            const auto& letters = v2_order.at(k);
            const std::size_t pick = rng.below(letters.size());
            vec2 += (vec2.empty() ? "" : "/") + k + ":" + letters[pick];
            want2.push_back(static_cast<double>(pick));
        }
        for (const auto& k : v3_keys) {
            const auto& letters = v3_order.at(k);
            const std::size_t pick = rng.below(letters.size());
            vec3 += "/" + k + ":" + letters[pick];
            want3.push_back(static_cast<double>(pick));
        }
        rec.cvss2 = parse_cvss2_vector(vec2);
        rec.cvss2->base_score = 1.5;
        rec.cvss2->impact_subscore = 2.5;
        rec.cvss2->exploitability_subscore = 3.5;
        rec.cvss3 = parse_cvss3_vector(vec3);
        rec.cvss3->base_score = 9.8;
        const auto f2 = cvss2_features(rec);
        const auto f3 = cvss3_features(rec);
        EXPECT_EQ(std::vector<double>(f2.begin(), f2.begin() + 3), (std::vector<double>{1.5, 2.5, 3.5}));
        EXPECT_EQ(std::vector<double>(f2.begin() + 3, f2.end()), want2) << vec2;
        EXPECT_EQ(f3[0], 9.8);
        EXPECT_EQ(std::vector<double>(f3.begin() + 3, f3.end()), want3) << vec3;
    }
}

TEST(DbFeatures, Example) {
    auto rec = record("CVE-2018-0002");
    rec.references = {{"u1", {"Patch"}}, {"u2", {}}, {"u3", {"Third Party Advisory"}}};
    rec.cpe_entries = {{"acme", "router"}, {"acme", "switch"}};
    rec.description = "Allows remote attackers to execute code";
    const auto v = db_features(rec);
    EXPECT_EQ(v[0], 3);  // references
    EXPECT_EQ(v[2], 1);  // distinct vendors
    EXPECT_EQ(v[3], 2);  // distinct products
    EXPECT_EQ(v[5], 6);  // description tokens
    EXPECT_EQ(v[6], 0);
    EXPECT_EQ(v[8], 1);  // patch reference
    EXPECT_EQ(v[9], 1);
    EXPECT_EQ(v[10], 1);
}

TEST(DbFeatures, EmptyDescription) {
    const auto v = db_features(record("CVE-2018-0003"));
    EXPECT_EQ(v[5], 0);
    EXPECT_EQ(v[9], 0);
    EXPECT_EQ(v[10], 0);
}

TEST(DbFeatures, MatchesRecomputation) {
    Rng rng(17);
    const std::vector<std::string> tags{"Patch", "Exploit", "Vendor Advisory", "Mailing List"};
    const std::vector<std::string> words{"Remote", "code", "EXECUTEd", "via", "crafted", "packet"};
    for (int trial = 0; trial < 30; ++trial) {
        auto rec = record("CVE-2016-0100");
        std::set<std::string> seen_tags, vendors, products;
        for (std::size_t i = rng.below(5); i > 0; --i) {
            Reference r{"u", {}};
            if (rng.below(2)) r.tags.insert(tags[rng.below(tags.size())]);
            seen_tags.insert(r.tags.begin(), r.tags.end());
            rec.references.push_back(r);
        }
        for (std::size_t i = rng.below(6); i > 0; --i) {
            CpeEntry c{"v" + std::to_string(rng.below(3)), "p" + std::to_string(rng.below(3))};
            vendors.insert(c.vendor);
            products.insert(c.vendor + "/" + c.product);
            rec.cpe_entries.push_back(c);
        }
        std::size_t n_words = rng.below(8);
        for (std::size_t i = 0; i < n_words; ++i) rec.description += (i ? "  " : "") + words[rng.below(words.size())];
        for (std::size_t i = rng.below(3); i > 0; --i) rec.cwe_ids.push_back("CWE-" + std::to_string(i));

        std::string lower = rec.description;
        std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
        const std::vector<double> expect{static_cast<double>(rec.references.size()),
                                         static_cast<double>(rec.cpe_entries.size()),
                                         static_cast<double>(vendors.size()),
                                         static_cast<double>(products.size()),
                                         static_cast<double>(rec.cwe_ids.size()),
                                         static_cast<double>(n_words),
                                         static_cast<double>(seen_tags.count("Exploit")),
                                         static_cast<double>(seen_tags.count("Vendor Advisory")),
                                         static_cast<double>(seen_tags.count("Patch")),
                                         lower.find("remote") != std::string::npos ? 1.0 : 0.0,
                                         lower.find("execute") != std::string::npos ? 1.0 : 0.0};
        const auto v = db_features(rec);
        EXPECT_EQ(std::vector<double>(v.begin(), v.end()), expect) << rec.description;
    }
}

TEST(Standardizer, Examples) {
    const Matrix X{{0, 5}, {2, 5}};
    const auto s = fit_standardizer(X);
    EXPECT_EQ(s.mean, (std::vector<double>{1, 5}));
    EXPECT_EQ(s.stddev, (std::vector<double>{1, 0}));
    EXPECT_EQ(apply_standardizer(s, X), (Matrix{{-1, 0}, {1, 0}}));
    EXPECT_THROW(apply_standardizer(s, Matrix{{1, 2, 3}}), std::invalid_argument);
    EXPECT_THROW(fit_standardizer(Matrix(0, 2)), std::invalid_argument);
}

TEST(Standardizer, RandomColumnsBecomeUnit) {
    Rng rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix X(40, 6);
        for (std::size_t i = 0; i < 40; ++i) {
            for (std::size_t j = 0; j < 6; ++j) X(i, j) = 100.0 * j + rng.normal() * (j + 1);
        }
        const auto Z = apply_standardizer(fit_standardizer(X), X);
        for (std::size_t j = 0; j < 6; ++j) {
            double m = 0, v = 0;
            for (std::size_t i = 0; i < 40; ++i) m += Z(i, j);
            m /= 40;
            for (std::size_t i = 0; i < 40; ++i) v += (Z(i, j) - m) * (Z(i, j) - m);
            EXPECT_NEAR(m, 0.0, 1e-9);
            EXPECT_NEAR(std::sqrt(v / 40), 1.0, 1e-9);
        }
    }
}

TEST(Standardizer, UsesOnlyTrainingRows) {
    const Matrix train{{0}, {2}};
    const auto s = fit_standardizer(train);
    EXPECT_EQ(apply_standardizer(s, Matrix{{10}})(0, 0), 9.0);
}

TEST(AssembleDataset, OnlyTweetedRecordsInRange) {
    const auto kw = KeywordList::defaults();
    const std::vector<CveRecord> recs{record("CVE-2018-0001"), record("CVE-2018-0002"), record("CVE-2018-0003")};
    const std::vector<TweetRecord> ts{tweet("a", "CVE-2018-0002 exploit"), tweet("b", "cve-2018-0002 and CVE-2017-0009"),
                                      tweet("c", "CVE-2018-0042 unknown")};
    AssemblyReport rep;
    LabelSet labels;
    labels.add(CveId::from_string("CVE-2018-0002"), Source::Avast);
    const auto ds = assemble_dataset(recs, ts, labels, {2018, 2018}, kw, &rep);
    ASSERT_EQ(ds.size(), 1u);
    const auto& inst = ds.instances()[0];
    EXPECT_EQ(inst.cve_id.str(), "CVE-2018-0002");
    EXPECT_TRUE(inst.label_rw);
    EXPECT_FALSE(inst.label_poc);
    EXPECT_EQ(inst.features[kTwitterBegin], 2.0);
    EXPECT_EQ(inst.features[index_of(kw, "exploit")], 1.0);
    EXPECT_EQ(rep.missing_records, std::set<CveId>{CveId::from_string("CVE-2018-0042")});
    EXPECT_EQ(rep.out_of_range_mentions, 1u);
    EXPECT_EQ(rep.tweets_used, 2u);
}

TEST(AssembleDataset, MissingCvss3UsesSentinels) {
    auto rec = record("CVE-2018-0005");
    rec.cvss2 = parse_cvss2_vector("AV:N/AC:L/Au:N/C:P/I:P/A:P");
    const std::vector<TweetRecord> ts{tweet("a", "CVE-2018-0005")};
    const auto ds = assemble_dataset({rec}, ts, {}, {2018, 2018}, KeywordList::defaults());
    ASSERT_EQ(ds.size(), 1u);
    const auto& f = ds.instances()[0].features;

    std::vector<double> expect(kFeatureCount, 0.0);
    expect[kTwitterBegin] = 1;      // one tweet
    expect[kTwitterBegin + 1] = 1;  // one user
    const std::vector<double> v2{0, 0, 0, 2, 2, 2, 1, 1, 1};
    std::copy(v2.begin(), v2.end(), expect.begin() + kCvss2Begin);
    std::fill(expect.begin() + kCvss3Begin, expect.begin() + kDatabaseBegin, -1.0);
    EXPECT_EQ(f, expect);
}

TEST(BuildMatrix, ShapesAndLabels) {
    const auto kw = KeywordList::defaults();
    const std::vector<TweetRecord> ts{tweet("a", "CVE-2018-0001")};
    const auto ds = assemble_dataset({record("CVE-2018-0001")}, ts, {}, {2018, 2018}, kw);
    const auto m = build_matrix(ds);
    EXPECT_EQ(m.X.rows(), 1u);
    EXPECT_EQ(m.X.cols(), 79u);
    EXPECT_EQ(m.y_rw, Labels{0});

    Instance bad{CveId::from_string("CVE-2018-0009"), {1.0, 2.0}, false, false, 2018};
    EXPECT_THROW(Dataset(FeatureSchema(kw.terms()), {bad}), PipelineError);
}

TEST(BuildMatrix, RowsMatchPerFeatureRecomputation) {
    Rng rng(31);
    const auto kw = KeywordList::defaults();
    std::vector<CveRecord> recs;
    for (int i = 0; i < 15; ++i) {
        auto r = record("CVE-2017-" + std::to_string(1000 + i));
        if (rng.below(2)) r.cvss2 = parse_cvss2_vector("AV:A/AC:H/Au:S/C:N/I:C/A:P");
        r.description = rng.below(2) ? "remote" : "";
        recs.push_back(r);
    }
    auto ts = random_tweets(rng, 60, 9);
    for (auto& t : ts) {
        t.text += " CVE-2017-" + std::to_string(1000 + rng.below(15));
        t.mentioned_cves = extract_cve_ids(t.text);
    }
    const auto ds = assemble_dataset(recs, ts, {}, {2017, 2017}, kw);
    const auto m = build_matrix(ds);
    ASSERT_EQ(m.X.rows(), ds.size());
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const auto id = ds.instances()[i].cve_id;
        std::vector<const TweetRecord*> mine;
        for (const auto& t : ts) {
            if (t.mentioned_cves.count(id)) mine.push_back(&t);
        }
        const auto& rec = *std::find_if(recs.begin(), recs.end(), [&](const auto& r) { return r.id == id; });
        std::vector<double> expect;
        const auto add = [&](const auto& part) { expect.insert(expect.end(), part.begin(), part.end()); };
        add(bow_features(mine, kw));
        add(twitter_stats(mine));
        add(cvss2_features(rec));
        add(cvss3_features(rec));
        add(db_features(rec));
        const auto row = m.X.row(i);
        EXPECT_EQ(std::vector<double>(row.begin(), row.end()), expect) << id.str();
    }
    const auto csv_text = feature_matrix_csv(ds);
    EXPECT_EQ(static_cast<std::size_t>(std::count(csv_text.begin(), csv_text.end(), '\n')), ds.size() + 1);
}
