#include <gtest/gtest.h>

#include "expred/common.hpp"
#include "expred/groundtruth.hpp"

using namespace expred;
using ingest::PocEntry;
using ingest::Vendor;
using ingest::VendorSignatureEntry;

namespace {

CveId cve(const std::string& s) { return CveId::from_string(s); }

VendorSignatureEntry sig(Vendor v, std::initializer_list<const char*> ids) {
    VendorSignatureEntry e{v, "S", "", "", {}, std::nullopt, ""};
    for (const char* id : ids) e.mentioned_cves.insert(cve(id));
    return e;
}

std::set<Source> all_vendors() {
    std::set<Source> out;
    for (Source s : kAllSources) {
        if (is_vendor(s)) out.insert(s);
    }
    return out;
}

}  // namespace

TEST(MergeGroundTruth, SelectionSemantics) {
    const std::vector<VendorSignatureEntry> sigs{sig(Vendor::Avast, {"CVE-2017-0001"}),
                                                 sig(Vendor::Eset, {"CVE-2017-0002"})};
    const auto only_sym = merge_ground_truth({}, sigs, {Source::SymantecAv});
    EXPECT_FALSE(only_sym.is_positive(cve("CVE-2017-0001"), ExploitKind::Rw));
    EXPECT_EQ(only_sym.size(), 0u);

    const auto everyone = merge_ground_truth({}, sigs, all_vendors());
    EXPECT_TRUE(everyone.is_positive(cve("CVE-2017-0002"), ExploitKind::Rw));
    EXPECT_FALSE(everyone.is_positive(cve("CVE-2017-0002"), ExploitKind::Poc));
}

TEST(MergeGroundTruth, PocOnlyFromSelectedArchive) {
    const std::vector<PocEntry> poc{{"1", {cve("CVE-2016-0001"), cve("CVE-2016-0002")}, std::nullopt}};
    const std::vector<VendorSignatureEntry> sigs{sig(Vendor::SymantecIps, {"CVE-2016-0002"})};
    const auto with = merge_ground_truth(poc, sigs, {Source::Edb, Source::SymantecIps});
    EXPECT_TRUE(with.is_positive(cve("CVE-2016-0001"), ExploitKind::Poc));
    EXPECT_FALSE(with.is_positive(cve("CVE-2016-0001"), ExploitKind::Rw));
    EXPECT_EQ(with.entries().at(cve("CVE-2016-0002")).sources,
              (std::set<Source>{Source::Edb, Source::SymantecIps}));

    const auto without = merge_ground_truth(poc, sigs, {Source::SymantecIps});
    EXPECT_TRUE(without.cves(ExploitKind::Poc).empty());
    EXPECT_EQ(without.cves(ExploitKind::Rw), std::set<CveId>{cve("CVE-2016-0002")});
}

TEST(MergeGroundTruth, EmptySelectionIsAnError) {
    EXPECT_THROW(merge_ground_truth({}, {}, {}), InputError);
}

TEST(MergeGroundTruth, MatchesBruteForceOnRandomEvidence) {
    Rng rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<VendorSignatureEntry> sigs;
        std::vector<PocEntry> poc;
        for (int i = 0; i < 20; ++i) {
            const auto v = ingest::kAllVendors[rng.below(ingest::kAllVendors.size())];
            auto e = sig(v, {});
            for (int j = 0; j < 3; ++j) e.mentioned_cves.insert(cve("CVE-2017-" + std::to_string(1000 + rng.below(40))));
            sigs.push_back(e);
        }
        for (int i = 0; i < 10; ++i) {
            poc.push_back({std::to_string(i), {cve("CVE-2017-" + std::to_string(1000 + rng.below(40)))}, std::nullopt});
        }
        std::set<Source> selected;
        for (Source s : kAllSources) {
            if (rng.below(2)) selected.insert(s);
        }
        if (selected.empty()) selected.insert(Source::Avast);
        const auto labels = merge_ground_truth(poc, sigs, selected);

        for (int n = 1000; n < 1040; ++n) {
            const CveId id = cve("CVE-2017-" + std::to_string(n));
            bool rw = false, poc_hit = false;
            for (const auto& s : sigs) rw |= selected.count(source_of(s.vendor)) && s.mentioned_cves.count(id);
            for (const auto& p : poc) poc_hit |= selected.count(Source::Edb) && p.cve_ids.count(id);
            EXPECT_EQ(labels.is_positive(id, ExploitKind::Rw), rw);
            EXPECT_EQ(labels.is_positive(id, ExploitKind::Poc), poc_hit);
        }
    }
}

TEST(Sources, NamesRoundTrip) {
    for (Source s : kAllSources) EXPECT_EQ(parse_source(source_name(s)), s);
    EXPECT_EQ(parse_source("edb"), Source::Edb);
    EXPECT_FALSE(parse_source("NVD"));
}

TEST(Coverage, AvastExample) {
    std::set<CveId> avast, tweeted;
    for (int i = 0; i < 5; ++i) avast.insert(cve("CVE-2016-000" + std::to_string(i)));
    tweeted.insert(cve("CVE-2016-0001"));
    tweeted.insert(cve("CVE-2016-0003"));
    tweeted.insert(cve("CVE-2017-0003"));
    avast.insert(cve("CVE-2014-0001"));  // outside the reported years
    const auto rows = coverage_by_year({{"AVAST", avast}}, tweeted, {2016, 2017});
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].by_year.at(2016), (CoverageCell{2, 5}));
    EXPECT_EQ(rows[0].by_year.at(2017), (CoverageCell{0, 0}));
    EXPECT_EQ(rows[0].row_sum, (CoverageCell{2, 5}));
}

TEST(Coverage, TotalsAreRowSums) {
    Rng rng(5);
    std::map<std::string, std::set<CveId>> per_source;
    std::set<CveId> tweeted;
    for (const char* s : {"A", "B", "C"}) {
        for (int i = 0; i < 60; ++i) {
            const CveId id = cve("CVE-" + std::to_string(2014 + rng.below(6)) + "-" + std::to_string(1000 + rng.below(100)));
            per_source[s].insert(id);
            if (rng.below(3) == 0) tweeted.insert(id);
        }
    }
    const auto rows = coverage_by_year(per_source, tweeted, {2015, 2016, 2017, 2018});
    for (const auto& r : rows) {
        CoverageCell sum;
        for (const auto& [y, c] : r.by_year) {
            sum.tweeted += c.tweeted;
            sum.total += c.total;
            EXPECT_LE(c.tweeted, c.total);
        }
        EXPECT_EQ(r.row_sum, sum);
    }
    const auto csv = coverage_csv(rows);
    EXPECT_NE(csv.find("A,TOTAL,"), std::string::npos);
    const auto j = coverage_json(rows);
    EXPECT_EQ(j.at("rows").size(), 3u);
    EXPECT_EQ(j.at("totals_policy").get<std::string>(), std::string(kCoverageTotalsNote));
}

TEST(Coverage, BucketsGroupVendors) {
    std::map<Source, std::set<CveId>> by{{Source::SymantecAv, {cve("CVE-2017-0001")}},
                                         {Source::SymantecIps, {cve("CVE-2017-0002")}},
                                         {Source::Kaspersky, {cve("CVE-2017-0003")}},
                                         {Source::TrendMicro, {cve("CVE-2017-0004")}},
                                         {Source::Edb, {cve("CVE-2017-0005")}}};
    const auto b = coverage_buckets(by);
    EXPECT_EQ(b.at("SYMANTEC").size(), 2u);
    EXPECT_EQ(b.at("OTHER").size(), 2u);
    EXPECT_EQ(b.at("POC").size(), 1u);
    EXPECT_TRUE(b.at("AVAST").empty());
}

TEST(Intersection, DisjointAndIdentical) {
    const auto d = intersection_report({cve("CVE-2017-0001")}, {cve("CVE-2017-0002")}, {cve("CVE-2017-0003")});
    EXPECT_EQ(d, (IntersectionReport{1, 1, 1, 0, 0, 0, 0}));

    std::set<CveId> s;
    for (int i = 0; i < 4; ++i) s.insert(cve("CVE-2018-100" + std::to_string(i)));
    const auto same = intersection_report(s, s, s);
    EXPECT_EQ(same, (IntersectionReport{0, 0, 0, 0, 0, 0, 4}));
}

TEST(Intersection, MatchesMembershipEnumeration) {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        std::set<CveId> a, b, c;
        std::vector<std::array<bool, 3>> member(50);
        for (int i = 0; i < 50; ++i) {
            const CveId id = cve("CVE-2016-" + std::to_string(2000 + i));
            for (int k = 0; k < 3; ++k) member[i][k] = rng.below(2) == 1;
            if (member[i][0]) a.insert(id);
            if (member[i][1]) b.insert(id);
            if (member[i][2]) c.insert(id);
        }
        IntersectionReport expect;
        for (const auto& m : member) {
            const int n = m[0] + m[1] + m[2];
            if (n == 0) continue;
            if (n == 3) ++expect.a_b_c;
            else if (n == 1) (m[0] ? expect.only_a : m[1] ? expect.only_b : expect.only_c)++;
            else (!m[2] ? expect.a_b : !m[1] ? expect.a_c : expect.b_c)++;
        }
        EXPECT_EQ(intersection_report(a, b, c), expect);
    }
}

TEST(Intersection, JsonNamesRegions) {
    const auto j = intersection_json({1, 2, 3, 4, 5, 6, 7}, "SYMANTEC", "OTHER_VENDORS", "EDB");
    EXPECT_EQ(j.at("regions").at("SYMANTEC & EDB").get<int>(), 5);
    EXPECT_EQ(j.at("regions").at("OTHER_VENDORS only").get<int>(), 2);
    EXPECT_EQ(j.at("union").get<int>(), 28);
}

TEST(LabelSet, JsonRoundTrip) {
    const std::vector<PocEntry> poc{{"9", {cve("CVE-2015-0001")}, std::nullopt}};
    const std::vector<VendorSignatureEntry> sigs{sig(Vendor::Kaspersky, {"CVE-2015-0001", "CVE-2015-0002"}),
                                                 sig(Vendor::Avast, {"CVE-2015-0002"})};
    std::set<Source> all(kAllSources.begin(), kAllSources.end());
    const auto labels = merge_ground_truth(poc, sigs, all);
    EXPECT_EQ(label_set_from_json(nlohmann::json::parse(label_set_json(labels).dump())), labels);
    nlohmann::json bad = label_set_json(labels);
    bad["labels"][0]["sources"][0] = "NOPE";
    EXPECT_THROW(label_set_from_json(bad), InputError);
}
