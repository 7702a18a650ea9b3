#pragma once

// Per-CVE instances and their assembly from records, tweets and labels.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "expred/features/extract.hpp"
#include "expred/features/schema.hpp"
#include "expred/groundtruth.hpp"
#include "expred/ingest/csv.hpp"
#include "expred/matrix.hpp"
#include "expred/records.hpp"

namespace expred {

struct Instance {
    CveId cve_id;
    std::vector<double> features;
    bool label_rw = false;
    bool label_poc = false;
    int year = 0;

    bool label(ExploitKind kind) const { return kind == ExploitKind::Rw ? label_rw : label_poc; }
};

struct YearRange {
    int first = CveId::kMinYear;
    int last = CveId::kMaxYear;
    bool contains(int y) const { return y >= first && y <= last; }
};

/// Instances sorted by CVE id; every instance has schema.size() features.
class Dataset {
public:
    Dataset(features::FeatureSchema schema, std::vector<Instance> instances)
        : schema_(std::move(schema)), instances_(std::move(instances)) {
        std::sort(instances_.begin(), instances_.end(),
                  [](const Instance& a, const Instance& b) { return a.cve_id < b.cve_id; });
        for (std::size_t i = 0; i < instances_.size(); ++i) {
            if (instances_[i].features.size() != schema_.size()) {
                throw PipelineError(instances_[i].cve_id.str() + ": feature width " +
                                    std::to_string(instances_[i].features.size()) + " does not match schema width " +
                                    std::to_string(schema_.size()));
            }
            if (i > 0 && instances_[i - 1].cve_id == instances_[i].cve_id) {
                throw PipelineError("duplicate instance " + instances_[i].cve_id.str());
            }
        }
    }

    const features::FeatureSchema& schema() const { return schema_; }
    const std::vector<Instance>& instances() const { return instances_; }
    std::size_t size() const { return instances_.size(); }

    /// Instances whose year is in `years`, order preserved.
    Dataset filter_years(const std::set<int>& years) const {
        std::vector<Instance> kept;
        for (const auto& inst : instances_) {
            if (years.count(inst.year)) kept.push_back(inst);
        }
        return Dataset(schema_, std::move(kept));
    }

private:
    features::FeatureSchema schema_;
    std::vector<Instance> instances_;
};

struct AssemblyReport {
    std::set<CveId> missing_records;  // tweeted, in range, but no NVD record
    std::size_t tweets_used = 0;      // tweets contributing to at least one instance
    std::size_t out_of_range_mentions = 0;
};

/// One instance per CVE that has an NVD record, an id year inside
/// `year_range`, and at least one tweet mentioning it.
inline Dataset assemble_dataset(const std::vector<CveRecord>& records, const std::vector<TweetRecord>& tweets,
                                const LabelSet& labels, YearRange year_range, const features::KeywordList& keywords,
                                AssemblyReport* report = nullptr) {
    AssemblyReport local;
    AssemblyReport& rep = report ? *report : local;

    std::map<CveId, const CveRecord*> by_id;
    for (const auto& r : records) by_id.emplace(r.id, &r);

    std::map<CveId, std::vector<const TweetRecord*>> mentions;
    for (const auto& t : tweets) {
        bool used = false;
        for (const auto& id : t.mentioned_cves) {
            if (!year_range.contains(id.year())) {
                ++rep.out_of_range_mentions;
                continue;
            }
            if (!by_id.count(id)) {
                rep.missing_records.insert(id);
                continue;
            }
            mentions[id].push_back(&t);
            used = true;
        }
        if (used) ++rep.tweets_used;
    }

    std::vector<Instance> instances;
    instances.reserve(mentions.size());
    for (const auto& [id, ts] : mentions) {
        const CveRecord& rec = *by_id.at(id);
        instances.push_back(Instance{id, features::feature_row(rec, ts, keywords), labels.is_positive(id, ExploitKind::Rw),
                                     labels.is_positive(id, ExploitKind::Poc), id.year()});
    }
    return Dataset(features::FeatureSchema(keywords.terms()), std::move(instances));
}

struct DesignMatrix {
    Matrix X;
    Labels y_rw;
    Labels y_poc;

    const Labels& labels(ExploitKind kind) const { return kind == ExploitKind::Rw ? y_rw : y_poc; }
};

/// Rows in dataset order, columns in schema order.
inline DesignMatrix build_matrix(const Dataset& ds) {
    DesignMatrix m{Matrix(0, ds.schema().size()), {}, {}};
    for (const auto& inst : ds.instances()) {
        if (inst.features.size() != ds.schema().size()) {
            throw PipelineError("instance " + inst.cve_id.str() + " does not match the feature schema");
        }
        m.X.append_row(inst.features);
        m.y_rw.push_back(inst.label_rw ? 1 : 0);
        m.y_poc.push_back(inst.label_poc ? 1 : 0);
    }
    return m;
}

/// cve_id, the 79 schema columns, label_rw, label_poc.
inline std::string feature_matrix_csv(const Dataset& ds) {
    csv::Row header{"cve_id"};
    for (const auto& n : ds.schema().names()) header.push_back(n);
    header.push_back("label_rw");
    header.push_back("label_poc");
    std::string out = csv::join(header) + "\n";
    for (const auto& inst : ds.instances()) {
        csv::Row row{inst.cve_id.str()};
        for (double v : inst.features) row.push_back(format_double(v));
        row.push_back(inst.label_rw ? "1" : "0");
        row.push_back(inst.label_poc ? "1" : "0");
        out += csv::join(row) + "\n";
    }
    return out;
}

}  // namespace expred
