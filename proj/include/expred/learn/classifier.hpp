#pragma once

// Common fit / score / predict surface over the three learners, plus the
// versioned JSON model document.

#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "expred/common.hpp"
#include "expred/learn/gbdt.hpp"
#include "expred/learn/linear.hpp"
#include "expred/matrix.hpp"

namespace expred::learn {

enum class ClassifierKind { Logistic, LinearSvm, Gbdt };

inline std::string_view classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::Logistic: return "LOGISTIC";
        case ClassifierKind::LinearSvm: return "LINEAR_SVM";
        case ClassifierKind::Gbdt: return "GBDT";
    }
    return "?";
}

inline std::optional<ClassifierKind> parse_classifier(std::string_view name) {
    const std::string up = to_upper(trim(name));
    for (auto k : {ClassifierKind::Logistic, ClassifierKind::LinearSvm, ClassifierKind::Gbdt}) {
        if (classifier_name(k) == up) return k;
    }
    return std::nullopt;
}

/// Learner kind, named hyperparameters and seed. The constructor fills in
/// defaults and rejects unknown names or out-of-range values.
class ClassifierSpec {
public:
    using Params = std::map<std::string, double>;

    explicit ClassifierSpec(ClassifierKind kind, const Params& overrides = {}, std::uint64_t seed = 0)
        : kind_(kind), params_(defaults(kind)), seed_(seed) {
        for (const auto& [name, value] : overrides) {
            auto it = params_.find(name);
            if (it == params_.end()) {
                throw InputError("unknown hyperparameter '" + name + "' for " + std::string(classifier_name(kind)));
            }
            it->second = value;
        }
        validate();
    }

    static Params defaults(ClassifierKind kind) {
        switch (kind) {
            case ClassifierKind::Logistic:
                return {{"lambda", 1e-3}, {"learning_rate", 0.1}, {"tol", 1e-6}, {"max_iters", 5000}};
            case ClassifierKind::LinearSvm: return {{"lambda", 1e-3}, {"epochs", 200}, {"learning_rate", 0.1}};
            case ClassifierKind::Gbdt:
                return {{"n_trees", 200}, {"max_depth", 4}, {"shrinkage", 0.1}, {"min_leaf", 5}, {"l2", 1.0}};
        }
        return {};
    }

    ClassifierKind kind() const { return kind_; }
    const Params& hyperparameters() const { return params_; }
    std::uint64_t seed() const { return seed_; }
    ClassifierSpec with_seed(std::uint64_t seed) const {
        ClassifierSpec s = *this;
        s.seed_ = seed;
        return s;
    }

    LogisticParams logistic() const {
        return {params_.at("lambda"), params_.at("learning_rate"), params_.at("tol"),
                static_cast<int>(params_.at("max_iters"))};
    }
    SvmParams svm() const {
        return {params_.at("lambda"), static_cast<int>(params_.at("epochs")), params_.at("learning_rate")};
    }
    GbdtParams gbdt() const {
        return {static_cast<int>(params_.at("n_trees")), static_cast<int>(params_.at("max_depth")),
                params_.at("shrinkage"), static_cast<int>(params_.at("min_leaf")), params_.at("l2")};
    }

    /// Higher-is-positive scores are probabilities (LOGISTIC, GBDT) or margins (LINEAR_SVM).
    bool scores_are_probabilities() const { return kind_ != ClassifierKind::LinearSvm; }
    double default_threshold() const { return scores_are_probabilities() ? 0.5 : 0.0; }

    friend bool operator==(const ClassifierSpec&, const ClassifierSpec&) = default;

private:
    void validate() const {
        const auto need = [&](const char* name, bool ok, const char* rule) {
            if (!ok) {
                throw InputError(std::string(classifier_name(kind_)) + " hyperparameter " + name + " must be " + rule);
            }
        };
        const auto integral = [](double v) { return std::floor(v) == v; };
        for (const auto& [name, v] : params_) {
            if (!std::isfinite(v)) throw InputError("hyperparameter " + name + " must be finite");
        }
        switch (kind_) {
            case ClassifierKind::Logistic:
                need("lambda", params_.at("lambda") >= 0, ">= 0");
                need("learning_rate", params_.at("learning_rate") > 0, "> 0");
                need("tol", params_.at("tol") > 0, "> 0");
                need("max_iters", params_.at("max_iters") >= 1 && integral(params_.at("max_iters")), "an integer >= 1");
                break;
            case ClassifierKind::LinearSvm:
                need("lambda", params_.at("lambda") >= 0, ">= 0");
                need("learning_rate", params_.at("learning_rate") > 0, "> 0");
                need("epochs", params_.at("epochs") >= 1 && integral(params_.at("epochs")), "an integer >= 1");
                break;
            case ClassifierKind::Gbdt:
                need("n_trees", params_.at("n_trees") >= 0 && integral(params_.at("n_trees")), "an integer >= 0");
                need("max_depth", params_.at("max_depth") >= 1 && integral(params_.at("max_depth")), "an integer >= 1");
                need("shrinkage", params_.at("shrinkage") > 0, "> 0");
                need("min_leaf", params_.at("min_leaf") >= 1 && integral(params_.at("min_leaf")), "an integer >= 1");
                need("l2", params_.at("l2") >= 0, ">= 0");
                break;
        }
    }

    ClassifierKind kind_;
    Params params_;
    std::uint64_t seed_;
};

class TrainedModel {
public:
    TrainedModel(ClassifierSpec spec, std::variant<LinearModel, GbdtModel> params, std::size_t dim)
        : spec_(std::move(spec)), params_(std::move(params)), dim_(dim) {}

    const ClassifierSpec& spec() const { return spec_; }
    std::size_t dimension() const { return dim_; }
    const LinearModel* linear() const { return std::get_if<LinearModel>(&params_); }
    const GbdtModel* gbdt() const { return std::get_if<GbdtModel>(&params_); }

    double score_row(std::span<const double> x) const {
        if (const auto* lm = linear()) {
            const double z = lm->margin(x);
            return spec_.kind() == ClassifierKind::Logistic ? sigmoid(z) : z;
        }
        return sigmoid(gbdt()->raw_score(x));
    }

    friend bool operator==(const TrainedModel&, const TrainedModel&) = default;

private:
    ClassifierSpec spec_;
    std::variant<LinearModel, GbdtModel> params_;
    std::size_t dim_;
};

inline TrainedModel fit(const ClassifierSpec& spec, const Matrix& X, const Labels& y) {
    if (X.rows() != y.size()) throw PipelineError("X and y row counts differ");
    if (X.rows() < 2) throw PipelineError("need at least 2 training rows");
    const auto positives = std::count(y.begin(), y.end(), 1);
    if (positives == 0 || positives == static_cast<std::ptrdiff_t>(y.size())) {
        throw PipelineError("training labels contain a single class");
    }
    for (double v : X.data()) {
        if (!std::isfinite(v)) throw PipelineError("non-finite feature value in training data");
    }
    switch (spec.kind()) {
        case ClassifierKind::Logistic: return {spec, fit_logistic(X, y, spec.logistic()), X.cols()};
        case ClassifierKind::LinearSvm: return {spec, fit_linear_svm(X, y, spec.svm(), spec.seed()), X.cols()};
        case ClassifierKind::Gbdt: return {spec, fit_gbdt(X, y, spec.gbdt()), X.cols()};
    }
    throw PipelineError("unknown classifier kind");
}

inline std::vector<double> score(const TrainedModel& model, const Matrix& X) {
    if (X.cols() != model.dimension()) {
        throw PipelineError("score: expected " + std::to_string(model.dimension()) + " features, got " +
                            std::to_string(X.cols()));
    }
    std::vector<double> out(X.rows());
    for (std::size_t i = 0; i < X.rows(); ++i) out[i] = model.score_row(X.row(i));
    return out;
}

/// score >= threshold -> positive. Default threshold is 0.5 for probabilities, 0 for margins.
inline Labels predict(const TrainedModel& model, const Matrix& X, std::optional<double> threshold = std::nullopt) {
    const double t = threshold.value_or(model.spec().default_threshold());
    const auto s = score(model, X);
    Labels out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] >= t ? 1 : 0;
    return out;
}

// ------------------------------------------------------------
// persistence
// ------------------------------------------------------------

inline constexpr int kModelFormatVersion = 1;

inline nlohmann::json model_to_json(const TrainedModel& m) {
    nlohmann::json j{{"format", "expred-model"},
                     {"version", kModelFormatVersion},
                     {"kind", classifier_name(m.spec().kind())},
                     {"hyperparameters", m.spec().hyperparameters()},
                     {"seed", m.spec().seed()},
                     {"dimension", m.dimension()}};
    if (const auto* lm = m.linear()) {
        j["weights"] = lm->weights;
        j["bias"] = lm->bias;
    } else {
        const auto* g = m.gbdt();
        j["base_score"] = g->base_score;
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& t : g->trees) {
            nlohmann::json nodes = nlohmann::json::array();
            for (const auto& n : t.nodes) nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
            trees.push_back(std::move(nodes));
        }
        j["trees"] = std::move(trees);
    }
    return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    try {
        if (j.at("format") != "expred-model") throw InputError("not a model document");
        if (j.at("version").get<int>() != kModelFormatVersion) {
            throw InputError("unsupported model version " + j.at("version").dump());
        }
        const auto kind = parse_classifier(j.at("kind").get<std::string>());
        if (!kind) throw InputError("unknown model kind " + j.at("kind").dump());
        ClassifierSpec spec(*kind, j.at("hyperparameters").get<ClassifierSpec::Params>(), j.at("seed").get<std::uint64_t>());
        const auto dim = j.at("dimension").get<std::size_t>();
        if (*kind == ClassifierKind::Gbdt) {
            GbdtModel g;
            g.base_score = j.at("base_score").get<double>();
            for (const auto& t : j.at("trees")) {
                RegressionTree tree;
                for (const auto& n : t) {
                    tree.nodes.push_back({n.at(0).get<int>(), n.at(1).get<double>(), n.at(2).get<int>(),
                                          n.at(3).get<int>(), n.at(4).get<double>()});
                }
                g.trees.push_back(std::move(tree));
            }
            return {spec, std::move(g), dim};
        }
        LinearModel lm{j.at("weights").get<std::vector<double>>(), j.at("bias").get<double>()};
        if (lm.weights.size() != dim) throw InputError("model weight count does not match dimension");
        return {spec, std::move(lm), dim};
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed model document: ") + e.what());
    }
}

}  // namespace expred::learn
