#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pcclsm/dataset.hpp"

namespace pcclsm {

enum class ClassifierKind { knn, naive_bayes, decision_tree, random_forest, svm };

std::string_view to_string(ClassifierKind kind);
std::optional<ClassifierKind> parse_classifier_kind(std::string_view name);

// Which classifier to train and with what settings. Hyperparameters not set
// explicitly take the kind's defaults:
//   knn            k = 5
//   naive_bayes    var_floor = 1e-9
//   decision_tree  max_depth = 12, min_samples_split = 2
//   random_forest  n_trees = 100, max_depth = 12, min_samples_split = 2
//   svm            epochs = 20, lambda = 1e-4, learning_rate = 0.1
struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::knn;
    std::map<std::string, double> hyperparameters;
    std::uint64_t seed = 42;

    static ClassifierSpec defaults(ClassifierKind kind, std::uint64_t seed = 42);

    // Explicit value or the kind's default. Throws UsageError for names the
    // kind does not define.
    double get(const std::string& name) const;
    // Every hyperparameter of the kind with its effective value.
    std::map<std::string, double> effective() const;
    // Throws UsageError on unknown names or out-of-range values.
    void validate() const;
};

struct KnnParams {
    FeatureMatrix train_x;
    LabelVector train_y;
    std::size_t k = 5;
};

struct NaiveBayesParams {
    double log_prior[2] = {0.0, 0.0};
    std::vector<double> mean[2];
    std::vector<double> variance[2];
};

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // rows with x[feature] <= threshold go left
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint8_t label = 0;
};

struct DecisionTreeParams {
    std::vector<TreeNode> nodes;  // nodes[0] is the root

    std::size_t depth() const;
};

struct RandomForestParams {
    std::vector<DecisionTreeParams> trees;
};

struct SvmParams {
    std::vector<double> mean;
    std::vector<double> scale;
    std::vector<double> weights;
    double bias = 0.0;
};

using ModelParams = std::variant<KnnParams, NaiveBayesParams, DecisionTreeParams, RandomForestParams, SvmParams>;

class TrainedModel {
public:
    TrainedModel(ClassifierSpec spec, std::vector<std::string> training_columns, ModelParams params,
                 double train_time_s);

    ClassifierKind kind() const { return spec_.kind; }
    const ClassifierSpec& spec() const { return spec_; }
    const std::vector<std::string>& training_columns() const { return columns_; }
    const ModelParams& params() const { return params_; }
    double train_time_s() const { return train_time_s_; }

private:
    ClassifierSpec spec_;
    std::vector<std::string> columns_;
    ModelParams params_;
    double train_time_s_ = 0.0;
};

// Deterministic in (spec.seed, x, y). `threads` only affects the random
// forest, whose trees are seeded individually, so results do not depend on it.
TrainedModel fit(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y,
                 unsigned threads = 1);

LabelVector predict(const TrainedModel& model, const FeatureMatrix& x);

}  // namespace pcclsm
