#pragma once

#include <cstdint>

#include "pcclsm/classifiers.hpp"
#include "pcclsm/random.hpp"

namespace pcclsm::detail {

KnnParams fit_knn(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y);
std::uint8_t predict_knn(const KnnParams& p, std::span<const double> row);

NaiveBayesParams fit_naive_bayes(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y);
std::uint8_t predict_naive_bayes(const NaiveBayesParams& p, std::span<const double> row);

struct TreeOptions {
    std::size_t max_depth = 12;
    std::size_t min_samples_split = 2;
    // 0 = consider every feature at each split.
    std::size_t features_per_split = 0;
};

// Grows a CART tree on the given rows (repeats allowed, as in a bootstrap).
DecisionTreeParams grow_tree(const FeatureMatrix& x, const LabelVector& y, std::vector<std::size_t> rows,
                             const TreeOptions& options, Rng& rng);
std::uint8_t predict_tree(const DecisionTreeParams& tree, std::span<const double> row);

RandomForestParams fit_forest(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y,
                              unsigned threads);
std::uint8_t predict_forest(const RandomForestParams& forest, std::span<const double> row);

SvmParams fit_svm(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y);
std::uint8_t predict_svm(const SvmParams& p, std::span<const double> row);

}  // namespace pcclsm::detail
