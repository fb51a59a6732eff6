#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pcclsm/classifiers.hpp"
#include "pcclsm/dataset.hpp"

namespace pcclsm {

// Attack (label 1) is the positive class.
struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;

    std::size_t total() const { return tp + fn + fp + tn; }
    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts confusion(const LabelVector& truth, const LabelVector& predicted);

// nullopt marks a 0/0 ratio.
struct Metrics {
    std::optional<double> recall;
    std::optional<double> precision;
    std::optional<double> specificity;
    std::optional<double> f_score;
    std::optional<double> accuracy;
};

Metrics metrics(const ConfusionCounts& c);

enum class ConfigurationTag { baseline, pcc_only, lsm_only, pcc_lsm };

std::string_view to_string(ConfigurationTag tag);
std::optional<ConfigurationTag> parse_configuration_tag(std::string_view name);
bool uses_selection(ConfigurationTag tag);
bool uses_distortion(ConfigurationTag tag);

struct ClassifierResult {
    ClassifierSpec spec;
    ConfusionCounts counts;
    Metrics scores;
    double train_time_s = 0.0;
    double test_time_s = 0.0;
};

struct EvaluationReport {
    ConfigurationTag tag = ConfigurationTag::baseline;
    std::size_t train_rows = 0;
    std::size_t test_rows = 0;
    std::vector<std::string> columns;
    std::vector<ClassifierResult> results;
};

struct RunOptions {
    // Fit and predict are each timed this many times; the median is reported.
    std::size_t timing_repeats = 3;
    unsigned threads = 1;
};

EvaluationReport run_configuration(ConfigurationTag tag, const FeatureMatrix& train_x, const LabelVector& train_y,
                                   const FeatureMatrix& test_x, const LabelVector& test_y,
                                   const std::vector<ClassifierSpec>& specs, const RunOptions& options = {});

struct UtilityDelta {
    std::string classifier;
    double accuracy_before = 0.0;
    double accuracy_after = 0.0;
    double delta = 0.0;  // after - before
};

struct UtilityComparison {
    ConfigurationTag before = ConfigurationTag::baseline;
    ConfigurationTag after = ConfigurationTag::baseline;
    std::vector<UtilityDelta> deltas;
    double max_abs_delta = 0.0;
};

// Both reports must evaluate the same classifier kinds in the same order on
// test sets of the same size.
UtilityComparison compare_utility(const EvaluationReport& before, const EvaluationReport& after);

}  // namespace pcclsm
