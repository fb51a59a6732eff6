#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pcclsm/dataset.hpp"

namespace pcclsm {

// Pearson correlation of two equal-length vectors (N >= 2). Returns nullopt
// when either vector is constant, where the coefficient is undefined.
std::optional<double> pearson(std::span<const double> f1, std::span<const double> f2);

/// Pairwise Pearson coefficients of a matrix's columns. Entries involving a
/// constant column are undefined (nullopt) off the diagonal; the diagonal is
/// 1 by convention.
class CorrelationMatrix {
public:
    // `constant` flags the columns with undefined correlation; empty = none.
    CorrelationMatrix(std::vector<std::string> column_names, std::vector<std::optional<double>> values,
                      std::vector<bool> constant = {});

    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& column_names() const { return names_; }
    std::optional<double> operator()(std::size_t i, std::size_t j) const { return values_[i * size() + j]; }

    std::vector<std::string> undefined_columns() const;

private:
    std::vector<std::string> names_;
    std::vector<std::optional<double>> values_;
    std::vector<bool> constant_;
};

// `threads` = 0 uses the hardware concurrency. Output does not depend on it.
CorrelationMatrix correlation_matrix(const FeatureMatrix& x, unsigned threads = 1);

struct FeatureScore {
    std::string name;
    std::optional<double> score;  // mean |PCC| against every other feature
};

// Descending by score, ties in original column order, undefined scores last.
std::vector<FeatureScore> rank_features(const CorrelationMatrix& c);

struct DroppedFeature {
    std::string name;
    std::string correlated_with;  // the kept feature that triggered the drop
    double coefficient;           // signed PCC of that pair
};

struct SelectionReport {
    double threshold = 0.0;
    std::vector<std::string> kept;
    std::vector<DroppedFeature> dropped;
    std::vector<std::string> undefined;  // constant columns, never auto-dropped
    std::vector<FeatureScore> ranking;
};

// Greedy scan in column order: a feature is dropped iff |PCC| with an already
// kept earlier feature is strictly above `threshold`. The strongest such pair
// is recorded. Undefined pairs never trigger a drop.
SelectionReport select_by_threshold(const CorrelationMatrix& c, double threshold);

// Restricts `x` to report.kept, preserving x's column order.
FeatureMatrix apply_selection(const FeatureMatrix& x, const SelectionReport& report);

}  // namespace pcclsm
