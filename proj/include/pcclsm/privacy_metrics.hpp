#pragma once

#include <cstddef>
#include <vector>

#include "pcclsm/dataset.hpp"

namespace pcclsm {

// Per-column ordinal ranks (1 = smallest); equal values rank by row index.
struct RankTable {
    std::vector<std::vector<std::size_t>> columns;
};

RankTable rank_elements(const FeatureMatrix& m);

// ||X - TX||_F / ||X||_F.
double value_difference(const FeatureMatrix& x, const FeatureMatrix& tx);

// Mean absolute change of an element's rank within its column.
double rank_position(const FeatureMatrix& x, const FeatureMatrix& tx);

// Fraction of elements whose rank within their column is unchanged.
double rank_maintenance(const FeatureMatrix& x, const FeatureMatrix& tx);

struct FeatureRankChange {
    double cp = 0.0;  // mean absolute change of a column's mean-value rank
    double ck = 0.0;  // fraction of columns whose mean-value rank is unchanged
};

// Ranks the column means within each matrix and compares. Needs m >= 2.
FeatureRankChange feature_rank_change(const FeatureMatrix& x, const FeatureMatrix& tx);

struct PrivacyReport {
    double vd = 0.0;
    double rp = 0.0;
    double rk = 0.0;
    double cp = 0.0;
    double ck = 0.0;
    double distortion_time_s = 0.0;
    std::size_t n = 0;
    std::size_t m = 0;
    // Unnormalized totals behind rp and cp.
    double rp_sum = 0.0;
    double cp_sum = 0.0;
};

PrivacyReport privacy_report(const FeatureMatrix& x, const FeatureMatrix& tx, double elapsed_s);

}  // namespace pcclsm
