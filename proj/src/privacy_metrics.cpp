#include "pcclsm/privacy_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pcclsm/error.hpp"

namespace pcclsm {

namespace {

void require_same_shape(const FeatureMatrix& x, const FeatureMatrix& tx) {
    if (x.rows() != tx.rows() || x.cols() != tx.cols()) {
        throw UsageError("privacy metrics need matrices of the same shape (" + std::to_string(x.rows()) + "x" +
                         std::to_string(x.cols()) + " vs " + std::to_string(tx.rows()) + "x" +
                         std::to_string(tx.cols()) + ")");
    }
    if (x.empty()) throw UsageError("privacy metrics need a non-empty matrix");
}

std::vector<std::size_t> ordinal_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<std::size_t> ranks(values.size());
    for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = pos + 1;
    return ranks;
}

std::vector<double> column_means(const FeatureMatrix& m) {
    std::vector<double> means(m.cols(), 0.0);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) means[c] += m(r, c);
    }
    for (double& v : means) v /= static_cast<double>(m.rows());
    return means;
}

struct RankComparison {
    double displacement = 0.0;
    std::size_t unchanged = 0;
};

RankComparison compare_element_ranks(const FeatureMatrix& x, const FeatureMatrix& tx) {
    const auto rx = rank_elements(x);
    const auto rt = rank_elements(tx);
    RankComparison out;
    for (std::size_t c = 0; c < x.cols(); ++c) {
        for (std::size_t r = 0; r < x.rows(); ++r) {
            const auto a = rx.columns[c][r];
            const auto b = rt.columns[c][r];
            out.displacement += static_cast<double>(a > b ? a - b : b - a);
            if (a == b) ++out.unchanged;
        }
    }
    return out;
}

struct MeanRankComparison {
    double displacement = 0.0;
    std::size_t unchanged = 0;
};

MeanRankComparison compare_mean_ranks(const FeatureMatrix& x, const FeatureMatrix& tx) {
    if (x.cols() < 2) throw UsageError("feature rank change needs at least two columns");
    const auto rx = ordinal_ranks(column_means(x));
    const auto rt = ordinal_ranks(column_means(tx));
    MeanRankComparison out;
    for (std::size_t c = 0; c < rx.size(); ++c) {
        out.displacement += static_cast<double>(rx[c] > rt[c] ? rx[c] - rt[c] : rt[c] - rx[c]);
        if (rx[c] == rt[c]) ++out.unchanged;
    }
    return out;
}

}  // namespace

RankTable rank_elements(const FeatureMatrix& m) {
    RankTable table;
    table.columns.reserve(m.cols());
    for (std::size_t c = 0; c < m.cols(); ++c) table.columns.push_back(ordinal_ranks(m.column(c)));
    return table;
}

double value_difference(const FeatureMatrix& x, const FeatureMatrix& tx) {
    require_same_shape(x, tx);
    double diff = 0.0;
    double base = 0.0;
    const auto a = x.data();
    const auto b = tx.data();
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff += (a[i] - b[i]) * (a[i] - b[i]);
        base += a[i] * a[i];
    }
    if (base == 0.0) throw UsageError("value difference is undefined for an all-zero original matrix");
    return std::sqrt(diff) / std::sqrt(base);
}

double rank_position(const FeatureMatrix& x, const FeatureMatrix& tx) {
    require_same_shape(x, tx);
    return compare_element_ranks(x, tx).displacement / static_cast<double>(x.rows() * x.cols());
}

double rank_maintenance(const FeatureMatrix& x, const FeatureMatrix& tx) {
    require_same_shape(x, tx);
    return static_cast<double>(compare_element_ranks(x, tx).unchanged) / static_cast<double>(x.rows() * x.cols());
}

FeatureRankChange feature_rank_change(const FeatureMatrix& x, const FeatureMatrix& tx) {
    require_same_shape(x, tx);
    const auto cmp = compare_mean_ranks(x, tx);
    const auto m = static_cast<double>(x.cols());
    return {cmp.displacement / m, static_cast<double>(cmp.unchanged) / m};
}

PrivacyReport privacy_report(const FeatureMatrix& x, const FeatureMatrix& tx, double elapsed_s) {
    require_same_shape(x, tx);
    PrivacyReport report;
    report.n = x.rows();
    report.m = x.cols();
    report.distortion_time_s = elapsed_s;
    report.vd = value_difference(x, tx);

    const auto elements = compare_element_ranks(x, tx);
    const auto total = static_cast<double>(x.rows() * x.cols());
    report.rp_sum = elements.displacement;
    report.rp = elements.displacement / total;
    report.rk = static_cast<double>(elements.unchanged) / total;

    const auto means = compare_mean_ranks(x, tx);
    report.cp_sum = means.displacement;
    report.cp = means.displacement / static_cast<double>(x.cols());
    report.ck = static_cast<double>(means.unchanged) / static_cast<double>(x.cols());
    return report;
}

}  // namespace pcclsm
