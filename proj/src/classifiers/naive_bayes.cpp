#include <cmath>

#include "detail.hpp"

namespace pcclsm::detail {

NaiveBayesParams fit_naive_bayes(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y) {
    const double floor = spec.get("var_floor");
    const std::size_t m = x.cols();
    NaiveBayesParams p;
    std::size_t count[2] = {0, 0};
    for (int c = 0; c < 2; ++c) {
        p.mean[c].assign(m, 0.0);
        p.variance[c].assign(m, 0.0);
    }
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto label = y[r];
        ++count[label];
        for (std::size_t j = 0; j < m; ++j) p.mean[label][j] += x(r, j);
    }
    for (int c = 0; c < 2; ++c) {
        for (double& v : p.mean[c]) v /= static_cast<double>(count[c]);
    }
    for (std::size_t r = 0; r < x.rows(); ++r) {
        const auto label = y[r];
        for (std::size_t j = 0; j < m; ++j) {
            const double d = x(r, j) - p.mean[label][j];
            p.variance[label][j] += d * d;
        }
    }
    for (int c = 0; c < 2; ++c) {
        for (double& v : p.variance[c]) v = std::max(v / static_cast<double>(count[c]), floor);
        p.log_prior[c] = std::log(static_cast<double>(count[c]) / static_cast<double>(x.rows()));
    }
    return p;
}

std::uint8_t predict_naive_bayes(const NaiveBayesParams& p, std::span<const double> row) {
    constexpr double log_two_pi = 1.8378770664093454835606594728112;
    double score[2];
    for (int c = 0; c < 2; ++c) {
        double s = p.log_prior[c];
        for (std::size_t j = 0; j < row.size(); ++j) {
            const double d = row[j] - p.mean[c][j];
            s -= 0.5 * (log_two_pi + std::log(p.variance[c][j]) + d * d / p.variance[c][j]);
        }
        score[c] = s;
    }
    return score[1] > score[0] ? 1 : 0;
}

}  // namespace pcclsm::detail
