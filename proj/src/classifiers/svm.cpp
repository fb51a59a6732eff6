#include <cmath>
#include <numeric>

#include "detail.hpp"

namespace pcclsm::detail {

// Linear SVM: stochastic subgradient descent on
//   lambda/2 |w|^2 + mean(max(0, 1 - y (w.x + b)))
// over standardized features, with step eta_t = eta0 / (1 + eta0 * lambda * t).
// The bias is not regularized.
SvmParams fit_svm(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y) {
    const auto epochs = static_cast<std::size_t>(spec.get("epochs"));
    const double lambda = spec.get("lambda");
    const double eta0 = spec.get("learning_rate");
    const std::size_t n = x.rows();
    const std::size_t m = x.cols();

    SvmParams p;
    p.mean.assign(m, 0.0);
    p.scale.assign(m, 1.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < m; ++j) p.mean[j] += x(r, j);
    }
    for (double& v : p.mean) v /= static_cast<double>(n);
    std::vector<double> var(m, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < m; ++j) {
            const double d = x(r, j) - p.mean[j];
            var[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < m; ++j) {
        const double sd = std::sqrt(var[j] / static_cast<double>(n));
        p.scale[j] = sd > 0.0 ? sd : 1.0;
    }

    std::vector<double> z(n * m);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t j = 0; j < m; ++j) z[r * m + j] = (x(r, j) - p.mean[j]) / p.scale[j];
    }

    // weights = s * v, so the per-step decay is a scalar multiply.
    std::vector<double> v(m, 0.0);
    double s = 1.0;
    Rng rng(spec.seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    double t = 0.0;
    for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
        rng.shuffle(std::span<std::size_t>(order));
        for (auto r : order) {
            const double eta = eta0 / (1.0 + eta0 * lambda * t);
            t += 1.0;
            const double target = y[r] ? 1.0 : -1.0;
            const double* row = z.data() + r * m;
            double dot = 0.0;
            for (std::size_t j = 0; j < m; ++j) dot += v[j] * row[j];
            const double score = s * dot + p.bias;
            s *= 1.0 - eta * lambda;
            if (target * score < 1.0) {
                const double step = eta * target / s;
                for (std::size_t j = 0; j < m; ++j) v[j] += step * row[j];
                p.bias += eta * target;
            }
            if (s < 1e-9) {
                for (double& w : v) w *= s;
                s = 1.0;
            }
        }
    }
    p.weights.resize(m);
    for (std::size_t j = 0; j < m; ++j) p.weights[j] = s * v[j];
    return p;
}

std::uint8_t predict_svm(const SvmParams& p, std::span<const double> row) {
    double score = p.bias;
    for (std::size_t j = 0; j < row.size(); ++j) score += p.weights[j] * (row[j] - p.mean[j]) / p.scale[j];
    return score > 0.0 ? 1 : 0;
}

}  // namespace pcclsm::detail
