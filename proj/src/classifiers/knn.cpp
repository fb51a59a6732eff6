#include <algorithm>
#include <utility>

#include "detail.hpp"

namespace pcclsm::detail {

KnnParams fit_knn(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y) {
    return {x, y, static_cast<std::size_t>(spec.get("k"))};
}

// Euclidean distance; equal distances resolve to the lower training row and a
// tied vote resolves to label 0.
std::uint8_t predict_knn(const KnnParams& p, std::span<const double> row) {
    const std::size_t n = p.train_x.rows();
    std::vector<std::pair<double, std::size_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto t = p.train_x.row(i);
        double d = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const double diff = row[c] - t[c];
            d += diff * diff;
        }
        dist[i] = {d, i};
    }
    const std::size_t k = std::min(p.k, n);
    std::nth_element(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k - 1), dist.end());
    std::size_t votes[2] = {0, 0};
    for (std::size_t i = 0; i < k; ++i) ++votes[p.train_y[dist[i].second]];
    return votes[1] > votes[0] ? 1 : 0;
}

}  // namespace pcclsm::detail
