#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

#include "detail.hpp"

namespace pcclsm {

std::size_t DecisionTreeParams::depth() const {
    if (nodes.empty()) return 0;
    std::size_t deepest = 0;
    std::vector<std::pair<std::int32_t, std::size_t>> stack{{0, 0}};
    while (!stack.empty()) {
        const auto [id, d] = stack.back();
        stack.pop_back();
        const auto& node = nodes[static_cast<std::size_t>(id)];
        if (node.feature < 0) {
            deepest = std::max(deepest, d);
        } else {
            stack.push_back({node.left, d + 1});
            stack.push_back({node.right, d + 1});
        }
    }
    return deepest;
}

namespace detail {

namespace {

struct Candidate {
    int feature = -1;
    double threshold = 0.0;
    double impurity = 0.0;  // n_left * gini_left + n_right * gini_right
};

double weighted_gini(double zeros, double ones) {
    const double total = zeros + ones;
    return total - (zeros * zeros + ones * ones) / total;
}

// Best Gini split on one feature, thresholds at midpoints between consecutive
// distinct values.
void scan_feature(const FeatureMatrix& x, const LabelVector& y, const std::vector<std::size_t>& rows, int feature,
                  std::vector<std::pair<double, std::uint8_t>>& scratch, Candidate& best) {
    scratch.clear();
    for (auto r : rows) scratch.emplace_back(x(r, static_cast<std::size_t>(feature)), y[r]);
    std::sort(scratch.begin(), scratch.end());
    double total[2] = {0.0, 0.0};
    for (const auto& s : scratch) total[s.second] += 1.0;
    double left[2] = {0.0, 0.0};
    for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
        left[scratch[i].second] += 1.0;
        const double a = scratch[i].first;
        const double b = scratch[i + 1].first;
        if (!(a < b)) continue;
        const double impurity =
            weighted_gini(left[0], left[1]) + weighted_gini(total[0] - left[0], total[1] - left[1]);
        if (best.feature < 0 || impurity < best.impurity) {
            double mid = a + (b - a) / 2.0;
            if (!(mid < b)) mid = a;
            best = {feature, mid, impurity};
        }
    }
}

std::uint8_t majority(const LabelVector& y, const std::vector<std::size_t>& rows, bool& pure) {
    std::size_t ones = 0;
    for (auto r : rows) ones += y[r];
    pure = ones == 0 || ones == rows.size();
    return ones * 2 > rows.size() ? 1 : 0;
}

}  // namespace

DecisionTreeParams grow_tree(const FeatureMatrix& x, const LabelVector& y, std::vector<std::size_t> rows,
                             const TreeOptions& options, Rng& rng) {
    const int m = static_cast<int>(x.cols());
    const bool subsample = options.features_per_split > 0 && options.features_per_split < x.cols();
    DecisionTreeParams tree;
    tree.nodes.emplace_back();

    struct Pending {
        std::int32_t node;
        std::vector<std::size_t> rows;
        std::size_t depth;
    };
    std::vector<Pending> stack;
    stack.push_back({0, std::move(rows), 0});
    std::vector<std::pair<double, std::uint8_t>> scratch;
    std::vector<int> order(static_cast<std::size_t>(m));

    while (!stack.empty()) {
        Pending job = std::move(stack.back());
        stack.pop_back();
        bool pure = false;
        const auto label = majority(y, job.rows, pure);
        tree.nodes[static_cast<std::size_t>(job.node)].label = label;
        if (pure || job.depth >= options.max_depth || job.rows.size() < options.min_samples_split) continue;

        std::iota(order.begin(), order.end(), 0);
        if (subsample) rng.shuffle(std::span<int>(order));
        Candidate best;
        // A random forest examines its feature quota, then keeps drawing
        // features only until some valid split exists.
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (subsample && i >= options.features_per_split && best.feature >= 0) break;
            scan_feature(x, y, job.rows, order[i], scratch, best);
        }
        if (best.feature < 0) continue;

        std::vector<std::size_t> left_rows;
        std::vector<std::size_t> right_rows;
        for (auto r : job.rows) {
            (x(r, static_cast<std::size_t>(best.feature)) <= best.threshold ? left_rows : right_rows).push_back(r);
        }
        const auto left_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.emplace_back();
        auto& node = tree.nodes[static_cast<std::size_t>(job.node)];
        node.feature = best.feature;
        node.threshold = best.threshold;
        node.left = left_id;
        node.right = left_id + 1;
        stack.push_back({left_id + 1, std::move(right_rows), job.depth + 1});
        stack.push_back({left_id, std::move(left_rows), job.depth + 1});
    }
    return tree;
}

std::uint8_t predict_tree(const DecisionTreeParams& tree, std::span<const double> row) {
    std::size_t id = 0;
    while (tree.nodes[id].feature >= 0) {
        const auto& node = tree.nodes[id];
        id = static_cast<std::size_t>(row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left
                                                                                                      : node.right);
    }
    return tree.nodes[id].label;
}

RandomForestParams fit_forest(const ClassifierSpec& spec, const FeatureMatrix& x, const LabelVector& y,
                              unsigned threads) {
    const auto n_trees = static_cast<std::size_t>(spec.get("n_trees"));
    TreeOptions options;
    options.max_depth = static_cast<std::size_t>(spec.get("max_depth"));
    options.min_samples_split = static_cast<std::size_t>(spec.get("min_samples_split"));
    options.features_per_split =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols()))));

    RandomForestParams forest;
    forest.trees.resize(n_trees);
    auto build = [&](std::size_t t) {
        Rng rng(derive_seed(spec.seed, t));
        std::vector<std::size_t> rows(x.rows());
        for (auto& r : rows) r = static_cast<std::size_t>(rng.uniform_index(x.rows()));
        forest.trees[t] = grow_tree(x, y, std::move(rows), options, rng);
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1) {
        for (std::size_t t = 0; t < n_trees; ++t) build(t);
    } else {
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < threads; ++w) {
            pool.emplace_back([&, w] {
                for (std::size_t t = w; t < n_trees; t += threads) build(t);
            });
        }
        for (auto& th : pool) th.join();
    }
    return forest;
}

std::uint8_t predict_forest(const RandomForestParams& forest, std::span<const double> row) {
    std::size_t ones = 0;
    for (const auto& tree : forest.trees) ones += predict_tree(tree, row);
    return ones * 2 > forest.trees.size() ? 1 : 0;
}

}  // namespace detail
}  // namespace pcclsm
