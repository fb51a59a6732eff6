#include "pcclsm/feature_selection.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "pcclsm/error.hpp"

namespace pcclsm {

namespace {

bool is_constant(std::span<const double> v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

struct Centered {
    std::vector<double> deviations;
    double sum_squares = 0.0;
    bool constant = false;
};

Centered center(std::span<const double> v) {
    Centered out;
    out.constant = is_constant(v);
    double sum = 0.0;
    for (double x : v) sum += x;
    const double mean = sum / static_cast<double>(v.size());
    out.deviations.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.deviations[i] = v[i] - mean;
        out.sum_squares += out.deviations[i] * out.deviations[i];
    }
    return out;
}

// Both pearson() and correlation_matrix() go through here so that a matrix
// entry is bit-identical to the scalar call on the same pair of columns.
std::optional<double> coefficient(const Centered& a, const Centered& b) {
    if (a.constant || b.constant) return std::nullopt;
    double cross = 0.0;
    for (std::size_t i = 0; i < a.deviations.size(); ++i) cross += a.deviations[i] * b.deviations[i];
    return cross / (std::sqrt(a.sum_squares) * std::sqrt(b.sum_squares));
}

}  // namespace

std::optional<double> pearson(std::span<const double> f1, std::span<const double> f2) {
    if (f1.size() != f2.size()) throw UsageError("pearson: vectors differ in length");
    if (f1.size() < 2) throw UsageError("pearson: at least two observations are required");
    return coefficient(center(f1), center(f2));
}

CorrelationMatrix::CorrelationMatrix(std::vector<std::string> column_names,
                                     std::vector<std::optional<double>> values, std::vector<bool> constant)
    : names_(std::move(column_names)), values_(std::move(values)), constant_(std::move(constant)) {
    if (values_.size() != names_.size() * names_.size()) {
        throw UsageError("correlation matrix must be square over its column names");
    }
    if (constant_.empty()) constant_.assign(names_.size(), false);
    if (constant_.size() != names_.size()) throw UsageError("constant-column flags do not match columns");
}

std::vector<std::string> CorrelationMatrix::undefined_columns() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < size(); ++i) {
        if (constant_[i]) out.push_back(names_[i]);
    }
    return out;
}

CorrelationMatrix correlation_matrix(const FeatureMatrix& x, unsigned threads) {
    if (x.rows() < 2) throw UsageError("correlation matrix needs at least two rows");
    const std::size_t m = x.cols();
    std::vector<Centered> columns;
    columns.reserve(m);
    for (std::size_t c = 0; c < m; ++c) columns.push_back(center(x.column(c)));

    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
    }

    std::vector<std::optional<double>> values(m * m);
    for (std::size_t i = 0; i < m; ++i) values[i * m + i] = 1.0;

    auto worker = [&](std::size_t begin, std::size_t stride) {
        for (std::size_t p = begin; p < pairs.size(); p += stride) {
            const auto [i, j] = pairs[p];
            const auto r = coefficient(columns[i], columns[j]);
            values[i * m + j] = r;
            values[j * m + i] = r;
        }
    };

    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    if (threads <= 1 || pairs.size() < 2) {
        worker(0, 1);
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker, t, threads);
        for (auto& t : pool) t.join();
    }
    std::vector<bool> constant(m);
    for (std::size_t c = 0; c < m; ++c) constant[c] = columns[c].constant;
    return CorrelationMatrix(x.column_names(), std::move(values), std::move(constant));
}

std::vector<FeatureScore> rank_features(const CorrelationMatrix& c) {
    std::vector<FeatureScore> scores;
    for (std::size_t i = 0; i < c.size(); ++i) {
        double total = 0.0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < c.size(); ++j) {
            if (i == j) continue;
            if (const auto r = c(i, j)) {
                total += std::abs(*r);
                ++count;
            }
        }
        FeatureScore s{c.column_names()[i], std::nullopt};
        if (count > 0) s.score = total / static_cast<double>(count);
        scores.push_back(std::move(s));
    }
    std::stable_sort(scores.begin(), scores.end(), [](const FeatureScore& a, const FeatureScore& b) {
        if (a.score && b.score) return *a.score > *b.score;
        return a.score.has_value() && !b.score.has_value();
    });
    return scores;
}

SelectionReport select_by_threshold(const CorrelationMatrix& c, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw UsageError("PCC threshold must lie in (0, 1]");
    SelectionReport report;
    report.threshold = threshold;
    report.undefined = c.undefined_columns();
    report.ranking = rank_features(c);

    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < c.size(); ++j) {
        std::optional<std::size_t> trigger;
        double strongest = 0.0;
        for (std::size_t i : kept) {
            const auto r = c(i, j);
            if (r && std::abs(*r) > threshold && std::abs(*r) > strongest) {
                strongest = std::abs(*r);
                trigger = i;
            }
        }
        if (trigger) {
            report.dropped.push_back({c.column_names()[j], c.column_names()[*trigger], *c(*trigger, j)});
        } else {
            kept.push_back(j);
            report.kept.push_back(c.column_names()[j]);
        }
    }
    return report;
}

FeatureMatrix apply_selection(const FeatureMatrix& x, const SelectionReport& report) {
    if (report.kept.empty()) throw UsageError("selection keeps no features");
    for (const auto& name : report.kept) {
        if (!x.column_index(name)) throw UsageError("kept feature '" + name + "' is not in the matrix");
    }
    std::vector<std::string> ordered;
    for (const auto& name : x.column_names()) {
        if (std::find(report.kept.begin(), report.kept.end(), name) != report.kept.end()) {
            ordered.push_back(name);
        }
    }
    return x.select_columns(ordered);
}

}  // namespace pcclsm
