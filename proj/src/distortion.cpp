#include "pcclsm/distortion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "pcclsm/error.hpp"

namespace pcclsm {

namespace {

std::string design_column_name(const FeatureMatrix& x, std::size_t k) {
    return k == 0 ? std::string("(intercept)") : x.column_names()[k - 1];
}

// Solves the least-squares problem for the column-major design `a` (n x p,
// columns already scaled to unit norm) in place. Returns the solution in the
// scaled coordinates.
std::vector<double> householder_solve(std::vector<std::vector<double>>& a, std::vector<double> rhs,
                                      const FeatureMatrix& x) {
    const std::size_t n = rhs.size();
    const std::size_t p = a.size();
    std::vector<double> diag(p);

    for (std::size_t k = 0; k < p; ++k) {
        auto& col = a[k];
        double norm = 0.0;
        for (std::size_t i = k; i < n; ++i) norm += col[i] * col[i];
        norm = std::sqrt(norm);
        if (norm <= kRankTolerance) {
            double largest = 0.0;
            for (std::size_t j = 0; j < k; ++j) largest = std::max(largest, std::abs(diag[j]));
            std::ostringstream msg;
            msg << "least-squares design matrix is rank deficient: column '" << design_column_name(x, k)
                << "' is linearly dependent on the preceding columns (scaled pivot " << norm
                << ", tolerance " << kRankTolerance << ", reciprocal condition estimate "
                << (largest > 0.0 ? norm / largest : 0.0) << ")";
            throw NumericError(msg.str());
        }
        const double alpha = col[k] > 0.0 ? -norm : norm;
        // v = col[k:] - alpha * e_k, stored in place; H = I - 2 v v^T / (v^T v).
        col[k] -= alpha;
        double vtv = 0.0;
        for (std::size_t i = k; i < n; ++i) vtv += col[i] * col[i];
        for (std::size_t j = k + 1; j < p; ++j) {
            auto& other = a[j];
            double dot = 0.0;
            for (std::size_t i = k; i < n; ++i) dot += col[i] * other[i];
            const double f = 2.0 * dot / vtv;
            for (std::size_t i = k; i < n; ++i) other[i] -= f * col[i];
        }
        double dot = 0.0;
        for (std::size_t i = k; i < n; ++i) dot += col[i] * rhs[i];
        const double f = 2.0 * dot / vtv;
        for (std::size_t i = k; i < n; ++i) rhs[i] -= f * col[i];
        diag[k] = alpha;
    }

    std::vector<double> z(p);
    for (std::size_t k = p; k-- > 0;) {
        double s = rhs[k];
        for (std::size_t j = k + 1; j < p; ++j) s -= a[j][k] * z[j];
        z[k] = s / diag[k];
    }
    return z;
}

}  // namespace

DistortionModel fit_lsm(const FeatureMatrix& x, std::span<const double> target) {
    if (x.rows() != target.size()) throw UsageError("feature and target row counts differ");
    if (x.cols() == 0) throw UsageError("least-squares fit needs at least one feature column");
    const std::size_t n = x.rows();
    const std::size_t p = x.cols() + 1;
    if (n < p) {
        throw NumericError("least-squares fit of " + std::to_string(x.cols()) + " features plus intercept needs at least " +
                           std::to_string(p) + " rows, got " + std::to_string(n));
    }

    std::vector<std::vector<double>> design(p, std::vector<double>(n));
    std::fill(design[0].begin(), design[0].end(), 1.0);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) design[c + 1][r] = x(r, c);
    }
    std::vector<double> scale(p);
    for (std::size_t k = 0; k < p; ++k) {
        double s = 0.0;
        for (double v : design[k]) s += v * v;
        scale[k] = std::sqrt(s);
        if (scale[k] == 0.0) {
            throw NumericError("least-squares design matrix is rank deficient: column '" +
                               design_column_name(x, k) + "' is identically zero");
        }
        for (double& v : design[k]) v /= scale[k];
    }

    for (double t : target) {
        if (!std::isfinite(t)) throw UsageError("least-squares target contains a non-finite value");
    }
    const auto z = householder_solve(design, std::vector<double>(target.begin(), target.end()), x);

    DistortionModel model;
    model.fitted_on = x.column_names();
    model.intercept = z[0] / scale[0];
    model.beta.resize(x.cols());
    for (std::size_t c = 0; c < x.cols(); ++c) model.beta[c] = z[c + 1] / scale[c + 1];

    double sse = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        double predicted = model.intercept;
        for (std::size_t c = 0; c < x.cols(); ++c) predicted += model.beta[c] * x(r, c);
        const double e = target[r] - predicted;
        sse += e * e;
    }
    model.residual = sse / static_cast<double>(n);
    return model;
}

namespace {

std::vector<double> as_target(const LabelVector& y) {
    return std::vector<double>(y.values().begin(), y.values().end());
}

}  // namespace

DistortionModel fit_lsm(const FeatureMatrix& x, const LabelVector& y) { return fit_lsm(x, as_target(y)); }

DistortedMatrix transform(const FeatureMatrix& x, const DistortionModel& model) {
    if (x.column_names() != model.fitted_on) {
        throw UsageError("matrix columns do not match the columns the distortion model was fitted on");
    }
    FeatureMatrix out = x;
    const double shift = model.shift();
    for (std::size_t r = 0; r < x.rows(); ++r) {
        for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = model.beta[c] * x(r, c) + shift;
    }
    out.require_finite();
    return {std::move(out)};
}

DistortionResult distort(const FeatureMatrix& x, const LabelVector& y) { return distort(x, as_target(y)); }

DistortionResult distort(const FeatureMatrix& x, std::span<const double> target) {
    const auto start = std::chrono::steady_clock::now();
    DistortionModel model = fit_lsm(x, target);
    DistortedMatrix distorted = transform(x, model);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return {std::move(distorted), std::move(model), elapsed.count()};
}

}  // namespace pcclsm
