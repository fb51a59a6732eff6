#pragma once

#include <span>
#include <string>
#include <vector>

#include "pcclsm/dataset.hpp"

namespace pcclsm {

// Least-squares fit of the label on the features plus an intercept.
struct DistortionModel {
    std::vector<double> beta;  // one coefficient per fitted column
    double intercept = 0.0;
    double residual = 0.0;  // mean squared error of the fit
    std::vector<std::string> fitted_on;

    // The scalar added to every distorted element: intercept + residual.
    double shift() const { return intercept + residual; }

    friend bool operator==(const DistortionModel&, const DistortionModel&) = default;
};

struct DistortedMatrix {
    FeatureMatrix matrix;
};

// Columns of the design matrix whose scaled Householder pivot falls below this
// are treated as linearly dependent on the preceding ones.
inline constexpr double kRankTolerance = 1e-10;

// Solves min ||[1 X] b - y||^2 by Householder QR on the column-equilibrated
// design matrix. Throws NumericError on a rank-deficient design, naming the
// dependent column; no regularized or minimum-norm fallback is attempted.
DistortionModel fit_lsm(const FeatureMatrix& x, std::span<const double> target);
// The label enters the fit as the real values 0.0 / 1.0.
DistortionModel fit_lsm(const FeatureMatrix& x, const LabelVector& y);

// TX(i, j) = beta[j] * X(i, j) + (intercept + residual).
DistortedMatrix transform(const FeatureMatrix& x, const DistortionModel& model);

struct DistortionResult {
    DistortedMatrix distorted;
    DistortionModel model;
    double seconds = 0.0;  // wall time of fit + transform
};

DistortionResult distort(const FeatureMatrix& x, std::span<const double> target);
DistortionResult distort(const FeatureMatrix& x, const LabelVector& y);

}  // namespace pcclsm
