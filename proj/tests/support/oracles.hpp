#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library's numeric paths: everything is evaluated directly from the defining
// formulas in 50-digit arithmetic or by brute force.

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

// Pearson coefficient straight from its defining ratio.
inline double pearson(std::span<const double> a, std::span<const double> b) {
    const std::size_t n = a.size();
    Big ma = 0, mb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += Big(a[i]);
        mb += Big(b[i]);
    }
    ma /= n;
    mb /= n;
    Big sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Big da = Big(a[i]) - ma;
        const Big db = Big(b[i]) - mb;
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    return static_cast<double>(sab / (sqrt(saa) * sqrt(sbb)));
}

struct LeastSquares {
    double intercept = 0.0;
    std::vector<double> beta;
    double residual = 0.0;
};

// beta = (A^T A)^-1 A^T y with A = [1 X], the inverse formed explicitly by
// Gauss-Jordan elimination; residual = mean squared error of the fit.
// `x` is row-major n x m.
inline LeastSquares normal_equations(std::span<const double> x, std::size_t n, std::size_t m,
                                     std::span<const double> y) {
    const std::size_t p = m + 1;
    auto a = [&](std::size_t r, std::size_t c) { return c == 0 ? Big(1) : Big(x[r * m + c - 1]); };
    std::vector<Big> ata(p * p, Big(0));
    std::vector<Big> aty(p, Big(0));
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t i = 0; i < p; ++i) {
            aty[i] += a(r, i) * Big(y[r]);
            for (std::size_t j = 0; j < p; ++j) ata[i * p + j] += a(r, i) * a(r, j);
        }
    }
    std::vector<Big> inv(p * p, Big(0));
    for (std::size_t i = 0; i < p; ++i) inv[i * p + i] = 1;
    for (std::size_t col = 0; col < p; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < p; ++r) {
            if (abs(ata[r * p + col]) > abs(ata[pivot * p + col])) pivot = r;
        }
        if (ata[pivot * p + col] == 0) throw std::runtime_error("oracle: singular normal equations");
        for (std::size_t c = 0; c < p; ++c) {
            std::swap(ata[col * p + c], ata[pivot * p + c]);
            std::swap(inv[col * p + c], inv[pivot * p + c]);
        }
        const Big d = ata[col * p + col];
        for (std::size_t c = 0; c < p; ++c) {
            ata[col * p + c] /= d;
            inv[col * p + c] /= d;
        }
        for (std::size_t r = 0; r < p; ++r) {
            if (r == col) continue;
            const Big f = ata[r * p + col];
            for (std::size_t c = 0; c < p; ++c) {
                ata[r * p + c] -= f * ata[col * p + c];
                inv[r * p + c] -= f * inv[col * p + c];
            }
        }
    }
    std::vector<Big> coef(p, Big(0));
    for (std::size_t i = 0; i < p; ++i) {
        for (std::size_t j = 0; j < p; ++j) coef[i] += inv[i * p + j] * aty[j];
    }
    Big sse = 0;
    for (std::size_t r = 0; r < n; ++r) {
        Big pred = 0;
        for (std::size_t i = 0; i < p; ++i) pred += coef[i] * a(r, i);
        const Big e = Big(y[r]) - pred;
        sse += e * e;
    }
    LeastSquares out;
    out.intercept = static_cast<double>(coef[0]);
    for (std::size_t i = 1; i < p; ++i) out.beta.push_back(static_cast<double>(coef[i]));
    out.residual = static_cast<double>(sse / n);
    return out;
}

// Rank of element i: 1 + (# strictly smaller) + (# equal with lower index).
inline std::vector<std::size_t> ranks_by_counting(std::span<const double> v) {
    std::vector<std::size_t> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::size_t r = 1;
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (v[j] < v[i] || (v[j] == v[i] && j < i)) ++r;
        }
        out[i] = r;
    }
    return out;
}

}  // namespace oracle
