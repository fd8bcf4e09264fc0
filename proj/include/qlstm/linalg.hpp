// Copyright 2026 The qlstm-forecast Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include "qlstm/error.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace qlstm {

/// Row-major dense matrix of doubles.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double &operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const {
        return data[r * cols + c];
    }
    [[nodiscard]] std::span<const double> row(std::size_t r) const {
        return {data.data() + r * cols, cols};
    }
    [[nodiscard]] std::span<double> row(std::size_t r) {
        return {data.data() + r * cols, cols};
    }
    bool operator==(const Matrix &) const = default;
};

/// Row vector times matrix: out_c = sum_r x_r W(r, c).
[[nodiscard]] inline std::vector<double> vecmat(std::span<const double> x,
                                                const Matrix &w) {
    detail::require_shape(x.size() == w.rows, "vecmat: length mismatch");
    std::vector<double> out(w.cols, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
        const double xr = x[r];
        const auto wr = w.row(r);
        for (std::size_t c = 0; c < w.cols; ++c) {
            out[c] += xr * wr[c];
        }
    }
    return out;
}

/// Matrix times column vector: out_r = sum_c W(r, c) y_c.
[[nodiscard]] inline std::vector<double> matvec(const Matrix &w,
                                                std::span<const double> y) {
    detail::require_shape(y.size() == w.cols, "matvec: length mismatch");
    std::vector<double> out(w.rows, 0.0);
    for (std::size_t r = 0; r < w.rows; ++r) {
        const auto wr = w.row(r);
        double acc = 0.0;
        for (std::size_t c = 0; c < w.cols; ++c) {
            acc += wr[c] * y[c];
        }
        out[r] = acc;
    }
    return out;
}

/// acc(r, c) += a_r b_c
inline void add_outer(Matrix &acc, std::span<const double> a,
                      std::span<const double> b) {
    for (std::size_t r = 0; r < acc.rows; ++r) {
        const double ar = a[r];
        if (ar == 0.0) {
            continue;
        }
        auto row = acc.row(r);
        for (std::size_t c = 0; c < acc.cols; ++c) {
            row[c] += ar * b[c];
        }
    }
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace qlstm
