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
/**
 * @file
 * Resampling of coarse (e.g. monthly) series onto a daily calendar grid.
 */
#pragma once

#include "qlstm/error.hpp"
#include "qlstm/series.hpp"

#include <span>
#include <string>
#include <vector>

namespace qlstm {

enum class InterpMethod { Linear, Cubic };

inline InterpMethod parse_interp_method(const std::string &name) {
    if (name == "linear") {
        return InterpMethod::Linear;
    }
    if (name == "cubic") {
        return InterpMethod::Cubic;
    }
    throw UsageError("unknown interpolation method '" + name + "'");
}

/**
 * Natural cubic spline through (x_k, y_k), x strictly increasing.
 *
 * Second derivatives M_k solve the tridiagonal system
 *   h_{k-1} M_{k-1} + 2 (h_{k-1} + h_k) M_k + h_k M_{k+1}
 *       = 6 ((y_{k+1} - y_k)/h_k - (y_k - y_{k-1})/h_{k-1})
 * with M_0 = M_{n-1} = 0.
 */
class NaturalCubicSpline {
  public:
    NaturalCubicSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)), m_(x_.size(), 0.0) {
        const std::size_t n = x_.size();
        if (n < 2 || y_.size() != n) {
            throw InsufficientDataError("spline needs at least two knots");
        }
        if (n == 2) {
            return;
        }
        // Thomas algorithm on the interior unknowns M_1..M_{n-2}.
        const std::size_t k = n - 2;
        std::vector<double> diag(k), upper(k), rhs(k);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1];
            const double h1 = x_[i + 1] - x_[i];
            diag[i - 1] = 2.0 * (h0 + h1);
            upper[i - 1] = h1;
            rhs[i - 1] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        }
        for (std::size_t i = 1; i < k; ++i) {
            const double lower = x_[i + 1] - x_[i]; // h_{i} for row i (M_i's left)
            const double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        m_[k] = rhs[k - 1] / diag[k - 1];
        for (std::size_t i = k - 1; i-- > 0;) {
            m_[i + 1] = (rhs[i] - upper[i] * m_[i + 2]) / diag[i];
        }
    }

    [[nodiscard]] double operator()(double t) const {
        std::size_t seg = 0;
        if (t >= x_.back()) {
            seg = x_.size() - 2;
        } else if (t > x_.front()) {
            seg = static_cast<std::size_t>(
                      std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) -
                  1;
        }
        const double h = x_[seg + 1] - x_[seg];
        const double a = (x_[seg + 1] - t) / h;
        const double b = (t - x_[seg]) / h;
        return a * y_[seg] + b * y_[seg + 1] +
               ((a * a * a - a) * m_[seg] + (b * b * b - b) * m_[seg + 1]) * h *
                   h / 6.0;
    }

    [[nodiscard]] std::span<const double> second_derivatives() const { return m_; }

  private:
    std::vector<double> x_;
    std::vector<double> y_;
    std::vector<double> m_;
};

namespace detail {

inline std::vector<double> resample_column(const std::vector<double> &knot_x,
                                           const std::vector<double> &knot_y,
                                           InterpMethod method,
                                           std::size_t n_days) {
    std::vector<double> out(n_days);
    if (method == InterpMethod::Cubic) {
        NaturalCubicSpline spline(knot_x, knot_y);
        for (std::size_t d = 0; d < n_days; ++d) {
            out[d] = spline(static_cast<double>(d));
        }
    } else {
        std::size_t seg = 0;
        for (std::size_t d = 0; d < n_days; ++d) {
            const double t = static_cast<double>(d);
            while (seg + 2 < knot_x.size() && t > knot_x[seg + 1]) {
                ++seg;
            }
            const double x0 = knot_x[seg];
            const double x1 = knot_x[seg + 1];
            const double w = (t - x0) / (x1 - x0);
            out[d] = knot_y[seg] + w * (knot_y[seg + 1] - knot_y[seg]);
        }
    }
    // Past the last knot the final value is held, never extrapolated.
    const auto last_knot = static_cast<std::size_t>(knot_x.back());
    for (std::size_t d = last_knot + 1; d < n_days; ++d) {
        out[d] = knot_y.back();
    }
    // Knot values are copied verbatim.
    for (std::size_t k = 0; k < knot_x.size(); ++k) {
        out[static_cast<std::size_t>(knot_x[k])] = knot_y[k];
    }
    return out;
}

} // namespace detail

/// True when every row is dated on the first of a month, i.e. each row
/// stands for a whole calendar month.
[[nodiscard]] inline bool month_stamped(const RawSeries &series) {
    for (const auto &d : series.dates) {
        if (d.day_of_month() != 1) {
            return false;
        }
    }
    return !series.dates.empty();
}

/// One row per calendar day from the first date through the last date, or
/// through the end of the final month for a month-stamped series (the last
/// value is held over that month). Every column is interpolated
/// independently and original rows are reproduced exactly at their dates.
[[nodiscard]] inline RawSeries interpolate_to_daily(const RawSeries &series,
                                                    InterpMethod method) {
    if (series.rows() < 2) {
        throw InsufficientDataError("interpolation needs at least two rows");
    }
    series.validate();
    const Date first = series.dates.front();
    const Date last = month_stamped(series) ? series.dates.back().end_of_month()
                                            : series.dates.back();
    const auto n_days = static_cast<std::size_t>(last - first) + 1;

    std::vector<double> knot_x(series.rows());
    for (std::size_t r = 0; r < series.rows(); ++r) {
        knot_x[r] = static_cast<double>(series.dates[r] - first);
    }

    RawSeries out;
    out.feature_names = series.feature_names;
    out.target_name = series.target_name;
    out.dates.reserve(n_days);
    for (std::size_t d = 0; d < n_days; ++d) {
        out.dates.push_back(first.plus_days(static_cast<long>(d)));
    }
    out.features = Matrix(n_days, series.n_features());
    std::vector<double> column(series.rows());
    for (std::size_t c = 0; c < series.n_features(); ++c) {
        for (std::size_t r = 0; r < series.rows(); ++r) {
            column[r] = series.features(r, c);
        }
        const auto daily = detail::resample_column(knot_x, column, method, n_days);
        for (std::size_t d = 0; d < n_days; ++d) {
            out.features(d, c) = daily[d];
        }
    }
    out.target = detail::resample_column(knot_x, series.target, method, n_days);
    return out;
}

} // namespace qlstm
