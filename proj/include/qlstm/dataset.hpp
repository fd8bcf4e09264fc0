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
 * Min-max scaling, supervised windowing and chronological splitting.
 */
#pragma once

#include "qlstm/date.hpp"
#include "qlstm/error.hpp"
#include "qlstm/linalg.hpp"
#include "qlstm/series.hpp"

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace qlstm {

struct ColumnRange {
    double min = 0.0;
    double max = 1.0;

    [[nodiscard]] bool constant() const { return max == min; }

    /// Constant columns map to 0.5.
    [[nodiscard]] double apply(double x) const {
        return constant() ? 0.5 : (x - min) / (max - min);
    }
    [[nodiscard]] double invert(double x) const {
        return constant() ? min : x * (max - min) + min;
    }
    bool operator==(const ColumnRange &) const = default;
};

/// Per-column ranges fitted on the leading training rows only.
struct Scaler {
    std::vector<ColumnRange> features;
    ColumnRange target;

    [[nodiscard]] RawSeries apply(const RawSeries &s) const {
        check(s);
        RawSeries out = s;
        for (std::size_t r = 0; r < s.rows(); ++r) {
            for (std::size_t c = 0; c < s.n_features(); ++c) {
                out.features(r, c) = features[c].apply(s.features(r, c));
            }
            out.target[r] = target.apply(s.target[r]);
        }
        return out;
    }

    [[nodiscard]] RawSeries invert(const RawSeries &s) const {
        check(s);
        RawSeries out = s;
        for (std::size_t r = 0; r < s.rows(); ++r) {
            for (std::size_t c = 0; c < s.n_features(); ++c) {
                out.features(r, c) = features[c].invert(s.features(r, c));
            }
            out.target[r] = target.invert(s.target[r]);
        }
        return out;
    }

    bool operator==(const Scaler &) const = default;

  private:
    void check(const RawSeries &s) const {
        detail::require_shape(s.n_features() == features.size(),
                              "scaler fitted on " + std::to_string(features.size()) +
                                  " features, series has " +
                                  std::to_string(s.n_features()));
    }
};

inline void check_fraction(double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw UsageError("train fraction must lie in (0, 1)");
    }
}

/// Number of leading rows treated as training data.
[[nodiscard]] inline std::size_t training_cutoff(std::size_t n, double train_fraction) {
    check_fraction(train_fraction);
    return static_cast<std::size_t>(std::floor(train_fraction * static_cast<double>(n)));
}

[[nodiscard]] inline Scaler fit_scaler(const RawSeries &s, double train_fraction) {
    const std::size_t cutoff = training_cutoff(s.rows(), train_fraction);
    if (cutoff == 0) {
        throw InsufficientDataError("no training rows to fit the scaler on");
    }
    auto fit = [&](auto &&value_at) {
        ColumnRange range{value_at(0), value_at(0)};
        for (std::size_t r = 1; r < cutoff; ++r) {
            range.min = std::min(range.min, value_at(r));
            range.max = std::max(range.max, value_at(r));
        }
        return range;
    };
    Scaler sc;
    for (std::size_t c = 0; c < s.n_features(); ++c) {
        sc.features.push_back(fit([&](std::size_t r) { return s.features(r, c); }));
    }
    sc.target = fit([&](std::size_t r) { return s.target[r]; });
    return sc;
}

struct NormalizedSeries {
    RawSeries series;
    Scaler scaler;
};

[[nodiscard]] inline NormalizedSeries fit_normalize(const RawSeries &s,
                                                    double train_fraction) {
    Scaler sc = fit_scaler(s, train_fraction);
    RawSeries out = sc.apply(s);
    return {std::move(out), std::move(sc)};
}

struct Sample {
    Matrix window; // [lookback x n_features]
    double target = 0.0;
    Date timestamp;   // date of the target row
    Date window_last; // date of the last window row
};

struct WindowedDataset {
    std::size_t lookback = 0;
    std::size_t n_features = 0;
    std::vector<Sample> samples;

    [[nodiscard]] std::size_t size() const { return samples.size(); }
    [[nodiscard]] bool empty() const { return samples.empty(); }
};

/// Sample j covers rows [j, j + lookback) and targets row j + lookback.
[[nodiscard]] inline WindowedDataset make_windows(const RawSeries &s,
                                                  std::size_t lookback) {
    if (lookback == 0) {
        throw UsageError("lookback must be at least 1");
    }
    if (s.rows() <= lookback) {
        throw InsufficientDataError("series of " + std::to_string(s.rows()) +
                                    " rows is too short for lookback " +
                                    std::to_string(lookback));
    }
    WindowedDataset ds;
    ds.lookback = lookback;
    ds.n_features = s.n_features();
    ds.samples.reserve(s.rows() - lookback);
    for (std::size_t j = 0; j + lookback < s.rows(); ++j) {
        Sample smp;
        smp.window = Matrix(lookback, s.n_features());
        for (std::size_t t = 0; t < lookback; ++t) {
            const auto src = s.features.row(j + t);
            std::copy(src.begin(), src.end(), smp.window.row(t).begin());
        }
        smp.target = s.target[j + lookback];
        smp.timestamp = s.dates[j + lookback];
        smp.window_last = s.dates[j + lookback - 1];
        ds.samples.push_back(std::move(smp));
    }
    return ds;
}

/// First floor(fraction * n) samples train, the rest test.
[[nodiscard]] inline std::pair<WindowedDataset, WindowedDataset>
split_chronological(const WindowedDataset &ds, double train_fraction = 0.8) {
    if (ds.empty()) {
        throw EmptyInputError("cannot split an empty dataset");
    }
    const std::size_t cut = training_cutoff(ds.size(), train_fraction);
    WindowedDataset train{ds.lookback, ds.n_features, {}};
    WindowedDataset test{ds.lookback, ds.n_features, {}};
    train.samples.assign(ds.samples.begin(),
                         ds.samples.begin() + static_cast<std::ptrdiff_t>(cut));
    test.samples.assign(ds.samples.begin() + static_cast<std::ptrdiff_t>(cut),
                        ds.samples.end());
    return {std::move(train), std::move(test)};
}

} // namespace qlstm
