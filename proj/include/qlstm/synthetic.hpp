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
 * Seeded synthetic series in the standard CSV schema.
 *
 * Rows are daily from 2004-02-01. Feature f (1-based) is the underlying
 * signal lagged by f days plus Gaussian noise; the target is the signal
 * itself. Every column is min-max scaled into [0, 1] over the full series.
 *
 *   sine        s_k = sin(2 pi k / 20)
 *   ar1         s_k = 0.9 s_{k-1} + e_k, e_k ~ N(0, 1), stationary start
 *   trend_sine  s_k = k / length + 0.3 sin(2 pi k / 20) + 0.02 e_k
 */
#pragma once

#include "qlstm/date.hpp"
#include "qlstm/error.hpp"
#include "qlstm/random.hpp"
#include "qlstm/series.hpp"

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace qlstm {

enum class SynthKind { Sine, Ar1, TrendSine };

inline SynthKind parse_synth_kind(const std::string &name) {
    if (name == "sine") {
        return SynthKind::Sine;
    }
    if (name == "ar1") {
        return SynthKind::Ar1;
    }
    if (name == "trend_sine") {
        return SynthKind::TrendSine;
    }
    throw UsageError("unknown synthetic kind '" + name + "'");
}

inline constexpr double kSynthPeriod = 20.0;
inline constexpr double kSynthFeatureNoise = 0.05;
inline constexpr double kAr1Coefficient = 0.9;

[[nodiscard]] inline RawSeries generate_synthetic(SynthKind kind, std::size_t length,
                                                  std::size_t n_features,
                                                  std::uint64_t seed) {
    if (length < 8) {
        throw InsufficientDataError("synthetic series needs at least 8 rows");
    }
    if (n_features == 0) {
        throw UsageError("synthetic series needs at least one feature");
    }
    Rng rng(seed);
    // signal[k + n_features] is s_k; the leading entries feed the lags.
    const std::size_t total = length + n_features;
    std::vector<double> signal(total);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t n = 0; n < total; ++n) {
        const double k = static_cast<double>(n) - static_cast<double>(n_features);
        switch (kind) {
        case SynthKind::Sine:
            signal[n] = std::sin(two_pi * k / kSynthPeriod);
            break;
        case SynthKind::TrendSine:
            signal[n] = k / static_cast<double>(length) +
                        0.3 * std::sin(two_pi * k / kSynthPeriod) + 0.02 * rng.normal();
            break;
        case SynthKind::Ar1: {
            const double stationary_sd =
                1.0 / std::sqrt(1.0 - kAr1Coefficient * kAr1Coefficient);
            signal[n] = n == 0 ? stationary_sd * rng.normal()
                               : kAr1Coefficient * signal[n - 1] + rng.normal();
            break;
        }
        }
    }

    RawSeries s;
    const Date start(2004, 2, 1);
    for (std::size_t r = 0; r < length; ++r) {
        s.dates.push_back(start.plus_days(static_cast<long>(r)));
    }
    s.features = Matrix(length, n_features);
    double sd = 0.0;
    {
        double mean = 0.0;
        for (double x : signal) {
            mean += x;
        }
        mean /= static_cast<double>(total);
        for (double x : signal) {
            sd += (x - mean) * (x - mean);
        }
        sd = std::sqrt(sd / static_cast<double>(total));
    }
    for (std::size_t r = 0; r < length; ++r) {
        for (std::size_t f = 0; f < n_features; ++f) {
            const std::size_t lag = f + 1;
            s.features(r, f) = signal[r + n_features - lag] +
                               kSynthFeatureNoise * sd * rng.normal();
        }
        s.target.push_back(signal[r + n_features]);
    }
    for (std::size_t f = 0; f < n_features; ++f) {
        s.feature_names.push_back("f" + std::to_string(f + 1));
    }
    s.target_name = "target";

    auto rescale = [](auto &&get, std::size_t n) {
        double lo = get(0);
        double hi = get(0);
        for (std::size_t r = 1; r < n; ++r) {
            lo = std::min(lo, get(r));
            hi = std::max(hi, get(r));
        }
        for (std::size_t r = 0; r < n; ++r) {
            get(r) = hi > lo ? (get(r) - lo) / (hi - lo) : 0.5;
        }
    };
    for (std::size_t f = 0; f < n_features; ++f) {
        rescale([&](std::size_t r) -> double & { return s.features(r, f); }, length);
    }
    rescale([&](std::size_t r) -> double & { return s.target[r]; }, length);
    return s;
}

} // namespace qlstm
