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
 * Flat views over parameter structs that expose `for_each_array`.
 */
#pragma once

#include "qlstm/error.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace qlstm {

template <class P> [[nodiscard]] std::vector<double> flatten(const P &p) {
    std::vector<double> out;
    p.for_each_array([&](const char *, std::span<const double> v, bool) {
        out.insert(out.end(), v.begin(), v.end());
    });
    return out;
}

template <class P> void unflatten(P &p, std::span<const double> flat) {
    std::size_t pos = 0;
    p.for_each_array([&](const char *, std::span<double> v, bool) {
        detail::require_shape(pos + v.size() <= flat.size(),
                              "flat parameter vector too short");
        std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(pos), v.size(),
                    v.begin());
        pos += v.size();
    });
    detail::require_shape(pos == flat.size(), "flat parameter vector too long");
}

/// 1 for entries the optimizer may update, 0 for fixed ones.
template <class P> [[nodiscard]] std::vector<std::uint8_t> trainable_mask(const P &p) {
    std::vector<std::uint8_t> out;
    p.for_each_array([&](const char *, std::span<const double> v, bool trainable) {
        out.insert(out.end(), v.size(), trainable ? 1 : 0);
    });
    return out;
}

} // namespace qlstm
