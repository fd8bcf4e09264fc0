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
 * Classical LSTM cell, single-layer sequence network with a linear head, and
 * backpropagation through time.
 *
 * With v = [h_{t-1}, x_t] (hidden block first):
 *
 *     i  = sigmoid(v W_i + b_i)      f = sigmoid(v W_f + b_f)
 *     Ct = tanh(v W_c + b_c)         o = sigmoid(v W_o + b_o)
 *     C  = i * Ct + f * C_{t-1}      h = o * tanh(C)
 *
 * and the prediction is head_w . h_T + head_b.
 */
#pragma once

#include "qlstm/error.hpp"
#include "qlstm/linalg.hpp"
#include "qlstm/random.hpp"

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace qlstm {

struct LstmParams {
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
    /// Each [(hidden + input) x hidden]; rows 0..hidden-1 act on h_{t-1}.
    Matrix w_i, w_f, w_c, w_o;
    std::vector<double> b_i, b_f, b_c, b_o;
    std::vector<double> head_w;
    double head_b = 0.0;

    static LstmParams zeros(std::size_t input_size, std::size_t hidden_size) {
        const std::size_t rows = hidden_size + input_size;
        LstmParams p;
        p.input_size = input_size;
        p.hidden_size = hidden_size;
        p.w_i = p.w_f = p.w_c = p.w_o = Matrix(rows, hidden_size);
        p.b_i = p.b_f = p.b_c = p.b_o = std::vector<double>(hidden_size, 0.0);
        p.head_w.assign(hidden_size, 0.0);
        return p;
    }

    /// Uniform(-k, k) with k = 1/sqrt(hidden + input); forget bias set to +1.
    static LstmParams random(std::size_t input_size, std::size_t hidden_size,
                             std::uint64_t seed) {
        LstmParams p = zeros(input_size, hidden_size);
        Rng rng(seed);
        const double k = 1.0 / std::sqrt(static_cast<double>(hidden_size + input_size));
        for (Matrix *w : {&p.w_i, &p.w_f, &p.w_c, &p.w_o}) {
            for (double &x : w->data) {
                x = rng.uniform(-k, k);
            }
        }
        for (auto *b : {&p.b_i, &p.b_c, &p.b_o}) {
            for (double &x : *b) {
                x = rng.uniform(-k, k);
            }
        }
        std::fill(p.b_f.begin(), p.b_f.end(), 1.0);
        const double kh = 1.0 / std::sqrt(static_cast<double>(hidden_size));
        for (double &x : p.head_w) {
            x = rng.uniform(-kh, kh);
        }
        p.head_b = 0.0;
        return p;
    }

    /// Visits every parameter array as (name, values, trainable).
    template <class F> void for_each_array(F &&f) {
        f("w_i", std::span<double>(w_i.data), true);
        f("w_f", std::span<double>(w_f.data), true);
        f("w_c", std::span<double>(w_c.data), true);
        f("w_o", std::span<double>(w_o.data), true);
        f("b_i", std::span<double>(b_i), true);
        f("b_f", std::span<double>(b_f), true);
        f("b_c", std::span<double>(b_c), true);
        f("b_o", std::span<double>(b_o), true);
        f("head_w", std::span<double>(head_w), true);
        f("head_b", std::span<double>(&head_b, 1), true);
    }
    template <class F> void for_each_array(F &&f) const {
        const_cast<LstmParams *>(this)->for_each_array(
            [&](const char *name, std::span<double> v, bool trainable) {
                f(name, std::span<const double>(v), trainable);
            });
    }
};

/// Gate weights given in split form (x-block and h-block per gate).
struct LstmSplitWeights {
    Matrix w_xi, w_hi, w_xf, w_hf, w_xc, w_hc, w_xo, w_ho;
};

/// Stacks each (h-block, x-block) pair into the concatenated layout.
[[nodiscard]] inline LstmParams
lstm_params_from_split(const LstmSplitWeights &s, std::vector<double> b_i,
                       std::vector<double> b_f, std::vector<double> b_c,
                       std::vector<double> b_o, std::vector<double> head_w,
                       double head_b) {
    const std::size_t hidden = s.w_hi.cols;
    const std::size_t input = s.w_xi.rows;
    auto stack = [&](const Matrix &wh, const Matrix &wx) {
        detail::require_shape(wh.rows == hidden && wh.cols == hidden &&
                                  wx.rows == input && wx.cols == hidden,
                              "split LSTM weight shape mismatch");
        Matrix out(hidden + input, hidden);
        std::copy(wh.data.begin(), wh.data.end(), out.data.begin());
        std::copy(wx.data.begin(), wx.data.end(),
                  out.data.begin() + static_cast<std::ptrdiff_t>(hidden * hidden));
        return out;
    };
    LstmParams p;
    p.input_size = input;
    p.hidden_size = hidden;
    p.w_i = stack(s.w_hi, s.w_xi);
    p.w_f = stack(s.w_hf, s.w_xf);
    p.w_c = stack(s.w_hc, s.w_xc);
    p.w_o = stack(s.w_ho, s.w_xo);
    p.b_i = std::move(b_i);
    p.b_f = std::move(b_f);
    p.b_c = std::move(b_c);
    p.b_o = std::move(b_o);
    p.head_w = std::move(head_w);
    p.head_b = head_b;
    return p;
}

struct LstmState {
    std::vector<double> h;
    std::vector<double> c;

    static LstmState zeros(std::size_t hidden) {
        return {std::vector<double>(hidden, 0.0), std::vector<double>(hidden, 0.0)};
    }
};

struct LstmStepCache {
    std::vector<double> v; // [h_{t-1}, x_t]
    std::vector<double> i, f, c_tilde, o;
    std::vector<double> c_prev, c, tanh_c;
};

struct LstmStepResult {
    std::vector<double> h;
    LstmState state;
    LstmStepCache cache;
};

struct LstmForwardResult {
    double prediction = 0.0;
    std::vector<LstmStepCache> caches;
};

namespace detail {

inline void check_lstm_params(const LstmParams &p) {
    const std::size_t rows = p.hidden_size + p.input_size;
    const std::size_t h = p.hidden_size;
    bool ok = h > 0 && p.input_size > 0;
    for (const Matrix *w : {&p.w_i, &p.w_f, &p.w_c, &p.w_o}) {
        ok = ok && w->rows == rows && w->cols == h && w->data.size() == rows * h;
    }
    for (const auto *b : {&p.b_i, &p.b_f, &p.b_c, &p.b_o, &p.head_w}) {
        ok = ok && b->size() == h;
    }
    require_shape(ok, "LSTM parameter shapes inconsistent");
}

} // namespace detail

[[nodiscard]] inline LstmStepResult lstm_step(const LstmParams &p,
                                              std::span<const double> x,
                                              const LstmState &state) {
    detail::check_lstm_params(p);
    const std::size_t hidden = p.hidden_size;
    detail::require_shape(x.size() == p.input_size,
                          "LSTM input width " + std::to_string(x.size()) +
                              " != " + std::to_string(p.input_size));
    detail::require_shape(state.h.size() == hidden && state.c.size() == hidden,
                          "LSTM state size mismatch");
    detail::require_finite(x, "LSTM input");

    LstmStepCache cache;
    cache.v.reserve(hidden + p.input_size);
    cache.v.insert(cache.v.end(), state.h.begin(), state.h.end());
    cache.v.insert(cache.v.end(), x.begin(), x.end());

    cache.i = vecmat(cache.v, p.w_i);
    cache.f = vecmat(cache.v, p.w_f);
    cache.c_tilde = vecmat(cache.v, p.w_c);
    cache.o = vecmat(cache.v, p.w_o);
    cache.c_prev = state.c;
    cache.c.resize(hidden);
    cache.tanh_c.resize(hidden);
    std::vector<double> h(hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        cache.i[j] = sigmoid(cache.i[j] + p.b_i[j]);
        cache.f[j] = sigmoid(cache.f[j] + p.b_f[j]);
        cache.c_tilde[j] = std::tanh(cache.c_tilde[j] + p.b_c[j]);
        cache.o[j] = sigmoid(cache.o[j] + p.b_o[j]);
        cache.c[j] = cache.i[j] * cache.c_tilde[j] + cache.f[j] * state.c[j];
        cache.tanh_c[j] = std::tanh(cache.c[j]);
        h[j] = cache.o[j] * cache.tanh_c[j];
    }
    LstmStepResult r;
    r.state = LstmState{h, cache.c};
    r.h = std::move(h);
    r.cache = std::move(cache);
    return r;
}

[[nodiscard]] inline double lstm_head(const LstmParams &p,
                                      std::span<const double> h) {
    double y = p.head_b;
    for (std::size_t j = 0; j < h.size(); ++j) {
        y += p.head_w[j] * h[j];
    }
    return y;
}

/// Unrolls the cell over the rows of `sequence` from the zero state.
[[nodiscard]] inline LstmForwardResult lstm_forward(const LstmParams &p,
                                                    const Matrix &sequence) {
    if (sequence.rows == 0) {
        throw EmptyInputError("LSTM forward on an empty sequence");
    }
    LstmForwardResult out;
    out.caches.reserve(sequence.rows);
    LstmState state = LstmState::zeros(p.hidden_size);
    for (std::size_t t = 0; t < sequence.rows; ++t) {
        auto step = lstm_step(p, sequence.row(t), state);
        state = std::move(step.state);
        out.caches.push_back(std::move(step.cache));
    }
    out.prediction = lstm_head(p, state.h);
    return out;
}

/// BPTT gradients of a scalar loss given dLoss/dPrediction.
[[nodiscard]] inline LstmParams
lstm_backward(const LstmParams &p, std::span<const LstmStepCache> caches,
              double upstream) {
    detail::check_lstm_params(p);
    const std::size_t hidden = p.hidden_size;
    const std::size_t rows = hidden + p.input_size;
    if (caches.empty()) {
        throw StateError("LSTM backward without forward caches");
    }
    for (const auto &c : caches) {
        if (c.v.size() != rows || c.i.size() != hidden || c.c.size() != hidden ||
            c.c_prev.size() != hidden) {
            throw StateError("LSTM caches do not match parameter shapes");
        }
    }

    LstmParams g = LstmParams::zeros(p.input_size, hidden);
    const auto &last = caches.back();
    std::vector<double> dh(hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        const double h_last = last.o[j] * last.tanh_c[j];
        g.head_w[j] = upstream * h_last;
        dh[j] = upstream * p.head_w[j];
    }
    g.head_b = upstream;

    std::vector<double> dc(hidden, 0.0);
    std::vector<double> da_i(hidden), da_f(hidden), da_c(hidden), da_o(hidden);
    for (std::size_t t = caches.size(); t-- > 0;) {
        const auto &k = caches[t];
        for (std::size_t j = 0; j < hidden; ++j) {
            const double d_o = dh[j] * k.tanh_c[j];
            dc[j] += dh[j] * k.o[j] * (1.0 - k.tanh_c[j] * k.tanh_c[j]);
            const double d_i = dc[j] * k.c_tilde[j];
            const double d_f = dc[j] * k.c_prev[j];
            const double d_ct = dc[j] * k.i[j];
            da_i[j] = d_i * k.i[j] * (1.0 - k.i[j]);
            da_f[j] = d_f * k.f[j] * (1.0 - k.f[j]);
            da_c[j] = d_ct * (1.0 - k.c_tilde[j] * k.c_tilde[j]);
            da_o[j] = d_o * k.o[j] * (1.0 - k.o[j]);
            dc[j] *= k.f[j];
        }
        add_outer(g.w_i, k.v, da_i);
        add_outer(g.w_f, k.v, da_f);
        add_outer(g.w_c, k.v, da_c);
        add_outer(g.w_o, k.v, da_o);
        for (std::size_t j = 0; j < hidden; ++j) {
            g.b_i[j] += da_i[j];
            g.b_f[j] += da_f[j];
            g.b_c[j] += da_c[j];
            g.b_o[j] += da_o[j];
        }
        const auto dv_i = matvec(p.w_i, da_i);
        const auto dv_f = matvec(p.w_f, da_f);
        const auto dv_c = matvec(p.w_c, da_c);
        const auto dv_o = matvec(p.w_o, da_o);
        for (std::size_t j = 0; j < hidden; ++j) {
            dh[j] = dv_i[j] + dv_f[j] + dv_c[j] + dv_o[j];
        }
    }
    return g;
}

// Hooks for the generic trainer.

[[nodiscard]] inline LstmForwardResult model_forward(const LstmParams &p,
                                                     const Matrix &window) {
    return lstm_forward(p, window);
}

[[nodiscard]] inline LstmParams
model_backward(const LstmParams &p, std::span<const LstmStepCache> caches,
               double upstream) {
    return lstm_backward(p, caches, upstream);
}

} // namespace qlstm
