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
 * Hybrid quantum-classical LSTM cell built from six VQC layers.
 *
 * One step, with v = [h_{t-1}, x_t] and u = v . in_proj (length n_qubits):
 *
 *     f  = sigmoid(route_to_hidden(VQC1(u)))
 *     i  = sigmoid(route_to_hidden(VQC2(u)))
 *     Ct = tanh(route_to_hidden(VQC3(u)))
 *     o  = sigmoid(route_to_hidden(VQC4(u)))
 *     C  = f * C_{t-1} + i * Ct
 *     z  = o * tanh(C),   w = route_to_qubits(z)
 *     h  = VQC5(w) . out_proj_h
 *     y  = VQC6(w) . out_proj_y + out_bias
 *
 * The routing maps use the fixed matrix `cell_proj` [n_qubits x hidden] with
 * non-negative entries whose columns sum to one, so route_to_hidden is a
 * convex combination of expectations and keeps every gate pre-activation in
 * [-1, 1]. route_to_qubits is the row-normalised version of the same matrix.
 * When hidden == n_qubits, cell_proj is the identity and both routes are
 * no-ops.
 */
#pragma once

#include "qlstm/error.hpp"
#include "qlstm/linalg.hpp"
#include "qlstm/random.hpp"
#include "qlstm/vqc.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <vector>

namespace qlstm {

inline constexpr std::size_t kQlstmVqcCount = 6;

/// Convex routing matrix pairing qubit q with hidden unit j when
/// q mod m == j mod m, m = min(n_qubits, hidden); columns sum to one.
[[nodiscard]] inline Matrix default_cell_proj(std::size_t n_qubits,
                                              std::size_t hidden) {
    const std::size_t m = std::min(n_qubits, hidden);
    Matrix p(n_qubits, hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        std::size_t count = 0;
        for (std::size_t q = 0; q < n_qubits; ++q) {
            count += (q % m == j % m) ? 1 : 0;
        }
        for (std::size_t q = 0; q < n_qubits; ++q) {
            if (q % m == j % m) {
                p(q, j) = 1.0 / static_cast<double>(count);
            }
        }
    }
    return p;
}

struct QlstmParams {
    std::size_t input_size = 0;
    std::size_t hidden_size = 0;
    VqcDescriptor vqc;
    /// vqcs[k] is VQC_{k+1}.
    std::array<VqcParams, kQlstmVqcCount> vqcs;
    Matrix in_proj;    // [(hidden + input) x n_qubits]
    Matrix out_proj_h; // [n_qubits x hidden]
    std::vector<double> out_proj_y; // [n_qubits]
    double out_bias = 0.0;
    Matrix cell_proj;  // [n_qubits x hidden], fixed

    static QlstmParams zeros(std::size_t input_size, std::size_t hidden_size,
                             const VqcDescriptor &d) {
        QlstmParams p;
        p.input_size = input_size;
        p.hidden_size = hidden_size;
        p.vqc = d;
        for (auto &v : p.vqcs) {
            v = VqcParams::zeros(d);
        }
        p.in_proj = Matrix(hidden_size + input_size, d.n_qubits);
        p.out_proj_h = Matrix(d.n_qubits, hidden_size);
        p.out_proj_y.assign(d.n_qubits, 0.0);
        p.cell_proj = default_cell_proj(d.n_qubits, hidden_size);
        return p;
    }

    /// Angles uniform in [-pi, pi); projections uniform(-k, k) with
    /// k = 1/sqrt(fan_in); output bias zero.
    static QlstmParams random(std::size_t input_size, std::size_t hidden_size,
                              const VqcDescriptor &d, std::uint64_t seed) {
        QlstmParams p = zeros(input_size, hidden_size, d);
        Rng rng(seed);
        for (auto &v : p.vqcs) {
            for (double &a : v.angles) {
                a = rng.uniform(-std::numbers::pi, std::numbers::pi);
            }
        }
        const double k_in =
            1.0 / std::sqrt(static_cast<double>(hidden_size + input_size));
        for (double &x : p.in_proj.data) {
            x = rng.uniform(-k_in, k_in);
        }
        const double k_out = 1.0 / std::sqrt(static_cast<double>(d.n_qubits));
        for (double &x : p.out_proj_h.data) {
            x = rng.uniform(-k_out, k_out);
        }
        for (double &x : p.out_proj_y) {
            x = rng.uniform(-k_out, k_out);
        }
        return p;
    }

    /// Visits every parameter array as (name, values, trainable).
    template <class F> void for_each_array(F &&f) {
        static constexpr const char *names[kQlstmVqcCount] = {
            "vqc1", "vqc2", "vqc3", "vqc4", "vqc5", "vqc6"};
        for (std::size_t k = 0; k < kQlstmVqcCount; ++k) {
            f(names[k], std::span<double>(vqcs[k].angles), true);
        }
        f("in_proj", std::span<double>(in_proj.data), true);
        f("out_proj_h", std::span<double>(out_proj_h.data), true);
        f("out_proj_y", std::span<double>(out_proj_y), true);
        f("out_bias", std::span<double>(&out_bias, 1), true);
        f("cell_proj", std::span<double>(cell_proj.data), false);
    }
    template <class F> void for_each_array(F &&f) const {
        const_cast<QlstmParams *>(this)->for_each_array(
            [&](const char *name, std::span<double> v, bool trainable) {
                f(name, std::span<const double>(v), trainable);
            });
    }
};

struct QlstmState {
    std::vector<double> h;
    std::vector<double> c;

    static QlstmState zeros(std::size_t hidden) {
        return {std::vector<double>(hidden, 0.0), std::vector<double>(hidden, 0.0)};
    }
};

struct QlstmStepCache {
    std::vector<double> v; // [h_{t-1}, x_t]
    std::vector<double> u; // VQC1..4 input
    std::vector<double> f, i, c_tilde, o;
    std::vector<double> c_prev, c, tanh_c;
    std::vector<double> w;  // VQC5/6 input
    std::vector<double> q5; // VQC5 output
    std::vector<double> q6; // VQC6 output
};

struct QlstmStepResult {
    double y = 0.0;
    std::vector<double> h;
    QlstmState state;
    QlstmStepCache cache;
};

struct QlstmForwardResult {
    double prediction = 0.0;
    std::vector<QlstmStepCache> caches;
};

namespace detail {

inline void check_qlstm_params(const QlstmParams &p) {
    const std::size_t nq = p.vqc.n_qubits;
    const std::size_t h = p.hidden_size;
    bool ok = h > 0 && p.input_size > 0 && nq > 0;
    for (const auto &v : p.vqcs) {
        ok = ok && v.n_qubits == nq && v.n_layers == p.vqc.n_layers &&
             v.angles.size() == p.vqc.angle_count();
    }
    ok = ok && p.in_proj.rows == h + p.input_size && p.in_proj.cols == nq &&
         p.out_proj_h.rows == nq && p.out_proj_h.cols == h &&
         p.out_proj_y.size() == nq && p.cell_proj.rows == nq &&
         p.cell_proj.cols == h;
    require_shape(ok, "QLSTM parameter shapes inconsistent");
}

// out_j = sum_q P(q, j) a_q
inline std::vector<double> route_to_hidden(const Matrix &cell_proj,
                                           std::span<const double> a) {
    return vecmat(a, cell_proj);
}

// out_q = sum_j P(q, j) z_j / sum_j P(q, j); zero for an empty row.
inline std::vector<double> route_to_qubits(const Matrix &cell_proj,
                                           std::span<const double> z) {
    std::vector<double> out(cell_proj.rows, 0.0);
    for (std::size_t q = 0; q < cell_proj.rows; ++q) {
        double acc = 0.0;
        double weight = 0.0;
        for (std::size_t j = 0; j < cell_proj.cols; ++j) {
            acc += cell_proj(q, j) * z[j];
            weight += cell_proj(q, j);
        }
        out[q] = weight != 0.0 ? acc / weight : 0.0;
    }
    return out;
}

// Adjoint of route_to_qubits.
inline std::vector<double> route_to_qubits_adjoint(const Matrix &cell_proj,
                                                   std::span<const double> dw) {
    std::vector<double> out(cell_proj.cols, 0.0);
    for (std::size_t q = 0; q < cell_proj.rows; ++q) {
        double weight = 0.0;
        for (std::size_t j = 0; j < cell_proj.cols; ++j) {
            weight += cell_proj(q, j);
        }
        if (weight == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < cell_proj.cols; ++j) {
            out[j] += cell_proj(q, j) / weight * dw[q];
        }
    }
    return out;
}

} // namespace detail

[[nodiscard]] inline QlstmStepResult qlstm_step(const QlstmParams &p,
                                                std::span<const double> x,
                                                const QlstmState &state) {
    detail::check_qlstm_params(p);
    const std::size_t hidden = p.hidden_size;
    detail::require_shape(x.size() == p.input_size,
                          "QLSTM input width " + std::to_string(x.size()) +
                              " != " + std::to_string(p.input_size));
    detail::require_shape(state.h.size() == hidden && state.c.size() == hidden,
                          "QLSTM state size mismatch");
    detail::require_finite(x, "QLSTM input");
    detail::require_finite(state.h, "QLSTM hidden state");
    detail::require_finite(state.c, "QLSTM cell state");

    QlstmStepCache k;
    k.v.reserve(hidden + p.input_size);
    k.v.insert(k.v.end(), state.h.begin(), state.h.end());
    k.v.insert(k.v.end(), x.begin(), x.end());
    k.u = vecmat(k.v, p.in_proj);

    const auto gate = [&](std::size_t idx) {
        return detail::route_to_hidden(p.cell_proj,
                                       vqc_forward(p.vqc, p.vqcs[idx], k.u));
    };
    k.f = gate(0);
    k.i = gate(1);
    k.c_tilde = gate(2);
    k.o = gate(3);
    k.c_prev = state.c;
    k.c.resize(hidden);
    k.tanh_c.resize(hidden);
    std::vector<double> z(hidden);
    for (std::size_t j = 0; j < hidden; ++j) {
        k.f[j] = sigmoid(k.f[j]);
        k.i[j] = sigmoid(k.i[j]);
        k.c_tilde[j] = std::tanh(k.c_tilde[j]);
        k.o[j] = sigmoid(k.o[j]);
        k.c[j] = k.f[j] * state.c[j] + k.i[j] * k.c_tilde[j];
        k.tanh_c[j] = std::tanh(k.c[j]);
        z[j] = k.o[j] * k.tanh_c[j];
    }
    k.w = detail::route_to_qubits(p.cell_proj, z);
    k.q5 = vqc_forward(p.vqc, p.vqcs[4], k.w);
    k.q6 = vqc_forward(p.vqc, p.vqcs[5], k.w);

    QlstmStepResult r;
    r.h = vecmat(k.q5, p.out_proj_h);
    r.y = p.out_bias;
    for (std::size_t q = 0; q < k.q6.size(); ++q) {
        r.y += k.q6[q] * p.out_proj_y[q];
    }
    r.state = QlstmState{r.h, k.c};
    r.cache = std::move(k);
    return r;
}

/// Unrolls the cell over the rows of `sequence`; the prediction is y_T.
[[nodiscard]] inline QlstmForwardResult qlstm_forward(const QlstmParams &p,
                                                      const Matrix &sequence) {
    if (sequence.rows == 0) {
        throw EmptyInputError("QLSTM forward on an empty sequence");
    }
    QlstmForwardResult out;
    out.caches.reserve(sequence.rows);
    QlstmState state = QlstmState::zeros(p.hidden_size);
    for (std::size_t t = 0; t < sequence.rows; ++t) {
        auto step = qlstm_step(p, sequence.row(t), state);
        state = std::move(step.state);
        out.prediction = step.y;
        out.caches.push_back(std::move(step.cache));
    }
    return out;
}

/**
 * Gradients of a scalar loss given dLoss/d(y_T). Classical parts use the
 * chain rule, every VQC uses vqc_gradients. The cell_proj entry of the
 * result is always zero since the routing matrix is not trained.
 */
[[nodiscard]] inline QlstmParams
qlstm_backward(const QlstmParams &p, std::span<const QlstmStepCache> caches,
               double upstream) {
    detail::check_qlstm_params(p);
    const std::size_t hidden = p.hidden_size;
    const std::size_t nq = p.vqc.n_qubits;
    if (caches.empty()) {
        throw StateError("QLSTM backward without forward caches");
    }
    for (const auto &k : caches) {
        if (k.v.size() != hidden + p.input_size || k.u.size() != nq ||
            k.w.size() != nq || k.c.size() != hidden || k.q6.size() != nq ||
            k.q5.size() != nq) {
            throw StateError("QLSTM caches do not match parameter shapes");
        }
    }

    QlstmParams g = QlstmParams::zeros(p.input_size, hidden, p.vqc);
    std::fill(g.cell_proj.data.begin(), g.cell_proj.data.end(), 0.0);
    const auto add_angles = [](VqcParams &dst, const std::vector<double> &src) {
        for (std::size_t n = 0; n < src.size(); ++n) {
            dst.angles[n] += src[n];
        }
    };

    std::vector<double> dh(hidden, 0.0);
    std::vector<double> dc(hidden, 0.0);
    for (std::size_t t = caches.size(); t-- > 0;) {
        const auto &k = caches[t];
        const double dy = t + 1 == caches.size() ? upstream : 0.0;

        // Output heads.
        std::vector<double> dq6(nq, 0.0);
        if (dy != 0.0) {
            for (std::size_t q = 0; q < nq; ++q) {
                g.out_proj_y[q] += dy * k.q6[q];
                dq6[q] = dy * p.out_proj_y[q];
            }
            g.out_bias += dy;
        }
        add_outer(g.out_proj_h, k.q5, dh);
        const auto dq5 = matvec(p.out_proj_h, dh);

        auto g5 = vqc_gradients(p.vqc, p.vqcs[4], k.w, dq5);
        auto g6 = vqc_gradients(p.vqc, p.vqcs[5], k.w, dq6);
        add_angles(g.vqcs[4], g5.angle_grads);
        add_angles(g.vqcs[5], g6.angle_grads);
        std::vector<double> dw(nq);
        for (std::size_t q = 0; q < nq; ++q) {
            dw[q] = g5.input_grads[q] + g6.input_grads[q];
        }
        const auto dz = detail::route_to_qubits_adjoint(p.cell_proj, dw);

        // Cell.
        std::vector<double> dpre_f(hidden), dpre_i(hidden), dpre_c(hidden),
            dpre_o(hidden);
        for (std::size_t j = 0; j < hidden; ++j) {
            const double d_o = dz[j] * k.tanh_c[j];
            dc[j] += dz[j] * k.o[j] * (1.0 - k.tanh_c[j] * k.tanh_c[j]);
            dpre_f[j] = dc[j] * k.c_prev[j] * k.f[j] * (1.0 - k.f[j]);
            dpre_i[j] = dc[j] * k.c_tilde[j] * k.i[j] * (1.0 - k.i[j]);
            dpre_c[j] = dc[j] * k.i[j] * (1.0 - k.c_tilde[j] * k.c_tilde[j]);
            dpre_o[j] = d_o * k.o[j] * (1.0 - k.o[j]);
            dc[j] *= k.f[j];
        }

        // Gate circuits share the input u.
        std::vector<double> du(nq, 0.0);
        const std::array<const std::vector<double> *, 4> dpre = {
            &dpre_f, &dpre_i, &dpre_c, &dpre_o};
        for (std::size_t idx = 0; idx < 4; ++idx) {
            const auto dq = matvec(p.cell_proj, *dpre[idx]);
            auto gk = vqc_gradients(p.vqc, p.vqcs[idx], k.u, dq);
            add_angles(g.vqcs[idx], gk.angle_grads);
            for (std::size_t q = 0; q < nq; ++q) {
                du[q] += gk.input_grads[q];
            }
        }
        add_outer(g.in_proj, k.v, du);
        const auto dv = matvec(p.in_proj, du);
        std::copy_n(dv.begin(), hidden, dh.begin());
    }
    return g;
}

// Hooks for the generic trainer.

[[nodiscard]] inline QlstmForwardResult model_forward(const QlstmParams &p,
                                                      const Matrix &window) {
    return qlstm_forward(p, window);
}

[[nodiscard]] inline QlstmParams
model_backward(const QlstmParams &p, std::span<const QlstmStepCache> caches,
               double upstream) {
    return qlstm_backward(p, caches, upstream);
}

} // namespace qlstm
