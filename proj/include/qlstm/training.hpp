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
 * MSE/MAE, Adam, and a mini-batch trainer shared by both model families.
 *
 * A model type P participates by providing `for_each_array` (see params.hpp)
 * and the free functions
 *
 *     model_forward(const P&, const Matrix& window)  -> {prediction, caches}
 *     model_backward(const P&, caches, dLoss/dPrediction) -> P
 *
 * Batch gradients are reduced in sample order, so a run is bit-reproducible
 * for a given (seed, data, config).
 */
#pragma once

#include "qlstm/dataset.hpp"
#include "qlstm/error.hpp"
#include "qlstm/params.hpp"
#include "qlstm/random.hpp"

#include <cmath>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qlstm {

struct TrainConfig {
    double learning_rate = 0.01;
    std::size_t epochs = 100;
    std::size_t batch_size = 16;
    std::uint64_t seed = 0;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_epsilon = 1e-8;
    /// Chronological batches unless set.
    bool shuffle = false;

    void validate() const {
        if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
            throw UsageError("learning rate must be positive");
        }
        if (!(adam_beta1 > 0.0 && adam_beta1 < 1.0 && adam_beta2 > 0.0 &&
              adam_beta2 < 1.0)) {
            throw UsageError("Adam betas must lie in (0, 1)");
        }
        if (!(adam_epsilon > 0.0)) {
            throw UsageError("Adam epsilon must be positive");
        }
        if (batch_size == 0) {
            throw UsageError("batch size must be positive");
        }
    }
};

struct EpochMetrics {
    std::size_t epoch = 0;
    double train_mse = 0.0;
    double test_mse = 0.0;
    double train_mae = 0.0;
    double test_mae = 0.0;
};

struct LossHistory {
    /// Metrics of the parameters before the first update.
    EpochMetrics initial;
    /// One record per completed epoch, epochs numbered from 1.
    std::vector<EpochMetrics> records;
};

struct LossAndGrad {
    double loss = 0.0;
    std::vector<double> grad;
};

namespace detail {
inline void check_pair(std::span<const double> pred, std::span<const double> target) {
    require_shape(pred.size() == target.size(),
                  "prediction/target length mismatch");
    if (pred.empty()) {
        throw EmptyInputError("loss of empty vectors");
    }
}
} // namespace detail

/// Mean squared error and its gradient 2 (p - t) / N.
[[nodiscard]] inline LossAndGrad mse_loss(std::span<const double> pred,
                                          std::span<const double> target) {
    detail::check_pair(pred, target);
    const double n = static_cast<double>(pred.size());
    LossAndGrad out;
    out.grad.resize(pred.size());
    for (std::size_t j = 0; j < pred.size(); ++j) {
        const double d = pred[j] - target[j];
        out.loss += d * d;
        out.grad[j] = 2.0 * d / n;
    }
    out.loss /= n;
    return out;
}

[[nodiscard]] inline double mae_metric(std::span<const double> pred,
                                       std::span<const double> target) {
    detail::check_pair(pred, target);
    double acc = 0.0;
    for (std::size_t j = 0; j < pred.size(); ++j) {
        acc += std::abs(pred[j] - target[j]);
    }
    return acc / static_cast<double>(pred.size());
}

struct AdamMoments {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t t = 0;

    static AdamMoments zeros(std::size_t n) {
        return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0};
    }
};

struct AdamResult {
    std::vector<double> params;
    AdamMoments moments;
};

/// One bias-corrected Adam update.
[[nodiscard]] inline AdamResult adam_step(std::span<const double> params,
                                          std::span<const double> grads,
                                          AdamMoments moments,
                                          const TrainConfig &cfg) {
    detail::require_shape(grads.size() == params.size() &&
                              moments.m.size() == params.size() &&
                              moments.v.size() == params.size(),
                          "Adam: parameter/gradient/moment length mismatch");
    moments.t += 1;
    const double t = static_cast<double>(moments.t);
    const double c1 = 1.0 - std::pow(cfg.adam_beta1, t);
    const double c2 = 1.0 - std::pow(cfg.adam_beta2, t);
    AdamResult out{std::vector<double>(params.begin(), params.end()), std::move(moments)};
    auto &m = out.moments.m;
    auto &v = out.moments.v;
    for (std::size_t n = 0; n < params.size(); ++n) {
        m[n] = cfg.adam_beta1 * m[n] + (1.0 - cfg.adam_beta1) * grads[n];
        v[n] = cfg.adam_beta2 * v[n] + (1.0 - cfg.adam_beta2) * grads[n] * grads[n];
        const double m_hat = m[n] / c1;
        const double v_hat = v[n] / c2;
        out.params[n] -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.adam_epsilon);
    }
    return out;
}

template <class P>
concept SequenceModel = requires(const P &p, const Matrix &w) {
    { model_forward(p, w).prediction } -> std::convertible_to<double>;
    { model_backward(p, model_forward(p, w).caches, 1.0) } -> std::same_as<P>;
    { flatten(p) } -> std::same_as<std::vector<double>>;
};

/// One prediction per sample, in order. Parameters are not modified.
template <SequenceModel P>
[[nodiscard]] std::vector<double> predict(const P &params, const WindowedDataset &ds,
                                          std::size_t batch_size = 16) {
    if (batch_size == 0) {
        throw UsageError("batch size must be positive");
    }
    std::vector<double> out;
    out.reserve(ds.size());
    for (std::size_t start = 0; start < ds.size(); start += batch_size) {
        const std::size_t end = std::min(ds.size(), start + batch_size);
        for (std::size_t j = start; j < end; ++j) {
            out.push_back(model_forward(params, ds.samples[j].window).prediction);
        }
    }
    return out;
}

[[nodiscard]] inline std::vector<double> targets_of(const WindowedDataset &ds) {
    std::vector<double> t;
    t.reserve(ds.size());
    for (const auto &s : ds.samples) {
        t.push_back(s.target);
    }
    return t;
}

struct Metrics {
    double mse = 0.0;
    double mae = 0.0;
};

/// MSE and MAE over a dataset; zeros for an empty one.
template <SequenceModel P>
[[nodiscard]] Metrics evaluate(const P &params, const WindowedDataset &ds) {
    if (ds.empty()) {
        return {};
    }
    const auto pred = predict(params, ds);
    const auto target = targets_of(ds);
    return {mse_loss(pred, target).loss, mae_metric(pred, target)};
}

template <class P> struct TrainResult {
    P params;
    LossHistory history;
};

/**
 * Mini-batch Adam on the MSE of the train split. Each epoch visits every
 * training sample once (chronologically unless cfg.shuffle), averages
 * gradients per batch, applies one Adam update per batch, then records full
 * train/test MSE and MAE. Entries whose trainable mask is 0 keep their
 * value; `mask` overrides the model's own mask when given.
 */
template <SequenceModel P>
[[nodiscard]] TrainResult<P> train(P params, const WindowedDataset &train_set,
                                   const WindowedDataset &test_set,
                                   const TrainConfig &cfg,
                                   std::optional<std::vector<std::uint8_t>> mask = {}) {
    cfg.validate();
    if (train_set.empty()) {
        throw EmptyInputError("training split is empty");
    }
    auto flat = flatten(params);
    const auto trainable = mask ? std::move(*mask) : trainable_mask(params);
    detail::require_shape(trainable.size() == flat.size(),
                          "trainable mask length mismatch");
    AdamMoments moments = AdamMoments::zeros(flat.size());
    Rng rng(cfg.seed);

    auto record = [&](std::size_t epoch) {
        const Metrics tr = evaluate(params, train_set);
        const Metrics te = evaluate(params, test_set);
        EpochMetrics m{epoch, tr.mse, te.mse, tr.mae, te.mae};
        if (!std::isfinite(m.train_mse) || !std::isfinite(m.test_mse) ||
            !std::isfinite(m.train_mae) || !std::isfinite(m.test_mae)) {
            throw NumericError("training diverged at epoch " + std::to_string(epoch) +
                               ": non-finite loss");
        }
        return m;
    };

    TrainResult<P> result{params, {}};
    if (cfg.epochs == 0) {
        return result;
    }
    result.history.initial = record(0);

    std::vector<std::size_t> order(train_set.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad(flat.size());
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        if (cfg.shuffle) {
            for (std::size_t n = order.size(); n > 1; --n) {
                std::swap(order[n - 1], order[rng.below(n)]);
            }
        }
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t end = std::min(order.size(), start + cfg.batch_size);
            const double batch_n = static_cast<double>(end - start);
            std::fill(grad.begin(), grad.end(), 0.0);
            for (std::size_t b = start; b < end; ++b) {
                const auto &smp = train_set.samples[order[b]];
                auto fwd = model_forward(params, smp.window);
                // d(batch MSE)/d(prediction) = 2 (p - t) / N
                const double upstream = 2.0 * (fwd.prediction - smp.target) / batch_n;
                const auto g = flatten(model_backward(params, fwd.caches, upstream));
                for (std::size_t n = 0; n < grad.size(); ++n) {
                    grad[n] += g[n];
                }
            }
            for (std::size_t n = 0; n < grad.size(); ++n) {
                if (trainable[n] == 0) {
                    grad[n] = 0.0;
                }
            }
            auto step = adam_step(flat, grad, std::move(moments), cfg);
            flat = std::move(step.params);
            moments = std::move(step.moments);
            for (std::size_t n = 0; n < flat.size(); ++n) {
                if (!std::isfinite(flat[n])) {
                    throw NumericError("training diverged at epoch " +
                                       std::to_string(epoch) +
                                       ": non-finite parameter");
                }
            }
            unflatten(params, flat);
        }
        result.history.records.push_back(record(epoch));
    }
    result.params = std::move(params);
    return result;
}

} // namespace qlstm
