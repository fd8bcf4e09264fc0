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

#include "qlstm/lstm.hpp"
#include "qlstm/qlstm_cell.hpp"
#include "qlstm/synthetic.hpp"
#include "qlstm/training.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

using namespace qlstm;

namespace toy {

/// y = a * sum(window) + b. Small enough to train by hand in the test.
struct Linear {
    double a = 0.0;
    double b = 0.0;

    template <class F> void for_each_array(F &&f) {
        f("a", std::span<double>(&a, 1), true);
        f("b", std::span<double>(&b, 1), true);
    }
    template <class F> void for_each_array(F &&f) const {
        f("a", std::span<const double>(&a, 1), true);
        f("b", std::span<const double>(&b, 1), true);
    }
};

struct Forward {
    double prediction;
    double caches; // sum of the window
};

inline double window_sum(const Matrix &w) {
    double s = 0.0;
    for (double x : w.data) {
        s += x;
    }
    return s;
}

inline Forward model_forward(const Linear &p, const Matrix &w) {
    const double s = window_sum(w);
    return {p.a * s + p.b, s};
}

inline Linear model_backward(const Linear &, double s, double upstream) {
    return {upstream * s, upstream};
}

} // namespace toy

namespace {

WindowedDataset sine_windows(std::size_t rows, std::size_t lookback, std::uint64_t seed = 7) {
    return make_windows(generate_synthetic(SynthKind::Sine, rows, 3, seed), lookback);
}

WindowedDataset constant_dataset(std::size_t n, double target) {
    WindowedDataset ds{2, 1, {}};
    for (std::size_t k = 0; k < n; ++k) {
        Sample s;
        s.window = Matrix(2, 1);
        s.window(0, 0) = 0.1 * static_cast<double>(k % 5);
        s.window(1, 0) = -0.05 * static_cast<double>(k % 3);
        s.target = target;
        s.timestamp = Date(2020, 1, 1).plus_days(static_cast<long>(k));
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

} // namespace

TEST(Loss, mse_and_mae_examples) {
    const std::vector<double> p{1.0, 2.0}, t{1.0, 4.0};
    const auto l = mse_loss(p, t);
    EXPECT_EQ(l.loss, 2.0);
    EXPECT_EQ(l.grad[0], 0.0);
    EXPECT_EQ(l.grad[1], -2.0);
    EXPECT_EQ(mae_metric(p, t), 1.0);
    const std::vector<double> same{0.3, -0.7};
    EXPECT_EQ(mse_loss(same, same).loss, 0.0);
    EXPECT_THROW((void)mse_loss(std::vector<double>{}, std::vector<double>{}),
                 EmptyInputError);
    EXPECT_THROW((void)mse_loss(p, std::vector<double>{1.0}), ShapeError);
}

TEST(Adam, zero_gradient_keeps_parameters) {
    TrainConfig cfg;
    const std::vector<double> p{0.5, -1.25}, g{0.0, 0.0};
    const auto r = adam_step(p, g, AdamMoments::zeros(2), cfg);
    EXPECT_EQ(r.params, p);
    EXPECT_EQ(r.moments.t, 1U);
}

TEST(Adam, first_step_moves_by_learning_rate) {
    TrainConfig cfg;
    const std::vector<double> p{0.0}, g{5.0};
    const auto r = adam_step(p, g, AdamMoments::zeros(1), cfg);
    // Bias-corrected m/sqrt(v) is exactly sign(g) on step one.
    EXPECT_NEAR(r.params[0], -0.01, 1e-10);
}

TEST(Adam, quadratic_descent_matches_scalar_reference) {
    TrainConfig cfg;
    cfg.learning_rate = 0.1;
    std::vector<double> p{1.0};
    auto mom = AdamMoments::zeros(1);
    double ref = 1.0, m = 0.0, v = 0.0;
    for (int t = 1; t <= 100; ++t) {
        const std::vector<double> g{2.0 * p[0]};
        auto r = adam_step(p, g, std::move(mom), cfg);
        p = r.params;
        mom = std::move(r.moments);

        const double gr = 2.0 * ref;
        m = 0.9 * m + 0.1 * gr;
        v = 0.999 * v + 0.001 * gr * gr;
        const double mh = m / (1.0 - std::pow(0.9, t));
        const double vh = v / (1.0 - std::pow(0.999, t));
        ref -= 0.1 * mh / (std::sqrt(vh) + 1e-8);
    }
    EXPECT_LT(std::abs(p[0]), 0.1);
    EXPECT_NEAR(p[0], ref, 1e-14);
}

TEST(Adam, shape_errors) {
    TrainConfig cfg;
    EXPECT_THROW((void)adam_step(std::vector<double>{1.0}, std::vector<double>{1.0, 2.0},
                                 AdamMoments::zeros(1), cfg),
                 ShapeError);
}

TEST(TrainConfig, validation) {
    TrainConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.learning_rate = 0.0;
    EXPECT_THROW(cfg.validate(), UsageError);
    cfg = {};
    cfg.adam_beta1 = 1.0;
    EXPECT_THROW(cfg.validate(), UsageError);
    cfg = {};
    cfg.batch_size = 0;
    EXPECT_THROW(cfg.validate(), UsageError);
}

TEST(Train, zero_epochs_returns_parameters_unchanged) {
    const auto ds = sine_windows(40, 4);
    const auto [tr, te] = split_chronological(ds);
    const auto p = LstmParams::random(3, 4, 1);
    TrainConfig cfg;
    cfg.epochs = 0;
    const auto r = train(p, tr, te, cfg);
    EXPECT_EQ(flatten(r.params), flatten(p));
    EXPECT_TRUE(r.history.records.empty());
}

TEST(Train, matches_independent_full_batch_reference) {
    // Full-batch Adam on the toy model, re-derived by hand.
    WindowedDataset ds{1, 1, {}};
    for (int k = 0; k < 6; ++k) {
        Sample s;
        s.window = Matrix(1, 1);
        s.window(0, 0) = 0.2 * k;
        s.target = 0.5 * (0.2 * k) + 0.3;
        ds.samples.push_back(s);
    }
    TrainConfig cfg;
    cfg.epochs = 25;
    cfg.batch_size = 6;
    cfg.learning_rate = 0.05;
    const auto r = train(toy::Linear{}, ds, WindowedDataset{}, cfg);

    double a = 0.0, b = 0.0;
    double ma = 0.0, mb = 0.0, va = 0.0, vb = 0.0;
    for (int t = 1; t <= 25; ++t) {
        double ga = 0.0, gb = 0.0;
        for (const auto &s : ds.samples) {
            const double x = s.window(0, 0);
            const double up = 2.0 * (a * x + b - s.target) / 6.0;
            ga += up * x;
            gb += up;
        }
        ma = 0.9 * ma + 0.1 * ga;
        mb = 0.9 * mb + 0.1 * gb;
        va = 0.999 * va + 0.001 * ga * ga;
        vb = 0.999 * vb + 0.001 * gb * gb;
        const double c1 = 1.0 - std::pow(0.9, t);
        const double c2 = 1.0 - std::pow(0.999, t);
        a -= 0.05 * (ma / c1) / (std::sqrt(va / c2) + 1e-8);
        b -= 0.05 * (mb / c1) / (std::sqrt(vb / c2) + 1e-8);
    }
    EXPECT_NEAR(r.params.a, a, 1e-12);
    EXPECT_NEAR(r.params.b, b, 1e-12);
    ASSERT_EQ(r.history.records.size(), 25U);
    EXPECT_LT(r.history.records.back().train_mse, r.history.initial.train_mse);
}

TEST(Train, head_bias_only_fits_constant_target) {
    const auto ds = constant_dataset(32, 0.7);
    auto p = LstmParams::zeros(1, 3);
    std::vector<std::uint8_t> mask;
    p.for_each_array([&](const char *name, std::span<const double> v, bool) {
        mask.insert(mask.end(), v.size(), std::strcmp(name, "head_b") == 0 ? 1 : 0);
    });
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.learning_rate = 0.05;
    const auto r = train(p, ds, WindowedDataset{}, cfg, mask);
    EXPECT_LT(r.history.records.back().train_mse, 1e-6);
    auto moved = flatten(r.params);
    const auto before = flatten(p);
    for (std::size_t k = 0; k < moved.size(); ++k) {
        if (mask[k] == 0) {
            EXPECT_EQ(moved[k], before[k]);
        }
    }
}

TEST(Train, deterministic_for_fixed_seed) {
    const auto ds = sine_windows(60, 4);
    const auto [tr, te] = split_chronological(ds);
    TrainConfig cfg;
    cfg.epochs = 5;
    cfg.shuffle = true;
    cfg.seed = 9;
    const auto a = train(LstmParams::random(3, 4, 9), tr, te, cfg);
    const auto b = train(LstmParams::random(3, 4, 9), tr, te, cfg);
    EXPECT_EQ(flatten(a.params), flatten(b.params));
    cfg.seed = 10;
    const auto c = train(LstmParams::random(3, 4, 9), tr, te, cfg);
    EXPECT_NE(flatten(a.params), flatten(c.params));
}

TEST(Train, history_integrity) {
    const auto ds = sine_windows(60, 4);
    const auto [tr, te] = split_chronological(ds);
    TrainConfig cfg;
    cfg.epochs = 7;
    const auto r = train(LstmParams::random(3, 4, 2), tr, te, cfg);
    EXPECT_EQ(r.history.initial.epoch, 0U);
    ASSERT_EQ(r.history.records.size(), 7U);
    for (std::size_t k = 0; k < 7; ++k) {
        const auto &m = r.history.records[k];
        EXPECT_EQ(m.epoch, k + 1);
        EXPECT_TRUE(std::isfinite(m.train_mse) && std::isfinite(m.test_mse));
        EXPECT_GE(m.train_mse, 0.0);
        EXPECT_LE(m.train_mae * m.train_mae, m.train_mse + 1e-15);
    }
    const auto final_metrics = evaluate(r.params, tr);
    EXPECT_EQ(final_metrics.mse, r.history.records.back().train_mse);
}

TEST(Train, fixed_parameters_stay_fixed_for_qlstm) {
    const auto ds = sine_windows(20, 2);
    const auto [tr, te] = split_chronological(ds);
    const VqcDescriptor d{2, 1, Encoding::AngleArctan};
    const auto p = QlstmParams::random(3, 3, d, 4);
    TrainConfig cfg;
    cfg.epochs = 2;
    const auto r = train(p, tr, te, cfg);
    EXPECT_EQ(r.params.cell_proj, p.cell_proj);
    EXPECT_NE(r.params.in_proj, p.in_proj);
}

TEST(Train, errors) {
    const auto ds = sine_windows(30, 4);
    TrainConfig cfg;
    EXPECT_THROW((void)train(LstmParams::zeros(3, 2), WindowedDataset{}, ds, cfg),
                 EmptyInputError);
    cfg.learning_rate = -1.0;
    EXPECT_THROW((void)train(LstmParams::zeros(3, 2), ds, ds, cfg), UsageError);

    auto bad = constant_dataset(4, 1e308);
    TrainConfig ok;
    try {
        (void)train(toy::Linear{1.0, -1e308}, bad, WindowedDataset{}, ok);
        FAIL() << "expected NumericError";
    } catch (const NumericError &e) {
        EXPECT_NE(std::string(e.what()).find("epoch 0"), std::string::npos) << e.what();
    }
}

TEST(Predict, invariant_to_batch_size_and_pure) {
    const auto ds = sine_windows(50, 4);
    const auto p = LstmParams::random(3, 4, 3);
    const auto before = flatten(p);
    const auto a = predict(p, ds, 1);
    const auto b = predict(p, ds, 16);
    ASSERT_EQ(a.size(), ds.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_NEAR(a[k], b[k], 1e-14);
    }
    EXPECT_EQ(flatten(p), before);
    EXPECT_EQ(predict(p, ds), a);
}

TEST(Predict, empty_dataset_metrics) {
    const auto m = evaluate(LstmParams::zeros(3, 2), WindowedDataset{});
    EXPECT_EQ(m.mse, 0.0);
    EXPECT_EQ(m.mae, 0.0);
}
