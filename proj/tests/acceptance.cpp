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
 * Acceptance suite. Each criterion prints one PASS/FAIL line; the process
 * exits non-zero if any criterion fails.
 */

#include "qlstm/commands.hpp"
#include "qlstm/params.hpp"

#include "test_util.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "json.hpp"

using namespace qlstm;
namespace fs = std::filesystem;
using qlstm::testing::five_point_difference;
using qlstm::testing::relative_error;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double max_amp_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        m = std::max(m, std::abs(a[k] - b[k]));
    }
    return m;
}

Outcome c1_simulator_oracle() {
    Rng rng(101);
    double worst = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng.below(3);
        const auto c = qlstm::testing::random_circuit(rng, n, rng.below(31));
        const auto s = apply_circuit(init_zero(n), c);
        std::vector<Complex> psi(std::size_t{1} << n, 0.0);
        psi[0] = 1.0;
        const auto ref = qlstm::testing::dense_apply(qlstm::testing::dense_unitary(c), psi);
        worst = std::max(worst, max_amp_diff(s.amplitudes(), ref));
    }
    return {worst < 1e-12, "max amplitude diff " + fmt("%.3g", worst) + " over 200 circuits"};
}

Outcome c2_norm() {
    Rng rng(202);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng.below(6);
        const auto c = qlstm::testing::random_circuit(rng, n, 1 + rng.below(80));
        worst = std::max(worst, std::abs(apply_circuit(init_zero(n), c).norm() - 1.0));
    }
    return {worst < 1e-10, "max |norm - 1| " + fmt("%.3g", worst) + " over 1000 circuits"};
}

Outcome c3_parameter_shift() {
    Rng rng(303);
    const double h = 1e-5;
    double worst = 0.0;
    std::size_t checked = 0;
    for (int inst = 0; inst < 100; ++inst) {
        const VqcDescriptor d{4, 2, inst % 2 == 0 ? Encoding::AngleArctan
                                                  : Encoding::AngleLinear};
        auto p = VqcParams::zeros(d);
        for (double &a : p.angles) {
            a = rng.uniform(-std::numbers::pi, std::numbers::pi);
        }
        std::vector<double> v(4);
        for (double &x : v) {
            x = rng.uniform(-1.5, 1.5);
        }
        // Full Jacobian: one unit upstream per output qubit.
        for (std::size_t out = 0; out < 4; ++out) {
            std::vector<double> up(4, 0.0);
            up[out] = 1.0;
            const auto g = vqc_gradients(d, p, v, up);
            for (std::size_t k = 0; k < p.angles.size(); ++k) {
                const double fd = qlstm::testing::central_difference(
                    p.angles, k, h, [&](const std::vector<double> &a) {
                        VqcParams q = p;
                        q.angles = a;
                        return vqc_forward(d, q, v)[out];
                    });
                worst = std::max(worst, std::abs(g.angle_grads[k] - fd));
                ++checked;
            }
            for (std::size_t k = 0; k < 4; ++k) {
                const double fd = qlstm::testing::central_difference(
                    v, k, h,
                    [&](const std::vector<double> &x) { return vqc_forward(d, p, x)[out]; });
                worst = std::max(worst, std::abs(g.input_grads[k] - fd));
                ++checked;
            }
        }
    }
    return {worst < 1e-6, "max abs error " + fmt("%.3g", worst) + " over " +
                              std::to_string(checked) + " derivatives, 100 instances"};
}

/// Worst relative error between analytic and five-point FD gradients of the
/// scalar model output over every trainable entry.
template <class P, class Forward>
double gradient_check(const P &params, const std::vector<double> &analytic,
                      Forward &&forward, double floor, std::size_t &checked) {
    const auto flat = flatten(params);
    const auto mask = trainable_mask(params);
    double worst = 0.0;
    for (std::size_t k = 0; k < flat.size(); ++k) {
        if (mask[k] == 0) {
            continue;
        }
        const double fd = five_point_difference(flat, k, 1e-4, [&](const std::vector<double> &x) {
            P q = params;
            unflatten(q, x);
            return forward(q);
        });
        worst = std::max(worst, relative_error(analytic[k], fd, floor));
        ++checked;
    }
    return worst;
}

Matrix random_sequence(std::size_t len, std::size_t width, Rng &rng) {
    Matrix m(len, width);
    for (double &x : m.data) {
        x = rng.uniform(-1.0, 1.0);
    }
    return m;
}

constexpr double kRelFloor = 1e-5;

Outcome c4_lstm_bptt() {
    Rng rng(404);
    double worst = 0.0;
    std::size_t checked = 0;
    for (int cfg = 0; cfg < 50; ++cfg) {
        const std::size_t hidden = 1 + rng.below(5);
        const std::size_t input = 1 + rng.below(3);
        const std::size_t len = 1 + rng.below(8);
        auto p = LstmParams::zeros(input, hidden);
        p.for_each_array([&](const char *, std::span<double> v, bool) {
            for (double &x : v) {
                x = rng.uniform(-1.0, 1.0);
            }
        });
        const auto seq = random_sequence(len, input, rng);
        const auto g = flatten(lstm_backward(p, lstm_forward(p, seq).caches, 1.0));
        worst = std::max(worst, gradient_check(p, g,
                                               [&](const LstmParams &q) {
                                                   return lstm_forward(q, seq).prediction;
                                               },
                                               kRelFloor, checked));
    }
    return {worst < 1e-6, "max relative error " + fmt("%.3g", worst) + " over " +
                              std::to_string(checked) + " gradients, 50 configurations"};
}

Outcome c5_qlstm_hybrid() {
    Rng rng(505);
    double worst = 0.0;
    std::size_t checked = 0;
    for (int cfg = 0; cfg < 24; ++cfg) {
        const VqcDescriptor d{4, 1 + rng.below(2), Encoding::AngleArctan};
        const std::size_t input = 1 + rng.below(3);
        const std::size_t len = 1 + rng.below(4);
        auto p = QlstmParams::random(input, 2, d, rng.below(1u << 30));
        p.for_each_array([&](const char *name, std::span<double> v, bool trainable) {
            if (trainable && std::string(name).rfind("vqc", 0) != 0) {
                for (double &x : v) {
                    x = rng.uniform(-1.5, 1.5);
                }
            }
        });
        const auto seq = random_sequence(len, input, rng);
        const auto g = flatten(qlstm_backward(p, qlstm_forward(p, seq).caches, 1.0));
        worst = std::max(worst, gradient_check(p, g,
                                               [&](const QlstmParams &q) {
                                                   return qlstm_forward(q, seq).prediction;
                                               },
                                               kRelFloor, checked));
    }
    return {worst < 1e-4, "max relative error " + fmt("%.3g", worst) + " over " +
                              std::to_string(checked) + " gradients, 24 configurations"};
}

Outcome c6_trainability(const fs::path &dir) {
    cli::SynthOptions so;
    so.kind = "sine";
    so.length = 200;
    so.out = (dir / "sine.csv").string();
    (void)cli::run_synth(so);
    std::string detail;
    bool pass = true;
    for (const std::string model : {"lstm", "qlstm"}) {
        cli::TrainOptions to; // default config: lr 0.01, 100 epochs, batch 16
        to.model = model;
        to.data = so.out;
        to.lookback = 4;
        to.hidden = 4;
        to.out = (dir / (model + ".json")).string();
        const auto files = cli::run_train(to);
        const auto report = nlohmann::json::parse(slurp(files.report));
        const double initial = report["loss_history"]["initial"]["train_mse"];
        const double final_mse = report["loss_history"]["records"].back()["train_mse"];
        const bool ok = final_mse <= initial / 5.0 && final_mse < 0.01;
        pass = pass && ok;
        detail += model + " train MSE " + fmt("%.4g", initial) + " -> " +
                  fmt("%.4g", final_mse) + (ok ? "" : " (FAILED)") + "; ";
    }
    return {pass, detail + "100 epochs each"};
}

/// Recomputes MSE of both prediction columns from the overlay CSV.
std::pair<double, double> overlay_mse(const fs::path &csv, std::vector<std::string> &stamps) {
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    double sa = 0.0, sb = 0.0;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string date, a, l, q;
        std::getline(ss, date, ',');
        std::getline(ss, a, ',');
        std::getline(ss, l, ',');
        std::getline(ss, q, ',');
        const double actual = std::stod(a);
        sa += (std::stod(l) - actual) * (std::stod(l) - actual);
        sb += (std::stod(q) - actual) * (std::stod(q) - actual);
        stamps.push_back(date);
        ++n;
    }
    return {sa / static_cast<double>(n), sb / static_cast<double>(n)};
}

Outcome c7_compare(const fs::path &dir) {
    cli::SynthOptions so;
    so.kind = "trend_sine";
    so.length = 1100;
    so.seed = 3;
    so.out = (dir / "long.csv").string();
    (void)cli::run_synth(so);
    for (const std::string model : {"lstm", "qlstm"}) {
        cli::TrainOptions to;
        to.model = model;
        to.data = so.out;
        to.epochs = 1;
        to.out = (dir / (model + "_long.json")).string();
        (void)cli::run_train(to);
    }
    auto compare = [&](std::optional<std::size_t> head, const std::string &name) {
        cli::CompareOptions co;
        co.lstm_file = (dir / "lstm_long.json").string();
        co.qlstm_file = (dir / "qlstm_long.json").string();
        co.data = so.out;
        co.out = (dir / (name + ".json")).string();
        co.head = head;
        (void)cli::run_compare(co);
        return nlohmann::json::parse(slurp(co.out));
    };
    const auto full = compare(std::nullopt, "cmp_full");
    const auto head = compare(1000, "cmp_head");

    std::vector<std::string> full_stamps, head_stamps;
    const auto [fl, fq] = overlay_mse(dir / "cmp_full.overlay.csv", full_stamps);
    const auto [hl, hq] = overlay_mse(dir / "cmp_head.overlay.csv", head_stamps);
    const double err = std::max(
        {std::abs(fl - full["summary"]["lstm"]["mse"].get<double>()),
         std::abs(fq - full["summary"]["qlstm"]["mse"].get<double>()),
         std::abs(hl - head["summary"]["lstm"]["mse"].get<double>()),
         std::abs(hq - head["summary"]["qlstm"]["mse"].get<double>())});
    const bool head_ok =
        head_stamps.size() == 1000 && head["rows"] == 1000 && full_stamps.size() == 1096 &&
        std::equal(head_stamps.begin(), head_stamps.end(), full_stamps.begin());
    return {err < 1e-12 && head_ok,
            "summary vs recomputed MSE diff " + fmt("%.3g", err) + "; head rows " +
                std::to_string(head_stamps.size()) + " of " +
                std::to_string(full_stamps.size()) +
                (head_ok ? " (prefix ok)" : " (head slice wrong)")};
}

Outcome c8_determinism(const fs::path &dir) {
    cli::SynthOptions so;
    so.kind = "ar1";
    so.length = 80;
    so.seed = 8;
    so.out = (dir / "det.csv").string();
    (void)cli::run_synth(so);
    bool pass = true;
    std::string detail;
    for (const std::string model : {"lstm", "qlstm"}) {
        std::string texts[2][2];
        for (int run = 0; run < 2; ++run) {
            cli::TrainOptions to;
            to.model = model;
            to.data = so.out;
            to.epochs = model == "lstm" ? 20 : 3;
            to.seed = 42;
            to.shuffle = true;
            to.out = (dir / (model + "_run" + std::to_string(run) + ".json")).string();
            const auto files = cli::run_train(to);
            texts[run][0] = slurp(files.model_file);
            texts[run][1] = slurp(files.report);
        }
        const bool same = texts[0][0] == texts[1][0] && texts[0][1] == texts[1][1] &&
                          !texts[0][0].empty() && !texts[0][1].empty();
        pass = pass && same;
        detail += model + (same ? " identical; " : " DIFFER; ");
    }
    return {pass, detail + "model file and report compared byte for byte"};
}

/// Inclusive day count of the whole months y0-m0 .. y1-m1, walked by hand.
long whole_month_days(int y0, int m0, int y1, int m1) {
    static const int days[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    long n = 0;
    for (int y = y0, m = m0; y < y1 || (y == y1 && m <= m1);) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        n += (m == 2 && leap) ? 29 : days[m - 1];
        if (++m == 13) {
            m = 1;
            ++y;
        }
    }
    return n;
}

Outcome c9_data_protocol(const fs::path &dir) {
    // Split sizes.
    WindowedDataset ds{1, 1, {}};
    ds.samples.resize(1000);
    const auto [tr, te] = split_chronological(ds, 0.8);
    const bool split_ok = tr.size() == 800 && te.size() == 200;

    // Normalisation round trip on raw-scale values.
    Rng rng(909);
    RawSeries raw;
    raw.feature_names = {"a", "b", "c"};
    raw.features = Matrix(500, 3);
    for (std::size_t r = 0; r < 500; ++r) {
        raw.dates.push_back(Date(2004, 2, 1).plus_days(static_cast<long>(r)));
        for (std::size_t c = 0; c < 3; ++c) {
            raw.features(r, c) = rng.uniform(-1.0, 1.0) * std::pow(10.0, c);
        }
        raw.target.push_back(rng.uniform(0.0, 1.0));
    }
    const auto norm = fit_normalize(raw, 0.8);
    const auto back = norm.scaler.invert(norm.series);
    double rt = 0.0;
    for (std::size_t k = 0; k < raw.features.data.size(); ++k) {
        rt = std::max(rt, std::abs(back.features.data[k] - raw.features.data[k]));
    }
    for (std::size_t r = 0; r < raw.rows(); ++r) {
        rt = std::max(rt, std::abs(back.target[r] - raw.target[r]));
    }

    // Monthly Feb 2004 .. Dec 2020 through the interpolate command.
    const auto monthly = dir / "monthly.csv";
    std::size_t monthly_rows = 0;
    {
        std::ofstream out(monthly);
        out << "date,x1,x2,close\n";
        for (int y = 2004, m = 2; y < 2020 || (y == 2020 && m <= 12);) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%04d-%02d-01", y, m);
            out << buf << ',' << monthly_rows << ',' << std::sin(monthly_rows * 0.1) << ','
                << 1000 + 3 * monthly_rows << '\n';
            ++monthly_rows;
            if (++m == 13) {
                m = 1;
                ++y;
            }
        }
    }
    std::size_t daily_rows = 0;
    for (const std::string method : {"linear", "cubic"}) {
        cli::InterpolateOptions io{monthly.string(), method, (dir / "daily.csv").string()};
        (void)cli::run_interpolate(io);
        daily_rows = load_csv(io.out).rows();
        if (static_cast<long>(daily_rows) != whole_month_days(2004, 2, 2020, 12)) {
            break;
        }
    }
    const long oracle = whole_month_days(2004, 2, 2020, 12);
    const bool count_ok = monthly_rows == 203 && static_cast<long>(daily_rows) == oracle &&
                          daily_rows == 6179;
    return {split_ok && rt < 1e-12 && count_ok,
            "split " + std::to_string(tr.size()) + "/" + std::to_string(te.size()) +
                "; round trip " + fmt("%.3g", rt) + "; " + std::to_string(monthly_rows) +
                " monthly rows -> " + std::to_string(daily_rows) + " daily (oracle " +
                std::to_string(oracle) + ")"};
}

Outcome c10_gate_ranges() {
    Rng rng(1010);
    const double s_lo = 1.0 / (1.0 + std::exp(1.0));
    const double s_hi = 1.0 / (1.0 + std::exp(-1.0));
    const double t_hi = std::tanh(1.0);
    std::size_t steps = 0, violations = 0;
    while (steps < 10000) {
        const VqcDescriptor d{1 + rng.below(4), rng.below(3),
                              rng.below(2) ? Encoding::AngleArctan : Encoding::AngleLinear};
        const std::size_t input = 1 + rng.below(4);
        const std::size_t hidden = 1 + rng.below(5);
        auto p = QlstmParams::random(input, hidden, d, rng.below(1u << 30));
        p.for_each_array([&](const char *name, std::span<double> v, bool trainable) {
            if (trainable && std::string(name).rfind("vqc", 0) != 0) {
                for (double &x : v) {
                    x = rng.uniform(-3.0, 3.0);
                }
            }
        });
        QlstmState s = QlstmState::zeros(hidden);
        for (int t = 0; t < 50; ++t, ++steps) {
            std::vector<double> x(input);
            for (double &v : x) {
                v = rng.uniform(-5.0, 5.0);
            }
            const auto r = qlstm_step(p, x, s);
            for (std::size_t j = 0; j < hidden; ++j) {
                for (double g : {r.cache.i[j], r.cache.f[j], r.cache.o[j]}) {
                    violations += (g < s_lo || g > s_hi) ? 1 : 0;
                }
                violations += std::abs(r.cache.c_tilde[j]) > t_hi ? 1 : 0;
            }
            s = r.state;
        }
    }
    return {violations == 0, std::to_string(violations) + " violations over " +
                                 std::to_string(steps) + " steps"};
}

} // namespace

int main() {
    const fs::path dir = qlstm::testing::scratch_dir("acceptance");
    struct Criterion {
        const char *name;
        double budget_s; // 0 = no runtime bound
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"simulator oracle equivalence", 10.0, c1_simulator_oracle},
        {"norm preservation", 0.0, c2_norm},
        {"parameter-shift exactness", 60.0, c3_parameter_shift},
        {"LSTM BPTT correctness", 0.0, c4_lstm_bptt},
        {"QLSTM hybrid gradient correctness", 300.0, c5_qlstm_hybrid},
        {"trainability on synthetic sine", 600.0, [&] { return c6_trainability(dir); }},
        {"comparative pipeline", 0.0, [&] { return c7_compare(dir); }},
        {"training determinism", 0.0, [&] { return c8_determinism(dir); }},
        {"data protocol", 0.0, [&] { return c9_data_protocol(dir); }},
        {"gate-range invariants", 0.0, c10_gate_ranges},
    };
    int failures = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const auto &c = criteria[k];
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (c.budget_s > 0.0 && secs >= c.budget_s) {
            o.pass = false;
            o.detail += "; over the " + fmt("%.0f", c.budget_s) + " s budget";
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s  [%2zu] %-34s %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", k + 1, c.name,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
                criteria.size());
    return failures == 0 ? 0 : 1;
}
