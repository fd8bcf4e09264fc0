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
 * Implementations of the `qlstm` subcommands, independent of flag parsing.
 *
 * Output files:
 *   train    <out> model file, <stem>.report.json, <stem>.loss.csv,
 *            <stem>.predictions.csv
 *   predict  CSV `timestamp,actual,predicted`
 *   compare  JSON report at <out> and overlay CSV <stem>.overlay.csv with
 *            `timestamp,actual,lstm_pred,qlstm_pred`
 *   synth, interpolate  data CSV `date,<features...>,<target>`
 *
 * Prediction and overlay values are in the original (de-normalised) units;
 * loss histories are in normalised units.
 */
#pragma once

#include "qlstm/dataset.hpp"
#include "qlstm/error.hpp"
#include "qlstm/interpolate.hpp"
#include "qlstm/model_file.hpp"
#include "qlstm/series.hpp"
#include "qlstm/synthetic.hpp"
#include "qlstm/training.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace qlstm::cli {

struct TrainOptions {
    std::string model = "lstm";
    std::string data;
    std::size_t lookback = 4;
    std::size_t hidden = 4;
    std::size_t epochs = 100;
    double lr = 0.01;
    std::size_t batch_size = 16;
    std::uint64_t seed = 0;
    std::size_t qubits = 4;
    std::size_t layers = 2;
    std::string encoding = "angle_arctan";
    double train_fraction = 0.8;
    bool shuffle = false;
    std::string out;
    /// Defaults to <stem of out>.report.json.
    std::string report;
};

struct TrainOutputs {
    std::string model_file;
    std::string report;
    std::string loss_csv;
    std::string predictions_csv;
};

struct PredictOptions {
    std::string model_file;
    std::string data;
    std::string out;
};

struct CompareOptions {
    std::string lstm_file;
    std::string qlstm_file;
    std::string data;
    std::string out;
    std::optional<std::size_t> head;
};

struct SynthOptions {
    std::string kind = "sine";
    std::size_t length = 200;
    std::size_t features = 3;
    std::uint64_t seed = 0;
    std::string out;
};

struct InterpolateOptions {
    std::string in;
    std::string method = "linear";
    std::string out;
};

/// One evaluated row in original units.
struct PredictionRow {
    Date timestamp;
    double actual = 0.0;
    double predicted = 0.0;
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline std::string sibling(const std::string &path, const std::string &suffix) {
    std::filesystem::path p(path);
    p.replace_extension();
    return p.string() + suffix;
}

inline void write_text(const std::string &path, const std::string &text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write '" + path + "'");
    }
    out << text;
}

inline void check_schema(const ModelFile &mf, const RawSeries &raw) {
    qlstm::detail::require_shape(
        raw.n_features() == mf.input_size(),
        "data has " + std::to_string(raw.n_features()) + " features, model expects " +
            std::to_string(mf.input_size()));
    qlstm::detail::require_shape(raw.feature_names == mf.feature_names,
                                 "data feature columns differ from the model's");
}

inline std::vector<double> predict_any(const AnyParams &params,
                                       const WindowedDataset &ds) {
    return std::visit([&](const auto &p) { return predict(p, ds); }, params);
}

/// Predictions of `mf` on every window of `raw`, de-normalised. Actual values
/// are taken verbatim from the raw target column.
inline std::vector<PredictionRow> prediction_rows(const ModelFile &mf,
                                                  const RawSeries &raw) {
    check_schema(mf, raw);
    const auto ds = make_windows(mf.scaler.apply(raw), mf.lookback);
    const auto pred = predict_any(mf.params, ds);
    std::vector<PredictionRow> rows;
    rows.reserve(ds.size());
    for (std::size_t j = 0; j < ds.size(); ++j) {
        rows.push_back({ds.samples[j].timestamp, raw.target[j + mf.lookback],
                        mf.scaler.target.invert(pred[j])});
    }
    return rows;
}

inline std::string prediction_csv(const std::vector<PredictionRow> &rows) {
    std::string s = "timestamp,actual,predicted\n";
    for (const auto &r : rows) {
        s += r.timestamp.to_string() + "," + format_double(r.actual) + "," +
             format_double(r.predicted) + "\n";
    }
    return s;
}

inline ojson metrics_json(const EpochMetrics &m) {
    return ojson{{"epoch", m.epoch},
                 {"train_mse", m.train_mse},
                 {"test_mse", m.test_mse},
                 {"train_mae", m.train_mae},
                 {"test_mae", m.test_mae}};
}

} // namespace detail

/// Trains one model on a CSV dataset and writes the model file and report.
inline TrainOutputs run_train(const TrainOptions &o) {
    if (o.data.empty()) {
        throw UsageError("--data is required");
    }
    if (o.out.empty()) {
        throw UsageError("--out is required");
    }
    const ModelKind kind = parse_model_kind(o.model);
    if (o.hidden == 0) {
        throw UsageError("--hidden must be positive");
    }
    VqcDescriptor desc{o.qubits, o.layers, parse_encoding(o.encoding)};
    if (kind == ModelKind::Qlstm && (o.qubits == 0 || o.qubits > kMaxQubits)) {
        throw UsageError("--qubits must lie in [1, 24]");
    }
    check_fraction(o.train_fraction);

    TrainConfig cfg;
    cfg.learning_rate = o.lr;
    cfg.epochs = o.epochs;
    cfg.batch_size = o.batch_size;
    cfg.seed = o.seed;
    cfg.shuffle = o.shuffle;
    cfg.validate();

    const RawSeries raw = load_csv(o.data);
    raw.validate();
    auto normalized = fit_normalize(raw, o.train_fraction);
    const auto ds = make_windows(normalized.series, o.lookback);
    const auto [train_set, test_set] = split_chronological(ds, o.train_fraction);

    ModelFile mf;
    mf.lookback = o.lookback;
    mf.feature_names = raw.feature_names;
    mf.target_name = raw.target_name;
    mf.scaler = normalized.scaler;
    mf.train_config = cfg;
    mf.train_fraction = o.train_fraction;
    mf.seed = o.seed;

    LossHistory history;
    if (kind == ModelKind::Lstm) {
        auto r = train(LstmParams::random(raw.n_features(), o.hidden, o.seed),
                       train_set, test_set, cfg);
        mf.params = std::move(r.params);
        history = std::move(r.history);
    } else {
        auto r = train(QlstmParams::random(raw.n_features(), o.hidden, desc, o.seed),
                       train_set, test_set, cfg);
        mf.params = std::move(r.params);
        history = std::move(r.history);
    }

    TrainOutputs out;
    out.model_file = o.out;
    out.report = o.report.empty() ? detail::sibling(o.out, ".report.json") : o.report;
    out.loss_csv = detail::sibling(out.report, ".loss.csv");
    out.predictions_csv = detail::sibling(out.report, ".predictions.csv");
    if (out.report == out.model_file) {
        throw UsageError("report path must differ from the model file path");
    }
    save_model_file(out.model_file, mf);

    // Summary uses the final epoch, or the untrained model when epochs == 0.
    EpochMetrics final_metrics;
    if (!history.records.empty()) {
        final_metrics = history.records.back();
    } else {
        const Metrics tr = std::visit([&](const auto &p) { return evaluate(p, train_set); },
                                      mf.params);
        const Metrics te = std::visit([&](const auto &p) { return evaluate(p, test_set); },
                                      mf.params);
        final_metrics = {0, tr.mse, te.mse, tr.mae, te.mae};
    }

    const auto rows = detail::prediction_rows(mf, raw);
    detail::ojson report;
    report["model_kind"] = model_kind_name(kind);
    report["samples"] = {{"train", train_set.size()}, {"test", test_set.size()}};
    detail::ojson records = detail::ojson::array();
    std::string loss_csv = "epoch,train_mse,test_mse,train_mae,test_mae\n";
    for (const auto &m : history.records) {
        records.push_back(detail::metrics_json(m));
        loss_csv += std::to_string(m.epoch) + "," + format_double(m.train_mse) + "," +
                    format_double(m.test_mse) + "," + format_double(m.train_mae) +
                    "," + format_double(m.test_mae) + "\n";
    }
    report["loss_history"] = {
        {"initial", history.records.empty() ? detail::ojson(nullptr)
                                            : detail::metrics_json(history.initial)},
        {"records", std::move(records)}};
    detail::ojson pred_rows = detail::ojson::array();
    for (std::size_t j = 0; j < rows.size(); ++j) {
        pred_rows.push_back({{"timestamp", rows[j].timestamp.to_string()},
                             {"split", j < train_set.size() ? "train" : "test"},
                             {"actual", rows[j].actual},
                             {"predicted", rows[j].predicted}});
    }
    report["predictions"] = std::move(pred_rows);
    report["summary"] = {{"train_mse", final_metrics.train_mse},
                         {"test_mse", final_metrics.test_mse},
                         {"train_mae", final_metrics.train_mae},
                         {"test_mae", final_metrics.test_mae},
                         {"units", "normalized"}};
    detail::write_text(out.report, report.dump(1) + "\n");
    detail::write_text(out.loss_csv, loss_csv);
    detail::write_text(out.predictions_csv, detail::prediction_csv(rows));
    return out;
}

/// Writes `timestamp,actual,predicted` for every window of the data file.
inline std::size_t run_predict(const PredictOptions &o) {
    if (o.model_file.empty() || o.data.empty() || o.out.empty()) {
        throw UsageError("--model-file, --data and --out are required");
    }
    const ModelFile mf = load_model_file(o.model_file);
    const RawSeries raw = load_csv(o.data);
    raw.validate();
    const auto rows = detail::prediction_rows(mf, raw);
    detail::write_text(o.out, detail::prediction_csv(rows));
    return rows.size();
}

struct OverlayRow {
    Date timestamp;
    double actual = 0.0;
    double lstm_pred = 0.0;
    double qlstm_pred = 0.0;
};

struct CompareResult {
    std::vector<OverlayRow> overlay;
    Metrics lstm;
    Metrics qlstm;
};

/**
 * Joint evaluation of two model files on one dataset. Rows are aligned on
 * the timestamps both models can predict; `head` keeps only the first K
 * aligned rows. Summary metrics are computed over exactly the emitted rows,
 * in original units.
 */
inline CompareResult run_compare(const CompareOptions &o) {
    if (o.lstm_file.empty() || o.qlstm_file.empty() || o.data.empty() ||
        o.out.empty()) {
        throw UsageError("--lstm-file, --qlstm-file, --data and --out are required");
    }
    if (o.head && *o.head == 0) {
        throw UsageError("--head must be positive");
    }
    const ModelFile a = load_model_file(o.lstm_file);
    const ModelFile b = load_model_file(o.qlstm_file);
    const RawSeries raw = load_csv(o.data);
    raw.validate();
    const auto rows_a = detail::prediction_rows(a, raw);
    const auto rows_b = detail::prediction_rows(b, raw);

    std::unordered_map<long, const PredictionRow *> by_day;
    for (const auto &r : rows_b) {
        by_day.emplace(r.timestamp.serial(), &r);
    }
    CompareResult result;
    for (const auto &r : rows_a) {
        if (o.head && result.overlay.size() >= *o.head) {
            break;
        }
        const auto it = by_day.find(r.timestamp.serial());
        if (it == by_day.end()) {
            continue;
        }
        result.overlay.push_back({r.timestamp, r.actual, r.predicted, it->second->predicted});
    }
    if (result.overlay.empty()) {
        throw InsufficientDataError("models share no predictable timestamps");
    }
    std::vector<double> actual, pa, pb;
    for (const auto &r : result.overlay) {
        actual.push_back(r.actual);
        pa.push_back(r.lstm_pred);
        pb.push_back(r.qlstm_pred);
    }
    result.lstm = {mse_loss(pa, actual).loss, mae_metric(pa, actual)};
    result.qlstm = {mse_loss(pb, actual).loss, mae_metric(pb, actual)};

    detail::ojson report;
    report["models"] = {
        {"lstm", {{"file", o.lstm_file}, {"kind", model_kind_name(a.kind())}}},
        {"qlstm", {{"file", o.qlstm_file}, {"kind", model_kind_name(b.kind())}}}};
    report["head"] = o.head ? detail::ojson(*o.head) : detail::ojson(nullptr);
    report["rows"] = result.overlay.size();
    report["summary"] = {
        {"lstm", {{"mse", result.lstm.mse}, {"mae", result.lstm.mae}}},
        {"qlstm", {{"mse", result.qlstm.mse}, {"mae", result.qlstm.mae}}},
        {"units", "original"}};
    detail::ojson overlay = detail::ojson::array();
    std::string csv = "timestamp,actual,lstm_pred,qlstm_pred\n";
    for (const auto &r : result.overlay) {
        overlay.push_back({{"timestamp", r.timestamp.to_string()},
                           {"actual", r.actual},
                           {"lstm_pred", r.lstm_pred},
                           {"qlstm_pred", r.qlstm_pred}});
        csv += r.timestamp.to_string() + "," + format_double(r.actual) + "," +
               format_double(r.lstm_pred) + "," + format_double(r.qlstm_pred) + "\n";
    }
    report["overlay"] = std::move(overlay);
    detail::write_text(o.out, report.dump(1) + "\n");
    detail::write_text(detail::sibling(o.out, ".overlay.csv"), csv);
    return result;
}

inline RawSeries run_synth(const SynthOptions &o) {
    if (o.out.empty()) {
        throw UsageError("--out is required");
    }
    auto s = generate_synthetic(parse_synth_kind(o.kind), o.length, o.features, o.seed);
    save_csv(o.out, s);
    return s;
}

inline RawSeries run_interpolate(const InterpolateOptions &o) {
    if (o.in.empty() || o.out.empty()) {
        throw UsageError("--in and --out are required");
    }
    const auto method = parse_interp_method(o.method);
    auto daily = interpolate_to_daily(load_csv(o.in), method);
    save_csv(o.out, daily);
    return daily;
}

} // namespace qlstm::cli
