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
 * Versioned JSON model file.
 *
 * Layout (keys in this order):
 *
 *     format_version   integer, currently 1
 *     model_kind       "lstm" | "qlstm"
 *     hyperparameters  {input_size, hidden, lookback, n_qubits, n_layers, encoding}
 *     columns          {features: [names], target: name}
 *     scaler           {features: [{min, max}], target: {min, max}}
 *     train_config     {learning_rate, epochs, batch_size, seed, adam_beta1,
 *                       adam_beta2, adam_epsilon, shuffle, train_fraction}
 *     seed             integer
 *     parameters       {name: [flat row-major values]}
 *
 * Doubles are written in shortest round-trip form, so save -> load -> save
 * reproduces the file byte for byte.
 */
#pragma once

#include "qlstm/dataset.hpp"
#include "qlstm/error.hpp"
#include "qlstm/lstm.hpp"
#include "qlstm/qlstm_cell.hpp"
#include "qlstm/training.hpp"

#include "json.hpp"

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace qlstm {

inline constexpr int kModelFormatVersion = 1;

enum class ModelKind { Lstm, Qlstm };

inline const char *model_kind_name(ModelKind k) {
    return k == ModelKind::Lstm ? "lstm" : "qlstm";
}

inline ModelKind parse_model_kind(const std::string &s) {
    if (s == "lstm") {
        return ModelKind::Lstm;
    }
    if (s == "qlstm") {
        return ModelKind::Qlstm;
    }
    throw UsageError("unknown model kind '" + s + "'");
}

using AnyParams = std::variant<LstmParams, QlstmParams>;

struct ModelFile {
    int format_version = kModelFormatVersion;
    std::size_t lookback = 1;
    std::vector<std::string> feature_names;
    std::string target_name = "target";
    Scaler scaler;
    TrainConfig train_config;
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    AnyParams params;

    [[nodiscard]] ModelKind kind() const {
        return std::holds_alternative<LstmParams>(params) ? ModelKind::Lstm
                                                          : ModelKind::Qlstm;
    }
    [[nodiscard]] std::size_t input_size() const {
        return std::visit([](const auto &p) { return p.input_size; }, params);
    }
    [[nodiscard]] std::size_t hidden_size() const {
        return std::visit([](const auto &p) { return p.hidden_size; }, params);
    }
};

namespace detail {

using ojson = nlohmann::ordered_json;

inline ojson range_to_json(const ColumnRange &r) {
    return ojson{{"min", r.min}, {"max", r.max}};
}

inline ColumnRange range_from_json(const ojson &j) {
    return {j.at("min").get<double>(), j.at("max").get<double>()};
}

} // namespace detail

[[nodiscard]] inline std::string model_file_to_string(const ModelFile &mf) {
    using detail::ojson;
    ojson j;
    j["format_version"] = mf.format_version;
    j["model_kind"] = model_kind_name(mf.kind());
    ojson hp;
    hp["input_size"] = mf.input_size();
    hp["hidden"] = mf.hidden_size();
    hp["lookback"] = mf.lookback;
    if (const auto *q = std::get_if<QlstmParams>(&mf.params)) {
        hp["n_qubits"] = q->vqc.n_qubits;
        hp["n_layers"] = q->vqc.n_layers;
        hp["encoding"] = encoding_name(q->vqc.encoding);
    }
    j["hyperparameters"] = std::move(hp);
    j["columns"] = ojson{{"features", mf.feature_names}, {"target", mf.target_name}};
    ojson scaler_features = ojson::array();
    for (const auto &r : mf.scaler.features) {
        scaler_features.push_back(detail::range_to_json(r));
    }
    j["scaler"] = ojson{{"features", std::move(scaler_features)},
                        {"target", detail::range_to_json(mf.scaler.target)}};
    const auto &c = mf.train_config;
    j["train_config"] = ojson{{"learning_rate", c.learning_rate},
                              {"epochs", c.epochs},
                              {"batch_size", c.batch_size},
                              {"seed", c.seed},
                              {"adam_beta1", c.adam_beta1},
                              {"adam_beta2", c.adam_beta2},
                              {"adam_epsilon", c.adam_epsilon},
                              {"shuffle", c.shuffle},
                              {"train_fraction", mf.train_fraction}};
    j["seed"] = mf.seed;
    ojson params = ojson::object();
    std::visit(
        [&](const auto &p) {
            p.for_each_array([&](const char *name, std::span<const double> v, bool) {
                params[name] = std::vector<double>(v.begin(), v.end());
            });
        },
        mf.params);
    j["parameters"] = std::move(params);
    return j.dump(1) + "\n";
}

/// Throws CompatibilityError for anything that is not a readable model file
/// of the supported version.
[[nodiscard]] inline ModelFile model_file_from_string(const std::string &text) {
    using detail::ojson;
    ojson j;
    try {
        j = ojson::parse(text);
    } catch (const std::exception &e) {
        throw CompatibilityError(std::string("model file is not valid JSON: ") + e.what());
    }
    try {
        ModelFile mf;
        mf.format_version = j.at("format_version").get<int>();
        if (mf.format_version != kModelFormatVersion) {
            throw CompatibilityError("unsupported model file version " +
                                     std::to_string(mf.format_version) +
                                     " (expected " +
                                     std::to_string(kModelFormatVersion) + ")");
        }
        const auto kind = j.at("model_kind").get<std::string>();
        const auto &hp = j.at("hyperparameters");
        const auto input = hp.at("input_size").get<std::size_t>();
        const auto hidden = hp.at("hidden").get<std::size_t>();
        mf.lookback = hp.at("lookback").get<std::size_t>();
        if (input == 0 || hidden == 0 || mf.lookback == 0) {
            throw CompatibilityError("model file has zero-sized dimensions");
        }
        mf.feature_names = j.at("columns").at("features").get<std::vector<std::string>>();
        mf.target_name = j.at("columns").at("target").get<std::string>();
        for (const auto &r : j.at("scaler").at("features")) {
            mf.scaler.features.push_back(detail::range_from_json(r));
        }
        mf.scaler.target = detail::range_from_json(j.at("scaler").at("target"));
        if (mf.scaler.features.size() != input || mf.feature_names.size() != input) {
            throw CompatibilityError("scaler/column count does not match input size");
        }
        const auto &c = j.at("train_config");
        mf.train_config.learning_rate = c.at("learning_rate").get<double>();
        mf.train_config.epochs = c.at("epochs").get<std::size_t>();
        mf.train_config.batch_size = c.at("batch_size").get<std::size_t>();
        mf.train_config.seed = c.at("seed").get<std::uint64_t>();
        mf.train_config.adam_beta1 = c.at("adam_beta1").get<double>();
        mf.train_config.adam_beta2 = c.at("adam_beta2").get<double>();
        mf.train_config.adam_epsilon = c.at("adam_epsilon").get<double>();
        mf.train_config.shuffle = c.at("shuffle").get<bool>();
        mf.train_fraction = c.at("train_fraction").get<double>();
        mf.seed = j.at("seed").get<std::uint64_t>();

        if (kind == "lstm") {
            mf.params = LstmParams::zeros(input, hidden);
        } else if (kind == "qlstm") {
            VqcDescriptor d;
            d.n_qubits = hp.at("n_qubits").get<std::size_t>();
            d.n_layers = hp.at("n_layers").get<std::size_t>();
            d.encoding = parse_encoding(hp.at("encoding").get<std::string>());
            if (d.n_qubits == 0 || d.n_qubits > kMaxQubits) {
                throw CompatibilityError("model file qubit count out of range");
            }
            mf.params = QlstmParams::zeros(input, hidden, d);
        } else {
            throw CompatibilityError("unknown model kind '" + kind + "'");
        }
        const auto &params = j.at("parameters");
        std::size_t seen = 0;
        std::visit(
            [&](auto &p) {
                p.for_each_array([&](const char *name, std::span<double> v, bool) {
                    const auto values = params.at(name).get<std::vector<double>>();
                    if (values.size() != v.size()) {
                        throw CompatibilityError(std::string("parameter '") + name +
                                                 "' has " +
                                                 std::to_string(values.size()) +
                                                 " values, expected " +
                                                 std::to_string(v.size()));
                    }
                    std::copy(values.begin(), values.end(), v.begin());
                    ++seen;
                });
            },
            mf.params);
        if (seen != params.size()) {
            throw CompatibilityError("model file has unexpected parameter arrays");
        }
        return mf;
    } catch (const CompatibilityError &) {
        throw;
    } catch (const std::exception &e) {
        throw CompatibilityError(std::string("malformed model file: ") + e.what());
    }
}

inline void save_model_file(const std::string &path, const ModelFile &mf) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw FormatError("cannot write '" + path + "'");
    }
    out << model_file_to_string(mf);
}

[[nodiscard]] inline ModelFile load_model_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CompatibilityError("cannot open model file '" + path + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_file_from_string(ss.str());
}

} // namespace qlstm
