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
 * Flag parsing for the `qlstm` tool. Exit codes: 0 success, 1 runtime or
 * data error, 2 usage error.
 */
#pragma once

#include "qlstm/commands.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <ostream>
#include <string>

namespace qlstm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitUsage = 2;

inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout,
                   std::ostream &err = std::cerr) {
    CLI::App app{"LSTM and quantum LSTM time-series forecasting"};
    app.require_subcommand(1);

    TrainOptions train_opts;
    auto *train_cmd = app.add_subcommand("train", "train an LSTM or QLSTM model");
    train_cmd->add_option("--model", train_opts.model, "lstm or qlstm")
        ->check(CLI::IsMember({"lstm", "qlstm"}));
    train_cmd->add_option("--data", train_opts.data, "input CSV")->required();
    train_cmd->add_option("--lookback", train_opts.lookback)->check(CLI::PositiveNumber);
    train_cmd->add_option("--hidden", train_opts.hidden)->check(CLI::PositiveNumber);
    train_cmd->add_option("--epochs", train_opts.epochs);
    train_cmd->add_option("--lr", train_opts.lr)->check(CLI::PositiveNumber);
    train_cmd->add_option("--batch", train_opts.batch_size)->check(CLI::PositiveNumber);
    train_cmd->add_option("--seed", train_opts.seed);
    train_cmd->add_option("--qubits", train_opts.qubits)->check(CLI::Range(1, 24));
    train_cmd->add_option("--layers", train_opts.layers);
    train_cmd->add_option("--encoding", train_opts.encoding)
        ->check(CLI::IsMember({"angle_arctan", "angle_linear"}));
    train_cmd->add_option("--train-fraction", train_opts.train_fraction)
        ->check(CLI::Range(0.0, 1.0));
    train_cmd->add_flag("--shuffle", train_opts.shuffle);
    train_cmd->add_option("--out", train_opts.out, "model file path")->required();
    train_cmd->add_option("--report", train_opts.report, "report JSON path");

    PredictOptions predict_opts;
    auto *predict_cmd = app.add_subcommand("predict", "predict with a trained model");
    predict_cmd->add_option("--model-file", predict_opts.model_file)->required();
    predict_cmd->add_option("--data", predict_opts.data)->required();
    predict_cmd->add_option("--out", predict_opts.out)->required();

    CompareOptions compare_opts;
    std::size_t head = 0;
    auto *compare_cmd = app.add_subcommand("compare", "compare two trained models");
    compare_cmd->add_option("--lstm-file", compare_opts.lstm_file)->required();
    compare_cmd->add_option("--qlstm-file", compare_opts.qlstm_file)->required();
    compare_cmd->add_option("--data", compare_opts.data)->required();
    compare_cmd->add_option("--out", compare_opts.out)->required();
    auto *head_opt = compare_cmd->add_option("--head", head, "keep the first K rows")
                         ->check(CLI::PositiveNumber);

    SynthOptions synth_opts;
    auto *synth_cmd = app.add_subcommand("synth", "generate a synthetic dataset");
    synth_cmd->add_option("--kind", synth_opts.kind)
        ->check(CLI::IsMember({"sine", "ar1", "trend_sine"}));
    synth_cmd->add_option("--len", synth_opts.length);
    synth_cmd->add_option("--features", synth_opts.features)->check(CLI::PositiveNumber);
    synth_cmd->add_option("--seed", synth_opts.seed);
    synth_cmd->add_option("--out", synth_opts.out)->required();

    InterpolateOptions interp_opts;
    auto *interp_cmd =
        app.add_subcommand("interpolate", "resample a series onto daily rows");
    interp_cmd->add_option("--in", interp_opts.in)->required();
    interp_cmd->add_option("--method", interp_opts.method)
        ->check(CLI::IsMember({"linear", "cubic"}));
    interp_cmd->add_option("--out", interp_opts.out)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp &) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (train_cmd->parsed()) {
            const auto files = run_train(train_opts);
            out << "wrote " << files.model_file << ", " << files.report << "\n";
        } else if (predict_cmd->parsed()) {
            const auto n = run_predict(predict_opts);
            out << "wrote " << n << " predictions to " << predict_opts.out << "\n";
        } else if (compare_cmd->parsed()) {
            if (head_opt->count() > 0) {
                compare_opts.head = head;
            }
            const auto r = run_compare(compare_opts);
            out << "lstm mse " << format_double(r.lstm.mse) << " mae "
                << format_double(r.lstm.mae) << "; qlstm mse "
                << format_double(r.qlstm.mse) << " mae " << format_double(r.qlstm.mae)
                << " over " << r.overlay.size() << " rows\n";
        } else if (synth_cmd->parsed()) {
            const auto s = run_synth(synth_opts);
            out << "wrote " << s.rows() << " rows to " << synth_opts.out << "\n";
        } else if (interp_cmd->parsed()) {
            const auto s = run_interpolate(interp_opts);
            out << "wrote " << s.rows() << " rows to " << interp_opts.out << "\n";
        }
    } catch (const UsageError &e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitOk;
}

} // namespace qlstm::cli
