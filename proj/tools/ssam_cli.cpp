// ssam: train, evaluate, and compare the LSTM self-attention forecaster on
// Yahoo-layout OHLCV histories.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ssam/baselines.hpp"
#include "ssam/errors.hpp"
#include "ssam/evaluation.hpp"
#include "ssam/indicators.hpp"
#include "ssam/market_data.hpp"
#include "ssam/model_store.hpp"
#include "ssam/preprocess.hpp"
#include "ssam/training.hpp"

namespace {

using nlohmann::json;

struct PipelineFlags {
  std::string feature = "Adj Close";
  double ratio = 0.9;
  std::size_t time_step = 10;
  std::size_t hidden = 50;
  std::size_t attention_dim = 0;  // 0 follows --hidden
  std::size_t batch = 10;
  std::size_t epochs = 50;
  double lr = 0.001;
  std::uint64_t seed = 42;
  std::string fit_scaler_on = "train";
  bool no_shuffle = false;

  std::size_t resolved_attention_dim() const { return attention_dim ? attention_dim : hidden; }
};

void add_pipeline_flags(CLI::App* cmd, PipelineFlags& f) {
  cmd->add_option("--feature", f.feature, "Input column")->capture_default_str();
  cmd->add_option("--ratio", f.ratio, "Train fraction of the series")->capture_default_str();
  cmd->add_option("--time-step", f.time_step, "Window length T")->capture_default_str();
  cmd->add_option("--hidden", f.hidden, "LSTM units")->capture_default_str();
  cmd->add_option("--attention-dim", f.attention_dim, "Attention width (default: --hidden)");
  cmd->add_option("--batch", f.batch, "Batch size")->capture_default_str();
  cmd->add_option("--epochs", f.epochs, "Training epochs")->capture_default_str();
  cmd->add_option("--lr", f.lr, "Adam learning rate")->capture_default_str();
  cmd->add_option("--seed", f.seed, "Init and shuffle seed")->capture_default_str();
  cmd->add_option("--fit-scaler-on", f.fit_scaler_on, "Scaler span: train|all")
      ->check(CLI::IsMember({"train", "all"}))
      ->capture_default_str();
  cmd->add_flag("--no-shuffle", f.no_shuffle, "Keep window order across epochs");
}

ssam::ModelConfig model_config_from(const PipelineFlags& f, bool use_attention) {
  ssam::ModelConfig cfg;
  cfg.hidden_units = f.hidden;
  cfg.time_step = f.time_step;
  cfg.attention_dim = f.resolved_attention_dim();
  cfg.seed = f.seed;
  cfg.use_attention = use_attention;
  return cfg;
}

ssam::TrainConfig train_config_from(const PipelineFlags& f) {
  ssam::TrainConfig tc;
  tc.batch_size = f.batch;
  tc.epochs = f.epochs;
  tc.shuffle_seed = f.seed;
  tc.shuffle = !f.no_shuffle;
  tc.hyper.alpha = f.lr;
  return tc;
}

ssam::DatasetOptions dataset_options_from(const PipelineFlags& f) {
  ssam::DatasetOptions opts;
  opts.feature = f.feature;
  opts.split_ratio = f.ratio;
  opts.fit_scaler_on_all = (f.fit_scaler_on == "all");
  opts.time_step = f.time_step;
  return opts;
}

json manifest_base(const std::string& command) {
  json m;
  m["command"] = command;
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  m["started_at"] = buf;
  return m;
}

void fill_flags(json& m, const PipelineFlags& f) {
  m["feature"] = f.feature;
  m["ratio"] = f.ratio;
  m["time_step"] = f.time_step;
  m["hidden"] = f.hidden;
  m["attention_dim"] = f.resolved_attention_dim();
  m["batch"] = f.batch;
  m["epochs"] = f.epochs;
  m["lr"] = f.lr;
  m["seed"] = f.seed;
  m["fit_scaler_on"] = f.fit_scaler_on;
  m["shuffle"] = !f.no_shuffle;
}

void emit_manifest(const json& m, const std::string& path) {
  if (path.empty()) {
    std::cerr << "manifest: " << m.dump() << "\n";
    return;
  }
  std::ofstream out(path);
  if (!out) {
    throw ssam::Error("cannot open manifest path '" + path + "' for writing");
  }
  out << m.dump(2) << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw ssam::Error("cannot open '" + path + "' for writing");
  }
  out << text;
}

double scaler_gap(const ssam::ScalerParams& a, const ssam::ScalerParams& b) {
  return std::max(std::fabs(a.min - b.min), std::fabs(a.max - b.max));
}

// ---------------------------------------------------------------------------

int run_train(const std::string& csv_path, const std::string& out_model,
              const PipelineFlags& flags, const std::string& manifest_path,
              const std::string& loss_out) {
  const auto records = ssam::load_csv_file(csv_path);
  const auto prepared = ssam::prepare_dataset(records, dataset_options_from(flags));
  const ssam::ModelConfig model_cfg = model_config_from(flags, true);
  const ssam::TrainConfig train_cfg = train_config_from(flags);

  const auto t0 = std::chrono::steady_clock::now();
  const ssam::TrainResult result = ssam::train(model_cfg, train_cfg, prepared.train, &std::cerr);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  ssam::ModelBundle bundle;
  bundle.params = result.params;
  bundle.scaler = prepared.scaler;
  bundle.train.epochs = train_cfg.epochs;
  bundle.train.batch_size = train_cfg.batch_size;
  bundle.train.learning_rate = train_cfg.hyper.alpha;
  bundle.train.beta1 = train_cfg.hyper.beta1;
  bundle.train.beta2 = train_cfg.hyper.beta2;
  bundle.train.epsilon = train_cfg.hyper.epsilon;
  bundle.train.shuffle_seed = train_cfg.shuffle_seed;
  bundle.train.shuffle = train_cfg.shuffle;
  bundle.data.feature = flags.feature;
  bundle.data.split_ratio = flags.ratio;
  bundle.data.fit_scaler_on_all = (flags.fit_scaler_on == "all");
  ssam::save_file(bundle, out_model);

  std::string loss_csv = "epoch,loss\n";
  char buf[64];
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", e + 1, result.loss_history[e]);
    loss_csv += buf;
  }
  if (loss_out.empty()) {
    std::cout << loss_csv;
  } else {
    write_text(loss_out, loss_csv);
  }

  json m = manifest_base("train");
  m["csv_path"] = csv_path;
  m["out_model_path"] = out_model;
  fill_flags(m, flags);
  m["elapsed_seconds"] = elapsed;
  emit_manifest(m, manifest_path.empty() ? out_model + ".manifest.json" : manifest_path);
  std::cerr << "saved model to " << out_model << " (" << elapsed << "s)\n";
  return 0;
}

int run_evaluate(const std::string& model_path, const std::string& csv_path,
                 const std::string& report_path, const std::string& pred_out,
                 const std::string& manifest_path) {
  const ssam::ModelBundle bundle = ssam::load_file(model_path);
  const auto records = ssam::load_csv_file(csv_path);

  ssam::DatasetOptions opts;
  opts.feature = bundle.data.feature;
  opts.split_ratio = bundle.data.split_ratio;
  opts.fit_scaler_on_all = bundle.data.fit_scaler_on_all;
  opts.time_step = bundle.params.config.time_step;

  const auto t0 = std::chrono::steady_clock::now();
  const auto prepared = ssam::prepare_dataset(records, opts, &bundle.scaler);
  try {
    const ssam::ScalerParams refit =
        opts.fit_scaler_on_all ? ssam::fit_scaler(ssam::select_feature(records, opts.feature))
                               : ssam::fit_scaler(prepared.split.train);
    if (scaler_gap(refit, bundle.scaler) > 1e-9) {
      std::cerr << "warning: split mismatch; this CSV fits scaler [" << refit.min << ", "
                << refit.max << "] but the model was trained with [" << bundle.scaler.min << ", "
                << bundle.scaler.max << "]\n";
    }
  } catch (const ssam::DataError& e) {
    std::cerr << "warning: split mismatch check skipped: " << e.what() << "\n";
  }

  const ssam::EvaluationReport report =
      ssam::evaluate(bundle.params, bundle.scaler, prepared.test, prepared.split.test.dates);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_text(report_path, ssam::report_to_csv(report));
  if (!pred_out.empty()) {
    std::string pred_csv = "date,predicted\n";
    char buf[96];
    for (const auto& row : report.rows) {
      std::snprintf(buf, sizeof(buf), "%s,%.6f\n", row.date.c_str(), row.predicted);
      pred_csv += buf;
    }
    write_text(pred_out, pred_csv);
  }
  std::cout << ssam::report_summary(report) << "\n";

  json m = manifest_base("evaluate");
  m["model_path"] = model_path;
  m["csv_path"] = csv_path;
  m["report_path"] = report_path;
  if (!pred_out.empty()) m["pred_out"] = pred_out;
  m["elapsed_seconds"] = elapsed;
  emit_manifest(m, manifest_path.empty() ? report_path + ".manifest.json" : manifest_path);
  return 0;
}

int run_predict(const std::string& model_path, const std::string& csv_path,
                const std::string& manifest_path) {
  const ssam::ModelBundle bundle = ssam::load_file(model_path);
  const auto records = ssam::load_csv_file(csv_path);
  const ssam::PriceSeries series = ssam::select_feature(records, bundle.data.feature);
  const std::size_t t_len = bundle.params.config.time_step;
  if (series.size() < t_len) {
    throw ssam::DataError("need at least " + std::to_string(t_len) + " rows, got " +
                          std::to_string(series.size()));
  }

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> window(series.values.end() - t_len, series.values.end());
  for (auto& v : window) v = ssam::scale(bundle.scaler, v);
  const double scaled_pred =
      ssam::model_forward(bundle.params, ssam::window_matrix(window));
  const double predicted = ssam::inverse_scale(bundle.scaler, scaled_pred);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::cerr << "one-step-ahead forecast after " << series.dates.back() << "\n";
  std::printf("predicted=%.6f\n", predicted);

  json m = manifest_base("predict");
  m["model_path"] = model_path;
  m["csv_path"] = csv_path;
  m["elapsed_seconds"] = elapsed;
  emit_manifest(m, manifest_path);
  return 0;
}

int run_compare(const std::string& csv_path, const PipelineFlags& flags, std::size_t sma_window,
                const std::string& out_path, const std::string& manifest_path) {
  const auto records = ssam::load_csv_file(csv_path);
  const auto prepared = ssam::prepare_dataset(records, dataset_options_from(flags));
  const ssam::TrainConfig train_cfg = train_config_from(flags);

  std::string table = "model,rmse,time_sec,r2\n";
  const auto append_row = [&table](const std::string& name, const std::string& rmse,
                                   const std::string& time_sec, const std::string& r2_text) {
    table += name + "," + rmse + "," + time_sec + "," + r2_text + "\n";
  };
  const auto metric = [](double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return std::string(buf);
  };

  struct NeuralRow {
    std::string name;
    std::size_t hidden;
    bool use_attention;
  };
  const std::vector<NeuralRow> neural_rows = {
      {"LSTM(unit1)", 1, false},
      {"LSTM(unit50)", 50, false},
      {"LSTM-SSAM", flags.hidden, true},
  };
  int failed_stages = 0;
  for (const auto& row : neural_rows) {
    try {
      PipelineFlags row_flags = flags;
      row_flags.hidden = row.hidden;
      if (!row.use_attention) row_flags.attention_dim = 0;
      ssam::ModelConfig cfg = model_config_from(row_flags, row.use_attention);

      const auto t0 = std::chrono::steady_clock::now();
      const ssam::TrainResult trained = ssam::train(cfg, train_cfg, prepared.train, &std::cerr);
      const ssam::EvaluationReport report = ssam::evaluate(
          trained.params, prepared.scaler, prepared.test, prepared.split.test.dates);
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      append_row(row.name, metric(report.rmse), metric(elapsed),
                 report.r2 ? metric(*report.r2) : "nan");
    } catch (const std::exception& e) {
      append_row(row.name, "error", "error", e.what());
      ++failed_stages;
    }
  }

  const auto baseline_row = [&](const std::string& name, const ssam::BaselineForecast& forecast) {
    try {
      const auto t0 = std::chrono::steady_clock::now();
      const double err = ssam::rmse(forecast.predicted, prepared.split.test.values);
      std::string r2_text = "nan";
      try {
        r2_text = metric(ssam::r2(forecast.predicted, prepared.split.test.values));
      } catch (const ssam::DataError&) {
      }
      const double elapsed =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      append_row(name, metric(err), metric(elapsed), r2_text);
    } catch (const std::exception& e) {
      append_row(name, "error", "error", e.what());
    }
  };
  baseline_row("ARIMA(0,1,0)",
               ssam::random_walk_forecast(prepared.split.train, prepared.split.test));
  baseline_row("SMA(" + std::to_string(sma_window) + ")",
               ssam::sma_forecast(prepared.split.train, prepared.split.test, sma_window));

  append_row("CNN+BiLSTM", "not-implemented", "not-implemented", "not-implemented");
  append_row("LSTM+CNN", "not-implemented", "not-implemented", "not-implemented");
  append_row("FB_Prophet", "not-implemented", "not-implemented", "not-implemented");

  if (out_path.empty()) {
    std::cout << table;
  } else {
    write_text(out_path, table);
  }

  json m = manifest_base("compare");
  m["csv_path"] = csv_path;
  fill_flags(m, flags);
  m["sma_window"] = sma_window;
  if (!out_path.empty()) m["out_path"] = out_path;
  emit_manifest(m, manifest_path.empty() && !out_path.empty() ? out_path + ".manifest.json"
                                                              : manifest_path);
  return failed_stages > 0 ? 2 : 0;
}

int run_indicators(const std::string& csv_path, const std::string& feature,
                   std::vector<std::size_t> sma_windows, const std::string& out_path,
                   const std::string& corr_out, bool select_best,
                   const std::string& manifest_path) {
  const auto records = ssam::load_csv_file(csv_path);
  const ssam::PriceSeries series = ssam::select_feature(records, feature);

  std::string table = "date," + feature;
  for (std::size_t n : sma_windows) table += ",sma_" + std::to_string(n);
  table += "\n";
  std::vector<ssam::SmaSeries> averaged;
  averaged.reserve(sma_windows.size());
  for (std::size_t n : sma_windows) averaged.push_back(ssam::sma_series(series, n));
  char buf[64];
  for (std::size_t i = 0; i < series.size(); ++i) {
    table += series.dates[i];
    std::snprintf(buf, sizeof(buf), ",%.6f", series.values[i]);
    table += buf;
    for (std::size_t a = 0; a < averaged.size(); ++a) {
      const std::size_t n = sma_windows[a];
      if (i + 1 >= n) {
        std::snprintf(buf, sizeof(buf), ",%.6f", averaged[a].values[i + 1 - n]);
        table += buf;
      } else {
        table += ",";  // window not yet covered
      }
    }
    table += "\n";
  }
  if (out_path.empty()) {
    std::cout << table;
  } else {
    write_text(out_path, table);
  }

  // correlation matrix over the six numeric columns
  std::vector<std::string> labels(ssam::kNumericFields.begin(), ssam::kNumericFields.end());
  std::vector<std::vector<double>> columns;
  columns.reserve(labels.size());
  for (const auto& label : labels) {
    columns.push_back(ssam::select_feature(records, label).values);
  }
  const ssam::CorrelationMatrix corr = ssam::pearson_correlation(labels, columns);
  std::string corr_csv = "column";
  for (const auto& label : labels) corr_csv += "," + label;
  corr_csv += "\n";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    corr_csv += labels[i];
    for (std::size_t j = 0; j < labels.size(); ++j) {
      std::snprintf(buf, sizeof(buf), ",%.6f", corr.entries(i, j));
      corr_csv += buf;
    }
    corr_csv += "\n";
  }
  if (!corr_out.empty()) {
    write_text(corr_out, corr_csv);
  } else {
    if (out_path.empty()) std::cout << "\n";  // separate the two stdout tables
    std::cout << corr_csv;
  }

  if (select_best) {
    const std::size_t best = ssam::best_sma_window(series.values, sma_windows);
    std::cout << "best_sma_window=" << best << "\n";
  }

  json m = manifest_base("indicators");
  m["csv_path"] = csv_path;
  m["feature"] = feature;
  m["sma_windows"] = sma_windows;
  emit_manifest(m, manifest_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LSTM + sequential self-attention stock forecaster"};
  app.require_subcommand(1);

  std::string csv_path, model_path, out_model, report_path, pred_out, manifest_path, loss_out,
      out_path, corr_out;
  PipelineFlags flags;
  std::size_t sma_window = 10;
  std::vector<std::size_t> sma_windows{10, 20, 50};
  std::string indicator_feature = "Adj Close";
  bool select_best = false;

  CLI::App* train = app.add_subcommand("train", "Train a model and save it");
  train->add_option("csv", csv_path, "Input OHLCV CSV")->required();
  train->add_option("model", out_model, "Output .ssam path")->required();
  add_pipeline_flags(train, flags);
  train->add_option("--manifest", manifest_path, "Manifest path (default: <model>.manifest.json)");
  train->add_option("--loss-out", loss_out, "Loss-history CSV path (default: stdout)");

  CLI::App* evaluate = app.add_subcommand("evaluate", "Evaluate a saved model on its test split");
  evaluate->add_option("model", model_path, "Trained .ssam bundle")->required();
  evaluate->add_option("csv", csv_path, "Input OHLCV CSV")->required();
  evaluate->add_option("report", report_path, "Output report CSV")->required();
  evaluate->add_option("--pred-out", pred_out, "Two-column date,predicted CSV");
  evaluate->add_option("--manifest", manifest_path,
                       "Manifest path (default: <report>.manifest.json)");

  CLI::App* predict = app.add_subcommand("predict", "One-step-ahead forecast after the last row");
  predict->add_option("model", model_path, "Trained .ssam bundle")->required();
  predict->add_option("csv", csv_path, "Input OHLCV CSV")->required();
  predict->add_option("--manifest", manifest_path, "Manifest path (default: log line)");

  CLI::App* compare = app.add_subcommand("compare", "Train and score the comparison table");
  compare->add_option("csv", csv_path, "Input OHLCV CSV")->required();
  add_pipeline_flags(compare, flags);
  compare->add_option("--sma-window", sma_window, "Baseline SMA window")->capture_default_str();
  compare->add_option("--out", out_path, "Table CSV path (default: stdout)");
  compare->add_option("--manifest", manifest_path, "Manifest path");

  CLI::App* indicators = app.add_subcommand("indicators", "Emit SMA columns and correlations");
  indicators->add_option("csv", csv_path, "Input OHLCV CSV")->required();
  indicators->add_option("--feature", indicator_feature, "Column for the SMA")
      ->capture_default_str();
  indicators->add_option("--sma", sma_windows, "SMA windows")->capture_default_str();
  indicators->add_option("--out", out_path, "SMA CSV path (default: stdout)");
  indicators->add_option("--corr-out", corr_out, "Correlation CSV path");
  indicators->add_flag("--select-best", select_best, "Print the lowest-RMSE SMA window");
  indicators->add_option("--manifest", manifest_path, "Manifest path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (train->parsed()) {
      return run_train(csv_path, out_model, flags, manifest_path, loss_out);
    }
    if (evaluate->parsed()) {
      return run_evaluate(model_path, csv_path, report_path, pred_out, manifest_path);
    }
    if (predict->parsed()) {
      return run_predict(model_path, csv_path, manifest_path);
    }
    if (compare->parsed()) {
      return run_compare(csv_path, flags, sma_window, out_path, manifest_path);
    }
    if (indicators->parsed()) {
      return run_indicators(csv_path, indicator_feature, sma_windows, out_path, corr_out,
                            select_best, manifest_path);
    }
  } catch (const ssam::UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ssam::NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  } catch (const ssam::Error& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
