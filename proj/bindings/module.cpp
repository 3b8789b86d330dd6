#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "ssam/baselines.hpp"
#include "ssam/errors.hpp"
#include "ssam/evaluation.hpp"
#include "ssam/indicators.hpp"
#include "ssam/market_data.hpp"
#include "ssam/model_store.hpp"
#include "ssam/preprocess.hpp"
#include "ssam/training.hpp"

namespace py = pybind11;

namespace {

std::vector<std::vector<double>> matrix_rows(const ssam::Matrix& m) {
  std::vector<std::vector<double>> rows(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rows[r].assign(m.data() + r * m.cols(), m.data() + (r + 1) * m.cols());
  }
  return rows;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "LSTM + sequential self-attention time-series forecaster";

  py::register_exception<ssam::UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<ssam::DataError>(m, "DataError", PyExc_ValueError);
  py::register_exception<ssam::ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<ssam::NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<ssam::OhlcvRecord>(m, "OhlcvRecord")
      .def_readonly("date", &ssam::OhlcvRecord::date)
      .def_readonly("open", &ssam::OhlcvRecord::open)
      .def_readonly("high", &ssam::OhlcvRecord::high)
      .def_readonly("low", &ssam::OhlcvRecord::low)
      .def_readonly("close", &ssam::OhlcvRecord::close)
      .def_readonly("adj_close", &ssam::OhlcvRecord::adj_close)
      .def_readonly("volume", &ssam::OhlcvRecord::volume)
      .def("__repr__", [](const ssam::OhlcvRecord& r) {
        return "OhlcvRecord(" + r.date + ", close=" + std::to_string(r.close) + ")";
      });

  py::class_<ssam::PriceSeries>(m, "PriceSeries")
      .def_readonly("dates", &ssam::PriceSeries::dates)
      .def_readonly("values", &ssam::PriceSeries::values)
      .def_readonly("feature_name", &ssam::PriceSeries::feature_name)
      .def("__len__", &ssam::PriceSeries::size);

  py::class_<ssam::SplitSeries>(m, "SplitSeries")
      .def_readonly("train", &ssam::SplitSeries::train)
      .def_readonly("test", &ssam::SplitSeries::test)
      .def_readonly("ratio", &ssam::SplitSeries::ratio);

  py::class_<ssam::ScalerParams>(m, "ScalerParams")
      .def(py::init<double, double>(), py::arg("min"), py::arg("max"))
      .def_readonly("min", &ssam::ScalerParams::min)
      .def_readonly("max", &ssam::ScalerParams::max);

  py::class_<ssam::WindowedDataset>(m, "WindowedDataset")
      .def_readonly("inputs", &ssam::WindowedDataset::inputs)
      .def_readonly("targets", &ssam::WindowedDataset::targets)
      .def_readonly("time_step", &ssam::WindowedDataset::time_step)
      .def("__len__", &ssam::WindowedDataset::size);

  py::class_<ssam::ModelConfig>(m, "ModelConfig")
      .def(py::init([](std::size_t input_dim, std::size_t hidden_units, std::size_t time_step,
                       std::size_t attention_dim, const std::string& activation,
                       std::uint64_t seed, bool use_attention) {
             ssam::ModelConfig cfg;
             cfg.input_dim = input_dim;
             cfg.hidden_units = hidden_units;
             cfg.time_step = time_step;
             cfg.attention_dim = attention_dim;
             cfg.post_attention_activation = ssam::activation_from_string(activation);
             cfg.seed = seed;
             cfg.use_attention = use_attention;
             return cfg;
           }),
           py::arg("input_dim") = 1, py::arg("hidden_units") = 50, py::arg("time_step") = 10,
           py::arg("attention_dim") = 50, py::arg("activation") = "relu", py::arg("seed") = 42,
           py::arg("use_attention") = true)
      .def_readonly("input_dim", &ssam::ModelConfig::input_dim)
      .def_readonly("hidden_units", &ssam::ModelConfig::hidden_units)
      .def_readonly("time_step", &ssam::ModelConfig::time_step)
      .def_readonly("attention_dim", &ssam::ModelConfig::attention_dim)
      .def_readonly("seed", &ssam::ModelConfig::seed)
      .def_readonly("use_attention", &ssam::ModelConfig::use_attention);

  py::class_<ssam::ModelParams>(m, "ModelParams")
      .def_readonly("config", &ssam::ModelParams::config)
      .def("tensor_names", [](const ssam::ModelParams& p) {
        std::vector<std::string> names;
        for (const auto& ref : p.tensors()) names.push_back(ref.name);
        return names;
      });

  py::class_<ssam::AdamHyper>(m, "AdamHyper")
      .def(py::init([](double alpha, double beta1, double beta2, double epsilon) {
             return ssam::AdamHyper{alpha, beta1, beta2, epsilon};
           }),
           py::arg("alpha") = 0.001, py::arg("beta1") = 0.9, py::arg("beta2") = 0.999,
           py::arg("epsilon") = 1e-8)
      .def_readonly("alpha", &ssam::AdamHyper::alpha);

  py::class_<ssam::TrainConfig>(m, "TrainConfig")
      .def(py::init([](std::size_t batch_size, std::size_t epochs, std::uint64_t shuffle_seed,
                       bool shuffle, const ssam::AdamHyper& hyper) {
             ssam::TrainConfig tc;
             tc.batch_size = batch_size;
             tc.epochs = epochs;
             tc.shuffle_seed = shuffle_seed;
             tc.shuffle = shuffle;
             tc.hyper = hyper;
             return tc;
           }),
           py::arg("batch_size") = 10, py::arg("epochs") = 50, py::arg("shuffle_seed") = 42,
           py::arg("shuffle") = true, py::arg("hyper") = ssam::AdamHyper{})
      .def_readonly("batch_size", &ssam::TrainConfig::batch_size)
      .def_readonly("epochs", &ssam::TrainConfig::epochs);

  py::class_<ssam::ForecastRow>(m, "ForecastRow")
      .def_readonly("date", &ssam::ForecastRow::date)
      .def_readonly("actual", &ssam::ForecastRow::actual)
      .def_readonly("predicted", &ssam::ForecastRow::predicted)
      .def_readonly("forecast_error", &ssam::ForecastRow::forecast_error)
      .def_readonly("error_percent", &ssam::ForecastRow::error_percent);

  py::class_<ssam::EvaluationReport>(m, "EvaluationReport")
      .def_readonly("rows", &ssam::EvaluationReport::rows)
      .def_readonly("rmse", &ssam::EvaluationReport::rmse)
      .def_property_readonly("r2", [](const ssam::EvaluationReport& r) {
        return r.r2 ? py::cast(*r.r2) : py::none();
      });

  py::class_<ssam::BaselineForecast>(m, "BaselineForecast")
      .def_readonly("name", &ssam::BaselineForecast::name)
      .def_readonly("predicted", &ssam::BaselineForecast::predicted);

  py::class_<ssam::DatasetOptions>(m, "DatasetOptions")
      .def(py::init([](const std::string& feature, double split_ratio, bool fit_scaler_on_all,
                       std::size_t time_step) {
             return ssam::DatasetOptions{feature, split_ratio, fit_scaler_on_all, time_step};
           }),
           py::arg("feature") = "Adj Close", py::arg("split_ratio") = 0.9,
           py::arg("fit_scaler_on_all") = false, py::arg("time_step") = 10);

  py::class_<ssam::PreparedDataset>(m, "PreparedDataset")
      .def_readonly("split", &ssam::PreparedDataset::split)
      .def_readonly("scaler", &ssam::PreparedDataset::scaler)
      .def_readonly("train", &ssam::PreparedDataset::train)
      .def_readonly("test", &ssam::PreparedDataset::test);

  py::class_<ssam::ModelBundle>(m, "ModelBundle")
      .def_readonly("params", &ssam::ModelBundle::params)
      .def_readonly("scaler", &ssam::ModelBundle::scaler);

  // market data
  m.def("parse_csv", [](const std::string& text) { return ssam::parse_csv(text); },
        py::arg("text"), "Parse Yahoo-layout OHLCV CSV text");
  m.def("load_csv", &ssam::load_csv_file, py::arg("path"));
  m.def("to_csv", &ssam::to_csv, py::arg("records"));
  m.def("select_feature",
        [](const std::vector<ssam::OhlcvRecord>& records, const std::string& field) {
          return ssam::select_feature(records, field);
        },
        py::arg("records"), py::arg("field"));
  m.def("chronological_split", &ssam::chronological_split, py::arg("series"), py::arg("ratio"));

  // preprocessing
  m.def("fit_scaler",
        [](const std::vector<double>& values) { return ssam::fit_scaler(values); },
        py::arg("values"));
  m.def("scale", &ssam::scale, py::arg("scaler"), py::arg("x"));
  m.def("inverse_scale", &ssam::inverse_scale, py::arg("scaler"), py::arg("x_star"));
  m.def("scale_all", &ssam::scale_all, py::arg("scaler"), py::arg("values"));
  m.def("make_windows", &ssam::make_windows, py::arg("series"), py::arg("time_step"));
  m.def("prepare_dataset",
        [](const std::vector<ssam::OhlcvRecord>& records, const ssam::DatasetOptions& options) {
          return ssam::prepare_dataset(records, options);
        },
        py::arg("records"), py::arg("options"));

  // indicators
  m.def("sma", &ssam::sma, py::arg("prices"), py::arg("n"));
  m.def("pearson_correlation",
        [](const std::vector<std::string>& labels,
           const std::vector<std::vector<double>>& columns) {
          const auto corr = ssam::pearson_correlation(labels, columns);
          return py::make_tuple(corr.labels, matrix_rows(corr.entries));
        },
        py::arg("labels"), py::arg("columns"));
  m.def("best_sma_window", &ssam::best_sma_window, py::arg("prices"), py::arg("candidates"));

  // model
  m.def("count_params", [](const ssam::ModelConfig& cfg) {
    const auto counts = ssam::count_params(cfg);
    py::dict d;
    d["lstm"] = counts.lstm;
    d["attention"] = counts.attention;
    d["flatten"] = counts.flatten;
    d["dense"] = counts.dense;
    d["total"] = counts.total();
    return d;
  });
  m.def("init_params", &ssam::init_params, py::arg("config"));
  m.def("model_forward",
        [](const ssam::ModelParams& params, const std::vector<double>& window) {
          return ssam::model_forward(params,
                                     ssam::window_matrix(window, params.config.input_dim));
        },
        py::arg("params"), py::arg("window"));

  // training and evaluation
  m.def("mse_loss",
        [](const std::vector<double>& p, const std::vector<double>& t) {
          return ssam::mse_loss(p, t);
        },
        py::arg("predictions"), py::arg("targets"));
  m.def("train",
        [](const ssam::ModelConfig& cfg, const ssam::TrainConfig& tc,
           const ssam::WindowedDataset& ds) {
          const ssam::TrainResult result = ssam::train(cfg, tc, ds);
          return py::make_tuple(result.params, result.loss_history);
        },
        py::arg("model_config"), py::arg("train_config"), py::arg("dataset"),
        "Returns (params, loss_history)");
  m.def("rmse",
        [](const std::vector<double>& p, const std::vector<double>& a) { return ssam::rmse(p, a); },
        py::arg("predicted"), py::arg("actual"));
  m.def("r2",
        [](const std::vector<double>& p, const std::vector<double>& a) { return ssam::r2(p, a); },
        py::arg("predicted"), py::arg("actual"));
  m.def("forecast_report",
        [](const std::vector<std::string>& dates, const std::vector<double>& actual,
           const std::vector<double>& predicted) {
          return ssam::forecast_report(dates, actual, predicted);
        },
        py::arg("dates"), py::arg("actual"), py::arg("predicted"));
  m.def("evaluate",
        [](const ssam::ModelParams& params, const ssam::ScalerParams& scaler,
           const ssam::WindowedDataset& windows, const std::vector<std::string>& dates) {
          return ssam::evaluate(params, scaler, windows, dates);
        },
        py::arg("params"), py::arg("scaler"), py::arg("test_windows"), py::arg("dates"));

  // baselines
  m.def("random_walk_forecast", &ssam::random_walk_forecast, py::arg("history"), py::arg("test"));
  m.def("sma_forecast", &ssam::sma_forecast, py::arg("history"), py::arg("test"), py::arg("n"));

  // persistence
  m.def("save_model",
        [](const ssam::ModelParams& params, const ssam::ScalerParams& scaler,
           const std::filesystem::path& path) {
          ssam::ModelBundle bundle;
          bundle.params = params;
          bundle.scaler = scaler;
          ssam::save_file(bundle, path);
        },
        py::arg("params"), py::arg("scaler"), py::arg("path"));
  m.def("load_model", &ssam::load_file, py::arg("path"));
  m.def("save_model_text", [](const ssam::ModelParams& params, const ssam::ScalerParams& scaler) {
    ssam::ModelBundle bundle;
    bundle.params = params;
    bundle.scaler = scaler;
    std::ostringstream out;
    ssam::save(bundle, out);
    return out.str();
  });

  m.attr("__version__") = "0.1.0";
}
