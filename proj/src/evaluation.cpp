#include "ssam/evaluation.hpp"

#include <cmath>
#include <cstdio>

#include "ssam/errors.hpp"

namespace ssam {

double rmse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.empty() || predicted.size() != actual.size()) {
    throw UsageError("rmse: need equal nonempty lists");
  }
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const double diff = predicted[i] - actual[i];
    sq_sum += diff * diff;
  }
  return std::sqrt(sq_sum / static_cast<double>(predicted.size()));
}

double r2(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size()) {
    throw UsageError("r2: need equal-length lists");
  }
  if (actual.size() < 2) {
    throw DataError("r2 needs at least 2 observations");
  }
  double mean = 0.0;
  for (double a : actual) mean += a;
  mean /= static_cast<double>(actual.size());

  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < actual.size(); ++i) {
    const double res = actual[i] - predicted[i];
    const double dev = actual[i] - mean;
    ss_res += res * res;
    ss_tot += dev * dev;
  }
  if (ss_tot == 0.0) {
    throw DataError("r2 undefined: actual series has zero variance");
  }
  return 1.0 - ss_res / ss_tot;
}

EvaluationReport forecast_report(std::span<const std::string> dates,
                                 std::span<const double> actual,
                                 std::span<const double> predicted) {
  if (dates.size() != actual.size() || actual.size() != predicted.size()) {
    throw UsageError("forecast_report: dates/actual/predicted lengths differ");
  }
  if (actual.empty()) {
    throw UsageError("forecast_report: empty input");
  }

  EvaluationReport report;
  report.rows.reserve(actual.size());
  for (std::size_t i = 0; i < actual.size(); ++i) {
    if (actual[i] == 0.0) {
      throw DataError("forecast_report: zero actual price on " + dates[i]);
    }
    ForecastRow row;
    row.date = dates[i];
    row.actual = actual[i];
    row.predicted = predicted[i];
    row.forecast_error = actual[i] - predicted[i];
    row.error_percent = std::fabs(row.forecast_error / actual[i]) * 100.0;
    report.rows.push_back(std::move(row));
  }

  report.rmse = rmse(predicted, actual);
  bool constant_actual = true;
  for (double a : actual) {
    if (a != actual[0]) {
      constant_actual = false;
      break;
    }
  }
  if (actual.size() >= 2 && !constant_actual) {
    report.r2 = r2(predicted, actual);
  }
  return report;
}

EvaluationReport evaluate(const ModelParams& params, const ScalerParams& scaler,
                          const WindowedDataset& test_windows,
                          std::span<const std::string> dates) {
  if (dates.size() != test_windows.size()) {
    throw UsageError("evaluate: " + std::to_string(dates.size()) + " dates for " +
                     std::to_string(test_windows.size()) + " windows");
  }
  std::vector<double> actual;
  std::vector<double> predicted;
  actual.reserve(test_windows.size());
  predicted.reserve(test_windows.size());
  for (std::size_t i = 0; i < test_windows.size(); ++i) {
    const double pred_scaled =
        model_forward(params, window_matrix(test_windows.inputs[i], params.config.input_dim));
    predicted.push_back(inverse_scale(scaler, pred_scaled));
    actual.push_back(inverse_scale(scaler, test_windows.targets[i]));
  }
  return forecast_report(dates, actual, predicted);
}

std::string report_to_csv(const EvaluationReport& report) {
  std::string out = "date,actual,predicted,forecast_error,error_percent\n";
  char buf[192];
  for (const auto& row : report.rows) {
    std::snprintf(buf, sizeof(buf), "%s,%.3f,%.3f,%.3f,%.3f\n", row.date.c_str(), row.actual,
                  row.predicted, row.forecast_error, row.error_percent);
    out += buf;
  }
  return out;
}

std::string report_summary(const EvaluationReport& report) {
  char buf[96];
  if (report.r2.has_value()) {
    std::snprintf(buf, sizeof(buf), "rmse=%.6f r2=%.6f", report.rmse, *report.r2);
  } else {
    std::snprintf(buf, sizeof(buf), "rmse=%.6f r2=nan", report.rmse);
  }
  return buf;
}

}  // namespace ssam
