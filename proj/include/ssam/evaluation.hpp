#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ssam/model.hpp"
#include "ssam/preprocess.hpp"

namespace ssam {

/// sqrt(mean((predicted - actual)^2)).
double rmse(std::span<const double> predicted, std::span<const double> actual);

/// Coefficient of determination, 1 - SS_res / SS_tot. May be negative for
/// forecasts worse than the mean predictor.
double r2(std::span<const double> predicted, std::span<const double> actual);

/// One test date: forecast_error = actual - predicted, and its absolute
/// percentage of the actual price.
struct ForecastRow {
  std::string date;
  double actual = 0.0;
  double predicted = 0.0;
  double forecast_error = 0.0;
  double error_percent = 0.0;
};

struct EvaluationReport {
  std::vector<ForecastRow> rows;
  double rmse = 0.0;
  /// Absent when the actual series has zero variance (R^2 undefined).
  std::optional<double> r2;
};

/// Builds rows and aggregate metrics; actual prices must be nonzero.
EvaluationReport forecast_report(std::span<const std::string> dates,
                                 std::span<const double> actual,
                                 std::span<const double> predicted);

/// One-step-ahead predictions over the test windows, denormalized to
/// currency units, then summarized by forecast_report. dates must align
/// with the windows (one per target).
EvaluationReport evaluate(const ModelParams& params, const ScalerParams& scaler,
                          const WindowedDataset& test_windows,
                          std::span<const std::string> dates);

/// CSV with columns date,actual,predicted,forecast_error,error_percent;
/// display values rounded to 3 decimals.
std::string report_to_csv(const EvaluationReport& report);

/// One line: "rmse=<v> r2=<v>".
std::string report_summary(const EvaluationReport& report);

}  // namespace ssam
