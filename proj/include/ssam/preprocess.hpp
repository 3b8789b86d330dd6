#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ssam/market_data.hpp"

namespace ssam {

/// Parameters of the min-max affine map x* = (x - min) / (max - min).
struct ScalerParams {
  double min = 0.0;
  double max = 1.0;
};

/// Fits the scaler to the extrema of the values; all-identical values make
/// the map degenerate and are rejected.
ScalerParams fit_scaler(const std::vector<double>& values);
ScalerParams fit_scaler(const PriceSeries& series);

/// Values outside [min, max] map outside [0, 1]; that is fine for test data.
double scale(const ScalerParams& scaler, double x);
double inverse_scale(const ScalerParams& scaler, double x_star);
std::vector<double> scale_all(const ScalerParams& scaler, const std::vector<double>& values);

/// Supervised pairs over a scaled series: window i covers source indices
/// [i, i + time_step) and its target is source[i + time_step].
struct WindowedDataset {
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;
  std::size_t time_step = 0;

  std::size_t size() const { return inputs.size(); }
};

WindowedDataset make_windows(const std::vector<double>& series, std::size_t time_step);

/// End-to-end dataset assembly: select feature, split, fit scaler, window.
struct DatasetOptions {
  std::string feature = "Adj Close";
  double split_ratio = 0.9;
  bool fit_scaler_on_all = false;  // default fits on the training partition
  std::size_t time_step = 10;
};

struct PreparedDataset {
  SplitSeries split;
  ScalerParams scaler;
  WindowedDataset train;
  WindowedDataset test;
};

/// Test windows straddle the split boundary: the last time_step training
/// points seed the first test window, so every test date gets a prediction.
/// A fixed_scaler (e.g. from a saved model) replaces the freshly fitted one.
PreparedDataset prepare_dataset(const std::vector<OhlcvRecord>& records,
                                const DatasetOptions& options,
                                const ScalerParams* fixed_scaler = nullptr);

}  // namespace ssam
