#include "ssam/preprocess.hpp"

#include <algorithm>

#include "ssam/errors.hpp"

namespace ssam {

ScalerParams fit_scaler(const std::vector<double>& values) {
  if (values.empty()) {
    throw DataError("cannot fit scaler on an empty series");
  }
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*lo == *hi) {
    throw DataError("degenerate scaler: all values equal " + std::to_string(*lo));
  }
  return ScalerParams{*lo, *hi};
}

ScalerParams fit_scaler(const PriceSeries& series) { return fit_scaler(series.values); }

double scale(const ScalerParams& scaler, double x) {
  return (x - scaler.min) / (scaler.max - scaler.min);
}

double inverse_scale(const ScalerParams& scaler, double x_star) {
  return x_star * (scaler.max - scaler.min) + scaler.min;
}

std::vector<double> scale_all(const ScalerParams& scaler, const std::vector<double>& values) {
  std::vector<double> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(scale(scaler, v));
  return out;
}

WindowedDataset make_windows(const std::vector<double>& series, std::size_t time_step) {
  if (time_step < 1) {
    throw UsageError("time_step must be at least 1");
  }
  if (series.size() <= time_step) {
    throw DataError("insufficient data: " + std::to_string(series.size()) +
                    " points cannot fill a window of " + std::to_string(time_step) +
                    " plus a target");
  }
  WindowedDataset ds;
  ds.time_step = time_step;
  const std::size_t count = series.size() - time_step;
  ds.inputs.reserve(count);
  ds.targets.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    ds.inputs.emplace_back(series.begin() + i, series.begin() + i + time_step);
    ds.targets.push_back(series[i + time_step]);
  }
  return ds;
}

PreparedDataset prepare_dataset(const std::vector<OhlcvRecord>& records,
                                const DatasetOptions& options,
                                const ScalerParams* fixed_scaler) {
  const PriceSeries series = select_feature(records, options.feature);
  PreparedDataset out;
  out.split = chronological_split(series, options.split_ratio);

  if (fixed_scaler) {
    if (!(fixed_scaler->max > fixed_scaler->min)) {
      throw DataError("fixed scaler is degenerate (max <= min)");
    }
    out.scaler = *fixed_scaler;
  } else {
    out.scaler = options.fit_scaler_on_all ? fit_scaler(series) : fit_scaler(out.split.train);
  }
  const std::vector<double> scaled = scale_all(out.scaler, series.values);

  const std::size_t train_len = out.split.train.size();
  const std::size_t time_step = options.time_step;
  if (train_len <= time_step) {
    throw DataError("training partition of " + std::to_string(train_len) +
                    " points is too short for time_step " + std::to_string(time_step));
  }

  out.train = make_windows({scaled.begin(), scaled.begin() + train_len}, time_step);
  // Test windows reach back into the last time_step training points.
  out.test = make_windows({scaled.begin() + (train_len - time_step), scaled.end()}, time_step);
  return out;
}

}  // namespace ssam
