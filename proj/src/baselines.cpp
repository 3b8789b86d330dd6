#include "ssam/baselines.hpp"

#include "ssam/errors.hpp"

namespace ssam {

BaselineForecast random_walk_forecast(const PriceSeries& history, const PriceSeries& test) {
  if (history.values.empty()) {
    throw DataError("random_walk_forecast: empty history");
  }
  BaselineForecast out;
  out.name = "random_walk";
  out.predicted.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    out.predicted.push_back(i == 0 ? history.values.back() : test.values[i - 1]);
  }
  return out;
}

BaselineForecast sma_forecast(const PriceSeries& history, const PriceSeries& test, std::size_t n) {
  if (n < 1) {
    throw UsageError("sma_forecast window must be at least 1");
  }
  if (history.size() < n) {
    throw DataError("sma_forecast: history of " + std::to_string(history.size()) +
                    " points is shorter than window " + std::to_string(n));
  }
  std::vector<double> realized = history.values;
  realized.insert(realized.end(), test.values.begin(), test.values.end());

  BaselineForecast out;
  out.name = "sma_" + std::to_string(n);
  out.predicted.reserve(test.size());
  const std::size_t offset = history.size();
  for (std::size_t i = 0; i < test.size(); ++i) {
    double sum = 0.0;
    for (std::size_t k = offset + i - n; k < offset + i; ++k) {
      sum += realized[k];
    }
    out.predicted.push_back(sum / static_cast<double>(n));
  }
  return out;
}

}  // namespace ssam
