#pragma once

#include <string>
#include <vector>

#include "ssam/market_data.hpp"

namespace ssam {

/// One-step-ahead baseline predictions aligned to the test dates.
struct BaselineForecast {
  std::string name;
  std::vector<double> predicted;
};

/// ARIMA(0,1,0) point forecast: the last observed value. Realized actuals
/// roll forward, so test[i > 0] is predicted by test[i - 1].
BaselineForecast random_walk_forecast(const PriceSeries& history, const PriceSeries& test);

/// Each test step is predicted by the mean of the previous n realized
/// values. n = 1 reduces to random_walk_forecast.
BaselineForecast sma_forecast(const PriceSeries& history, const PriceSeries& test, std::size_t n);

}  // namespace ssam
