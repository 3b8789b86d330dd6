#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ssam/market_data.hpp"
#include "ssam/matrix.hpp"

namespace ssam {

/// Trailing simple moving average. Only fully covered positions are
/// emitted, so values[i] is the mean of source[i .. i+n) and the series is
/// n - 1 entries shorter than its source.
struct SmaSeries {
  std::size_t window_n = 0;
  std::vector<std::string> dates;  // date of the last point in each window
  std::vector<double> values;
};

std::vector<double> sma(const std::vector<double>& prices, std::size_t n);
SmaSeries sma_series(const PriceSeries& series, std::size_t n);

/// Sample Pearson coefficient of two equal-length columns.
double pearson(const std::vector<double>& x, const std::vector<double>& y);

struct CorrelationMatrix {
  std::vector<std::string> labels;
  Matrix entries;  // symmetric, unit diagonal, entries in [-1, 1]
};

/// Pairwise Pearson coefficients; every column needs nonzero variance.
CorrelationMatrix pearson_correlation(const std::vector<std::string>& labels,
                                      const std::vector<std::vector<double>>& columns);

/// Picks the candidate window whose SMA tracks the price series with the
/// lowest RMSE (each SMA value compared against the price at its own
/// date). Ties go to the smaller, more responsive window.
std::size_t best_sma_window(const std::vector<double>& prices,
                            const std::vector<std::size_t>& candidates);

}  // namespace ssam
