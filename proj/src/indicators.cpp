#include "ssam/indicators.hpp"

#include <cmath>
#include <limits>

#include "ssam/errors.hpp"

namespace ssam {

std::vector<double> sma(const std::vector<double>& prices, std::size_t n) {
  if (n < 1) {
    throw UsageError("sma window must be at least 1");
  }
  if (n > prices.size()) {
    throw UsageError("sma window " + std::to_string(n) + " exceeds series length " +
                     std::to_string(prices.size()));
  }
  std::vector<double> out;
  out.reserve(prices.size() - n + 1);
  double window_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) window_sum += prices[i];
  out.push_back(window_sum / static_cast<double>(n));
  for (std::size_t i = n; i < prices.size(); ++i) {
    window_sum += prices[i] - prices[i - n];
    out.push_back(window_sum / static_cast<double>(n));
  }
  return out;
}

SmaSeries sma_series(const PriceSeries& series, std::size_t n) {
  SmaSeries out;
  out.window_n = n;
  out.values = sma(series.values, n);
  out.dates.assign(series.dates.begin() + (n - 1), series.dates.end());
  return out;
}

double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw UsageError("pearson: column lengths differ");
  }
  if (x.size() < 2) {
    throw DataError("pearson needs at least 2 observations");
  }
  const double n = static_cast<double>(x.size());
  double mean_x = 0.0, mean_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mean_x += x[i];
    mean_y += y[i];
  }
  mean_x /= n;
  mean_y /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mean_x;
    const double dy = y[i] - mean_y;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw DataError("pearson: zero-variance column");
  }
  return sxy / std::sqrt(sxx * syy);
}

CorrelationMatrix pearson_correlation(const std::vector<std::string>& labels,
                                      const std::vector<std::vector<double>>& columns) {
  if (labels.size() != columns.size() || columns.empty()) {
    throw UsageError("pearson_correlation: need one label per column");
  }
  const std::size_t len = columns.front().size();
  if (len < 2) {
    throw DataError("pearson_correlation needs columns of length >= 2");
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != len) {
      throw UsageError("pearson_correlation: column '" + labels[c] + "' has mismatched length");
    }
    const double first = columns[c].front();
    bool constant = true;
    for (double v : columns[c]) {
      if (v != first) {
        constant = false;
        break;
      }
    }
    if (constant) {
      throw DataError("zero-variance column '" + labels[c] + "'");
    }
  }

  CorrelationMatrix out;
  out.labels = labels;
  out.entries = Matrix(columns.size(), columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    out.entries(i, i) = 1.0;
    for (std::size_t j = i + 1; j < columns.size(); ++j) {
      const double r = pearson(columns[i], columns[j]);
      out.entries(i, j) = r;
      out.entries(j, i) = r;
    }
  }
  return out;
}

std::size_t best_sma_window(const std::vector<double>& prices,
                            const std::vector<std::size_t>& candidates) {
  if (candidates.empty()) {
    throw UsageError("best_sma_window: no candidate windows");
  }
  std::size_t best = 0;
  double best_rmse = std::numeric_limits<double>::infinity();
  for (std::size_t n : candidates) {
    const std::vector<double> averaged = sma(prices, n);
    double sq_sum = 0.0;
    for (std::size_t i = 0; i < averaged.size(); ++i) {
      const double diff = averaged[i] - prices[i + n - 1];
      sq_sum += diff * diff;
    }
    const double rmse = std::sqrt(sq_sum / static_cast<double>(averaged.size()));
    if (rmse < best_rmse || (rmse == best_rmse && n < best)) {
      best_rmse = rmse;
      best = n;
    }
  }
  return best;
}

}  // namespace ssam
