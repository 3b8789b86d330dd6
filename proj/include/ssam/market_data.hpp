#pragma once

#include <array>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace ssam {

/// One trading day in the Yahoo Finance CSV layout.
struct OhlcvRecord {
  std::string date;  // ISO 8601, YYYY-MM-DD
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double adj_close = 0.0;
  long long volume = 0;
};

/// One named column over an ordered date axis. Dates are opaque ordered
/// labels; no calendar arithmetic happens downstream.
struct PriceSeries {
  std::vector<std::string> dates;
  std::vector<double> values;
  std::string feature_name;

  std::size_t size() const { return values.size(); }
};

/// Validating factory: dates strictly increasing, lengths equal and >= 1.
PriceSeries make_price_series(std::vector<std::string> dates, std::vector<double> values,
                              std::string feature_name);

struct SplitSeries {
  PriceSeries train;
  PriceSeries test;
  double ratio = 0.0;
};

inline constexpr std::string_view kCsvHeader = "Date,Open,High,Low,Close,Adj Close,Volume";

inline constexpr std::array<std::string_view, 6> kNumericFields = {
    "Open", "High", "Low", "Close", "Adj Close", "Volume"};

/// Parses a Yahoo-layout OHLCV CSV. The header must match kCsvHeader
/// exactly; rows are validated (positive finite prices, low <= min(open,
/// close) <= max(open, close) <= high, volume >= 0) and any bad row aborts
/// with a diagnostic carrying its line number.
std::vector<OhlcvRecord> parse_csv(std::istream& in);
std::vector<OhlcvRecord> parse_csv(std::string_view text);
std::vector<OhlcvRecord> load_csv_file(const std::filesystem::path& path);

/// Serializes records back to the same layout, prices at 6 decimals.
std::string to_csv(const std::vector<OhlcvRecord>& records);

/// Extracts one numeric column; records must be date-sorted without
/// duplicates. Field is one of kNumericFields.
PriceSeries select_feature(const std::vector<OhlcvRecord>& records, std::string_view field);

/// First floor(ratio * length) points go to train, the rest to test, in
/// order and without gaps. Both sides must end up nonempty.
SplitSeries chronological_split(const PriceSeries& series, double ratio);

}  // namespace ssam
