#include "ssam/market_data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "ssam/errors.hpp"

namespace ssam {

namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

bool valid_iso_date(std::string_view s) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  if (!all_digits(s.substr(0, 4)) || !all_digits(s.substr(5, 2)) || !all_digits(s.substr(8, 2))) {
    return false;
  }
  const int month = (s[5] - '0') * 10 + (s[6] - '0');
  const int day = (s[8] - '0') * 10 + (s[9] - '0');
  return month >= 1 && month <= 12 && day >= 1 && day <= 31;
}

double parse_double(std::string_view s, std::size_t line_no, std::string_view field) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("line " + std::to_string(line_no) + ": unparseable " + std::string(field) +
                    " value '" + std::string(s) + "'");
  }
  return value;
}

long long parse_volume(std::string_view s, std::size_t line_no) {
  long long value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw DataError("line " + std::to_string(line_no) + ": unparseable Volume value '" +
                    std::string(s) + "'");
  }
  return value;
}

void validate_record(const OhlcvRecord& r, std::size_t line_no) {
  const double prices[5] = {r.open, r.high, r.low, r.close, r.adj_close};
  for (double p : prices) {
    if (!std::isfinite(p) || p <= 0.0) {
      throw DataError("line " + std::to_string(line_no) + ": price must be finite and positive");
    }
  }
  if (r.low > std::min(r.open, r.close)) {
    throw DataError("line " + std::to_string(line_no) + ": Low exceeds min(Open, Close)");
  }
  if (r.high < std::max(r.open, r.close)) {
    throw DataError("line " + std::to_string(line_no) + ": High below max(Open, Close)");
  }
  if (r.volume < 0) {
    throw DataError("line " + std::to_string(line_no) + ": negative Volume");
  }
}

}  // namespace

PriceSeries make_price_series(std::vector<std::string> dates, std::vector<double> values,
                              std::string feature_name) {
  if (dates.size() != values.size()) {
    throw DataError("price series: " + std::to_string(dates.size()) + " dates vs " +
                    std::to_string(values.size()) + " values");
  }
  if (values.empty()) {
    throw DataError("price series must hold at least one observation");
  }
  for (std::size_t i = 1; i < dates.size(); ++i) {
    if (!(dates[i - 1] < dates[i])) {
      throw DataError("price series dates not strictly increasing at '" + dates[i] + "'");
    }
  }
  return PriceSeries{std::move(dates), std::move(values), std::move(feature_name)};
}

std::vector<OhlcvRecord> parse_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<OhlcvRecord> records;

  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (line.empty()) continue;

    if (!saw_header) {
      if (line != kCsvHeader) {
        throw DataError("format error: expected header '" + std::string(kCsvHeader) + "', got '" +
                        line + "'");
      }
      saw_header = true;
      continue;
    }

    const auto fields = split_fields(line);
    if (fields.size() != 7) {
      throw DataError("line " + std::to_string(line_no) + ": expected 7 fields, got " +
                      std::to_string(fields.size()));
    }
    OhlcvRecord r;
    if (!valid_iso_date(fields[0])) {
      throw DataError("line " + std::to_string(line_no) + ": unparseable date '" +
                      std::string(fields[0]) + "'");
    }
    r.date = std::string(fields[0]);
    r.open = parse_double(fields[1], line_no, "Open");
    r.high = parse_double(fields[2], line_no, "High");
    r.low = parse_double(fields[3], line_no, "Low");
    r.close = parse_double(fields[4], line_no, "Close");
    r.adj_close = parse_double(fields[5], line_no, "Adj Close");
    r.volume = parse_volume(fields[6], line_no);
    validate_record(r, line_no);
    records.push_back(std::move(r));
  }

  if (!saw_header) {
    throw DataError("format error: missing header line");
  }
  if (records.empty()) {
    throw DataError("empty input: header present but no data rows");
  }
  return records;
}

std::vector<OhlcvRecord> parse_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_csv(in);
}

std::vector<OhlcvRecord> load_csv_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open CSV file '" + path.string() + "'");
  }
  return parse_csv(in);
}

std::string to_csv(const std::vector<OhlcvRecord>& records) {
  std::string out{kCsvHeader};
  out.push_back('\n');
  char buf[160];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof(buf), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%lld\n", r.date.c_str(), r.open,
                  r.high, r.low, r.close, r.adj_close, r.volume);
    out += buf;
  }
  return out;
}

PriceSeries select_feature(const std::vector<OhlcvRecord>& records, std::string_view field) {
  if (records.empty()) {
    throw DataError("select_feature: no records");
  }
  if (std::find(kNumericFields.begin(), kNumericFields.end(), field) == kNumericFields.end()) {
    throw UsageError("unknown field '" + std::string(field) + "'");
  }

  std::vector<std::string> dates;
  std::vector<double> values;
  dates.reserve(records.size());
  values.reserve(records.size());
  for (const auto& r : records) {
    if (!dates.empty() && !(dates.back() < r.date)) {
      throw DataError("records have duplicate or out-of-order date '" + r.date + "'");
    }
    dates.push_back(r.date);
    if (field == "Open") values.push_back(r.open);
    else if (field == "High") values.push_back(r.high);
    else if (field == "Low") values.push_back(r.low);
    else if (field == "Close") values.push_back(r.close);
    else if (field == "Adj Close") values.push_back(r.adj_close);
    else values.push_back(static_cast<double>(r.volume));
  }
  return PriceSeries{std::move(dates), std::move(values), std::string(field)};
}

SplitSeries chronological_split(const PriceSeries& series, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw UsageError("split ratio must lie in (0, 1), got " + std::to_string(ratio));
  }
  const std::size_t total = series.size();
  if (total < 2) {
    throw DataError("cannot split a series of length " + std::to_string(total));
  }
  const auto train_len = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(total)));
  if (train_len == 0 || train_len >= total) {
    throw DataError("split leaves an empty side: train=" + std::to_string(train_len) +
                    " test=" + std::to_string(total - train_len));
  }

  SplitSeries split;
  split.ratio = ratio;
  split.train.feature_name = series.feature_name;
  split.test.feature_name = series.feature_name;
  split.train.dates.assign(series.dates.begin(), series.dates.begin() + train_len);
  split.train.values.assign(series.values.begin(), series.values.begin() + train_len);
  split.test.dates.assign(series.dates.begin() + train_len, series.dates.end());
  split.test.values.assign(series.values.begin() + train_len, series.values.end());
  return split;
}

}  // namespace ssam
