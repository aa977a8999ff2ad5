#pragma once

#include <string>
#include <vector>

namespace resilib {

/// Rectangular per-time-step result table. The first column is the time
/// index and must be strictly increasing.
struct ResultSeries {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  explicit ResultSeries(std::vector<std::string> column_names = {})
      : columns(std::move(column_names)) {}

  void add_row(std::vector<double> row);
  [[nodiscard]] std::size_t column_index(const std::string& name) const;
  [[nodiscard]] std::vector<double> column(const std::string& name) const;
  [[nodiscard]] double mean_over(const std::string& name, double t_lo, double t_hi) const;

  /// UTF-8 CSV, header row, '.' decimal, "inf"/"-inf" tokens, shortest
  /// round-trip doubles. Written atomically (temp file + rename).
  void write_csv(const std::string& path) const;
  static ResultSeries read_csv(const std::string& path);
};

/// Seed aggregation: the time column is copied, every other column c becomes
/// (c_mean, c_std). Population std over seeds. All runs must share layout.
ResultSeries aggregate_series(const std::vector<ResultSeries>& runs);

std::string format_double(double value);

}  // namespace resilib
