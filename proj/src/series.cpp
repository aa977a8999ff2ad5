#include "resilib/series.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace resilib {

std::string format_double(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& token) {
  if (token == "inf") return std::numeric_limits<double>::infinity();
  if (token == "-inf") return -std::numeric_limits<double>::infinity();
  if (token == "nan") return std::numeric_limits<double>::quiet_NaN();
  return std::stod(token);
}

}  // namespace

void ResultSeries::add_row(std::vector<double> row) {
  if (row.size() != columns.size()) {
    throw std::invalid_argument("ResultSeries: row width mismatch");
  }
  if (!rows.empty() && !columns.empty() && row[0] <= rows.back()[0]) {
    throw std::invalid_argument("ResultSeries: time column must be strictly increasing");
  }
  rows.push_back(std::move(row));
}

std::size_t ResultSeries::column_index(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("ResultSeries: no column " + name);
  return static_cast<std::size_t>(it - columns.begin());
}

std::vector<double> ResultSeries::column(const std::string& name) const {
  const std::size_t idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& row : rows) out.push_back(row[idx]);
  return out;
}

double ResultSeries::mean_over(const std::string& name, double t_lo, double t_hi) const {
  const std::size_t idx = column_index(name);
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& row : rows) {
    if (row[0] < t_lo || row[0] > t_hi) continue;
    sum += row[idx];
    ++n;
  }
  if (n == 0) throw std::runtime_error("ResultSeries: empty window [" + format_double(t_lo) +
                                       ", " + format_double(t_hi) + "]");
  return sum / static_cast<double>(n);
}

void ResultSeries::write_csv(const std::string& path) const {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + tmp);
    for (std::size_t c = 0; c < columns.size(); ++c) {
      out << columns[c] << (c + 1 == columns.size() ? "" : ",");
    }
    out << '\n';
    for (const auto& row : rows) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        out << format_double(row[c]) << (c + 1 == row.size() ? "" : ",");
      }
      out << '\n';
    }
  }
  std::filesystem::rename(tmp, path);
}

ResultSeries ResultSeries::read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_csv: empty file " + path);
  ResultSeries series;
  {
    std::istringstream header(line);
    std::string name;
    while (std::getline(header, name, ',')) series.columns.push_back(name);
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string token;
    std::vector<double> row;
    while (std::getline(ls, token, ',')) row.push_back(parse_double(token));
    series.add_row(std::move(row));
  }
  return series;
}

ResultSeries aggregate_series(const std::vector<ResultSeries>& runs) {
  if (runs.empty()) throw std::invalid_argument("aggregate_series: no runs");
  const auto& first = runs.front();
  for (const auto& run : runs) {
    if (run.columns != first.columns || run.rows.size() != first.rows.size()) {
      throw std::invalid_argument("aggregate_series: layout mismatch across runs");
    }
  }
  std::vector<std::string> columns{first.columns.at(0)};
  for (std::size_t c = 1; c < first.columns.size(); ++c) {
    columns.push_back(first.columns[c] + "_mean");
    columns.push_back(first.columns[c] + "_std");
  }
  ResultSeries agg(columns);
  const double n = static_cast<double>(runs.size());
  for (std::size_t r = 0; r < first.rows.size(); ++r) {
    std::vector<double> row{first.rows[r][0]};
    for (std::size_t c = 1; c < first.columns.size(); ++c) {
      double mean = 0.0;
      for (const auto& run : runs) mean += run.rows[r][c];
      mean /= n;
      double var = 0.0;
      for (const auto& run : runs) {
        const double d = run.rows[r][c] - mean;
        var += d * d;
      }
      row.push_back(mean);
      row.push_back(std::sqrt(var / n));
    }
    agg.rows.push_back(std::move(row));
  }
  return agg;
}

}  // namespace resilib
