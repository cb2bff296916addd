#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

namespace spt::cli {

using Cell = std::variant<double, long long, std::string>;

struct Column {
  std::string name;
  /// Rate-valued columns are rescaled when output units are physical.
  bool rate = false;
};

/// Tabular experiment output with a metadata block, written as CSV
/// ('#'-prefixed metadata, header row, rows) or as one JSON object.
class Table {
 public:
  void meta(const std::string& key, const std::string& value);
  void meta(const std::string& key, double value);
  void meta(const std::string& key, long long value);
  void set_columns(std::vector<Column> columns);
  void add_row(std::vector<Cell> row);
  /// Scalars that belong to the whole run (also echoed as CSV metadata).
  void summary(const std::string& key, const Cell& value, bool rate = false);
  /// Arbitrary JSON attached under "summary" (JSON output only).
  void summary_json(const std::string& key, nlohmann::ordered_json value);
  /// Multiply rate-valued entries by scale and suffix their names.
  void set_rate_units(double scale, std::string suffix);

  const std::vector<Column>& columns() const { return columns_; }
  const std::vector<std::vector<Cell>>& rows() const { return rows_; }

  std::string csv(const std::string& timestamp = "") const;
  std::string json(const std::string& timestamp = "") const;

 private:
  Cell scaled(const Cell& c, bool rate) const;
  std::string column_name(const Column& c) const;

  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<Column> columns_;
  std::vector<std::vector<Cell>> rows_;
  std::vector<std::pair<std::string, std::pair<Cell, bool>>> summary_;
  nlohmann::ordered_json summary_json_ = nlohmann::ordered_json::object();
  double rate_scale_ = 1.0;
  std::string rate_suffix_;
};

std::string format_number(double v);

}  // namespace spt::cli
