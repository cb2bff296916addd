#include "spt/table.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace spt::cli {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace {

std::string to_text(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) return format_number(*d);
  if (const long long* i = std::get_if<long long>(&c)) return std::to_string(*i);
  return std::get<std::string>(c);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

nlohmann::ordered_json to_json(const Cell& c) {
  if (const double* d = std::get_if<double>(&c)) {
    if (std::isfinite(*d)) return *d;
    return format_number(*d);
  }
  if (const long long* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

}  // namespace

void Table::meta(const std::string& key, const std::string& value) { meta_.emplace_back(key, value); }
void Table::meta(const std::string& key, double value) { meta_.emplace_back(key, format_number(value)); }
void Table::meta(const std::string& key, long long value) { meta_.emplace_back(key, std::to_string(value)); }

void Table::set_columns(std::vector<Column> columns) { columns_ = std::move(columns); }

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw std::logic_error("row width does not match the column count");
  rows_.push_back(std::move(row));
}

void Table::summary(const std::string& key, const Cell& value, bool rate) {
  summary_.emplace_back(key, std::make_pair(value, rate));
}

void Table::summary_json(const std::string& key, nlohmann::ordered_json value) {
  summary_json_[key] = std::move(value);
}

void Table::set_rate_units(double scale, std::string suffix) {
  rate_scale_ = scale;
  rate_suffix_ = std::move(suffix);
}

Cell Table::scaled(const Cell& c, bool rate) const {
  if (!rate || rate_scale_ == 1.0) return c;
  if (const double* d = std::get_if<double>(&c)) return *d * rate_scale_;
  return c;
}

std::string Table::column_name(const Column& c) const { return c.rate ? c.name + rate_suffix_ : c.name; }

std::string Table::csv(const std::string& timestamp) const {
  std::ostringstream out;
  for (const auto& [k, v] : meta_) out << "# " << k << ": " << v << "\n";
  for (const auto& [k, v] : summary_) {
    out << "# " << (v.second ? k + rate_suffix_ : k) << ": " << to_text(scaled(v.first, v.second)) << "\n";
  }
  if (!timestamp.empty()) out << "# generated: " << timestamp << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i) out << (i ? "," : "") << csv_field(column_name(columns_[i]));
  out << "\n";
  for (const auto& row : rows_) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      out << (i ? "," : "") << csv_field(to_text(scaled(row[i], columns_[i].rate)));
    }
    out << "\n";
  }
  return out.str();
}

std::string Table::json(const std::string& timestamp) const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta_) meta[k] = v;
  if (!timestamp.empty()) meta["generated"] = timestamp;
  j["metadata"] = meta;
  nlohmann::ordered_json summary = nlohmann::ordered_json::object();
  for (const auto& [k, v] : summary_) summary[v.second ? k + rate_suffix_ : k] = to_json(scaled(v.first, v.second));
  for (const auto& [k, v] : summary_json_.items()) summary[k] = v;
  j["summary"] = summary;
  nlohmann::ordered_json cols = nlohmann::ordered_json::array();
  for (const auto& c : columns_) cols.push_back(column_name(c));
  j["columns"] = cols;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : rows_) {
    nlohmann::ordered_json r = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) r[column_name(columns_[i])] = to_json(scaled(row[i], columns_[i].rate));
    rows.push_back(r);
  }
  j["rows"] = rows;
  return j.dump(2) + "\n";
}

}  // namespace spt::cli
