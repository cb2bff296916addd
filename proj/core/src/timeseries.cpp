#include "spt/timeseries.hpp"

#include <iomanip>
#include <stdexcept>

namespace spt {

TimeSeries::TimeSeries(std::vector<std::string> channel_names)
    : names_(std::move(channel_names)), values_(names_.size()) {}

bool TimeSeries::has_channel(const std::string& name) const {
  for (const auto& n : names_) {
    if (n == name) return true;
  }
  return false;
}

const std::vector<double>& TimeSeries::channel(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return values_[i];
  }
  throw std::out_of_range("no time-series channel named " + name);
}

void TimeSeries::push(double t, const std::vector<double>& values) {
  if (values.size() != names_.size()) throw std::invalid_argument("row width does not match channel count");
  times_.push_back(t);
  for (std::size_t i = 0; i < values.size(); ++i) values_[i].push_back(values[i]);
}

double TimeSeries::integrate(const std::string& name) const {
  const std::vector<double>& v = channel(name);
  double acc = 0.0;
  for (std::size_t i = 1; i < times_.size(); ++i) acc += 0.5 * (v[i] + v[i - 1]) * (times_[i] - times_[i - 1]);
  return acc;
}

void TimeSeries::write_csv(std::ostream& os,
                           const std::vector<std::pair<std::string, std::string>>& metadata) const {
  for (const auto& [k, v] : metadata) os << "# " << k << ": " << v << '\n';
  os << "time";
  for (const auto& n : names_) os << ',' << n;
  os << '\n';
  os << std::setprecision(12);
  for (std::size_t r = 0; r < times_.size(); ++r) {
    os << times_[r];
    for (const auto& col : values_) os << ',' << col[r];
    os << '\n';
  }
}

}  // namespace spt
