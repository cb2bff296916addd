#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace spt {

/// Sampled real-valued channels on a common time grid.
class TimeSeries {
 public:
  TimeSeries() = default;
  explicit TimeSeries(std::vector<std::string> channel_names);

  const std::vector<double>& times() const { return times_; }
  const std::vector<std::string>& names() const { return names_; }
  std::size_t size() const { return times_.size(); }
  bool has_channel(const std::string& name) const;
  const std::vector<double>& channel(const std::string& name) const;

  /// Append one row; values are given in channel order.
  void push(double t, const std::vector<double>& values);

  /// Trapezoidal integral of a channel over the grid.
  double integrate(const std::string& name) const;

  /// CSV with `# key: value` metadata lines, a header row and one row per time.
  void write_csv(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& metadata = {}) const;

 private:
  std::vector<std::string> names_;
  std::vector<double> times_;
  std::vector<std::vector<double>> values_;
};

}  // namespace spt
