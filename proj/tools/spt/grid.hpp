#pragma once

#include <optional>
#include <string>
#include <vector>

namespace spt::cli {

struct GridSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;
  bool log = false;
  /// Bare "log": the experiment chooses the range.
  bool default_range = false;

  std::vector<double> values() const;
  /// Fill in the range of a bare "log" spec.
  GridSpec with_range(double start, double stop, int count) const;
};

/// Accepts "start:stop:count", "start:stop:count:log", "log:start:stop:count"
/// and "log". Throws std::invalid_argument with a diagnostic.
GridSpec parse_grid(const std::string& text);

}  // namespace spt::cli
