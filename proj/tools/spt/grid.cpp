#include "spt/grid.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace spt::cli {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double to_double(const std::string& s, const std::string& grid) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty() || !std::isfinite(v)) {
    throw std::invalid_argument("grid '" + grid + "': '" + s + "' is not a finite number");
  }
  return v;
}

}  // namespace

GridSpec parse_grid(const std::string& text) {
  GridSpec g;
  if (text == "log") {
    g.log = true;
    g.default_range = true;
    return g;
  }
  auto parts = split(text, ':');
  if (!parts.empty() && parts.front() == "log") {
    g.log = true;
    parts.erase(parts.begin());
  } else if (!parts.empty() && parts.back() == "log") {
    g.log = true;
    parts.pop_back();
  }
  if (parts.size() != 3) {
    throw std::invalid_argument("grid '" + text + "': expected start:stop:count with optional log");
  }
  g.start = to_double(parts[0], text);
  g.stop = to_double(parts[1], text);
  int count = 0;
  const auto res = std::from_chars(parts[2].data(), parts[2].data() + parts[2].size(), count);
  if (res.ec != std::errc() || res.ptr != parts[2].data() + parts[2].size() || count < 1) {
    throw std::invalid_argument("grid '" + text + "': count must be a positive integer");
  }
  g.count = count;
  if (g.log && (g.start <= 0 || g.stop <= 0)) {
    throw std::invalid_argument("grid '" + text + "': log grids need positive endpoints");
  }
  return g;
}

GridSpec GridSpec::with_range(double a, double b, int n) const {
  GridSpec g = *this;
  g.start = a;
  g.stop = b;
  g.count = n;
  g.default_range = false;
  return g;
}

std::vector<double> GridSpec::values() const {
  if (default_range) throw std::logic_error("grid range not resolved");
  std::vector<double> v;
  v.reserve(count);
  if (count == 1) {
    v.push_back(start);
    return v;
  }
  for (int i = 0; i < count; ++i) {
    if (log) {
      const double a = std::log(start), b = std::log(stop);
      v.push_back(i == count - 1 ? stop : std::exp(a + i * (b - a) / (count - 1)));
    } else {
      v.push_back(i == count - 1 ? stop : start + i * (stop - start) / (count - 1));
    }
  }
  return v;
}

}  // namespace spt::cli
