#pragma once

namespace spt {

/// Converts angular frequencies given as 2pi x MHz to units of g2 and back.
class UnitSystem {
 public:
  explicit UnitSystem(double g2_mhz);

  double g2_mhz() const { return g2_mhz_; }
  double from_mhz(double value_mhz) const { return value_mhz / g2_mhz_; }
  double to_mhz(double value) const { return value * g2_mhz_; }
  double to_khz(double value) const { return value * g2_mhz_ * 1e3; }
  double to_hz(double value) const { return value * g2_mhz_ * 1e6; }

 private:
  double g2_mhz_;
};

}  // namespace spt
