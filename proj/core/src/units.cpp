#include "spt/units.hpp"

#include <cmath>

#include "spt/types.hpp"

namespace spt {

UnitSystem::UnitSystem(double g2_mhz) : g2_mhz_(g2_mhz) {
  if (!(g2_mhz > 0) || !std::isfinite(g2_mhz)) throw DomainError("g2 reference frequency must be positive");
}

}  // namespace spt
