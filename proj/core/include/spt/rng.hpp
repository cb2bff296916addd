#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace spt {

/// Philox4x32-10 counter-based generator. A stream is keyed by a 64-bit seed
/// and a 64-bit stream id (e.g. trajectory index); streams never overlap.
class Philox4x32 {
 public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  Philox4x32(std::uint64_t seed, std::uint64_t stream);

  /// The raw block function.
  static Block bijection(Block counter, Key key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  /// Uniform double on the open interval (0, 1) with 53 random bits.
  double uniform();
  /// Standard normal deviate (Box-Muller, both outputs used).
  double normal();

 private:
  void refill();

  Block counter_{};
  Key key_{};
  Block buffer_{};
  int next_ = 4;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spt
