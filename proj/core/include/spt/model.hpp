#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "spt/hilbert.hpp"

namespace spt {

inline constexpr double kInfiniteAnharmonicity = std::numeric_limits<double>::infinity();

/// System parameters in units of g2 (unless converted through units.hpp).
struct SystemParams {
  double g1 = 0.0;
  double g2 = 1.0;
  double omega = 0.0;
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double delta_e = 0.0;
  double delta_f = 0.0;
  double delta_cav1 = 0.0;
  double delta_cav2 = 0.0;
  double anharmonicity = kInfiniteAnharmonicity;
  double Delta = 0.0;
  double delta1 = 0.0;
  double delta2 = 0.0;
  /// Matrix-element ratio of the residual couplings (default sqrt 2).
  double residual_ratio = std::sqrt(2.0);

  bool finite_anharmonicity() const { return std::isfinite(anharmonicity); }
  bool zero_detunings() const;
  void validate() const;
};

struct DecoherenceParams {
  double gamma_eg = 0.0;
  double gamma_fe = 0.0;
  double gamma_p_ee = 0.0;
  double gamma_p_ff = 0.0;

  /// gamma_eg = gamma, gamma_fe = 2 gamma.
  static DecoherenceParams radiative(double gamma);
  /// gamma_p_ee = gamma_p, gamma_p_ff = 2 gamma_p.
  static DecoherenceParams dephasing(double gamma_p);

  bool any() const { return gamma_eg > 0 || gamma_fe > 0 || gamma_p_ee > 0 || gamma_p_ff > 0; }
  void validate() const;
};

/// Which residual couplings of the finite-anharmonicity Hamiltonian to keep.
struct ResidualTerms {
  bool cavity1 = true;
  bool cavity2 = true;
  bool drive = true;

  static ResidualTerms none() { return {false, false, false}; }
};

struct Jump {
  std::string label;
  OperatorMatrix op;
};

/// Ordered list of labelled collapse operators.
class CollapseSet {
 public:
  void add(std::string label, OperatorMatrix op);
  const std::vector<Jump>& jumps() const { return jumps_; }
  std::size_t size() const { return jumps_.size(); }
  const Jump& operator[](std::size_t i) const { return jumps_[i]; }
  /// Index of the labelled jump, or -1.
  int find(const std::string& label) const;
  std::vector<std::string> labels() const;
  /// Sum of C^dagger C over all jumps.
  OperatorMatrix decay_operator(int dim) const;
  CollapseSet restrict(const Subspace& sub) const;
  /// Rescale the jump with the given label by a factor.
  void scale(const std::string& label, double factor);

 private:
  std::vector<Jump> jumps_;
};

namespace labels {
inline const std::string kappa1 = "kappa1";
inline const std::string kappa2 = "kappa2";
inline const std::string kappa2_ground = "kappa2_G";
inline const std::string kappa2_excited = "kappa2_E";
inline const std::string gamma_eg = "gamma_eg";
inline const std::string gamma_fe = "gamma_fe";
inline const std::string gamma_p_ee = "gamma_p_ee";
inline const std::string gamma_p_ff = "gamma_p_ff";
}  // namespace labels

/// Rotating-frame Hamiltonian for infinite anharmonicity. The drive enters
/// with matrix element omega/2 on the f-e transition.
OperatorMatrix hamiltonian_ideal(const SystemParams& params, const HilbertSpace& space);

/// Drive-frame Hamiltonian with finite anharmonicity A, including the
/// residual couplings ratio*g1 (cavity 1 on f-e), g2/ratio (cavity 2 on e-g)
/// and a residual e-g drive with matrix element omega/(2*ratio).
OperatorMatrix hamiltonian_finite_A(const SystemParams& params, const HilbertSpace& space,
                                    ResidualTerms residual = {});

/// A*(sigma_ee + sigma_ff + n1): the frame offset between the finite-A and
/// ideal Hamiltonians at zero detunings.
OperatorMatrix anharmonic_frame_offset(double anharmonicity, const HilbertSpace& space);

/// Cavity jumps sqrt(kappa1) a1 and sqrt(kappa2) a2 plus qutrit decay and
/// dephasing when the rates are positive. With split=true the cavity-2 jump
/// is replaced by its ground (qutrit g) and excited (qutrit e, f) parts.
CollapseSet collapse_set(const SystemParams& params, const DecoherenceParams& decoherence,
                         const HilbertSpace& space, bool split = false);

/// H - (i/2) sum C^dagger C.
OperatorMatrix nonhermitian(const OperatorMatrix& H, const CollapseSet& collapses);

}  // namespace spt
