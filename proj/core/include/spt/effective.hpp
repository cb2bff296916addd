#pragma once

#include <limits>
#include <string>
#include <vector>

#include "spt/hilbert.hpp"
#include "spt/model.hpp"

namespace spt {

enum class RateMethod { numeric_inversion, analytic_N1, analytic_N2, analytic_N3, asymptotic };

std::string to_string(RateMethod method);

struct RateResult {
  double value = 0.0;
  RateMethod method = RateMethod::numeric_inversion;
  int truncation = 0;
  /// Free-form variant tag, e.g. "printed" or "main-text".
  std::string variant;
  /// Change relative to the next-lower truncation (NaN when not computed).
  double convergence_delta = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::string> warnings;
};

/// L_eff = C H_NH^{-1} V+ with the columns of V+ as sources.
struct EffectiveJump {
  CMatrix matrix;
  std::vector<std::string> source_labels;
  std::vector<std::string> target_labels;
  /// Reciprocal condition estimate of H_NH.
  double rcond = 0.0;
  /// Relative residual of the linear solve.
  double residual = 0.0;

  /// <src|L^dagger L|src>.
  double rate(int source = 0) const;
  /// |<target|L|src>|^2.
  double rate(int target, int source) const;
};

/// Computes the effective jump by an LU solve against V+; throws
/// NumericalError if H_NH is singular or the residual exceeds 1e-10.
EffectiveJump effective_jump(const CMatrix& C, const CMatrix& H_NH, const CMatrix& V_plus,
                             std::vector<std::string> source_labels = {},
                             std::vector<std::string> target_labels = {});

/// Setting rate from |g,1,0> into the excited manifold truncated at n2_trunc
/// cavity-2 photons, by numeric inversion.
RateResult setting_rate(const SystemParams& params, int n2_trunc);

enum class ClosedForm {
  /// Exact symbolic inversion at the given truncation.
  exact,
  /// The three-photon expression as usually printed, with an extra
  /// -96 g2^4 kappa2^2 omega^4 / f^2 term. Identical to exact for orders 1, 2.
  printed,
};

RateResult setting_rate_analytic(const SystemParams& params, int order, ClosedForm form = ClosedForm::exact);

/// Cubic denominator polynomial f(g2, kappa2, omega) of the three-photon form.
double setting_rate_f(double g2, double kappa2, double omega);

/// |r|^2 = (G/k - 1)^2 / (G/k + 1)^2.
double reflection_analytic(double gamma_set, double kappa1);

/// Seven states {g00, e00, g01, e01, f00, f01, g10} of the (1, 1) space.
Subspace dark_count_subspace(const HilbertSpace& space);

struct DarkSpaceOptions {
  /// Use the full product space of `space` instead of the seven-state list.
  bool enlarged = false;
  HilbertSpec space{1, 1};
  /// Include sqrt(kappa1) a1 in the eliminated-space non-Hermitian Hamiltonian.
  bool include_kappa1 = false;
};

struct DarkRates {
  RateResult single;
  RateResult enhanced;
  RateResult single_bare;
  RateResult enhanced_bare;
  /// g2^2 omega^2 / (4 A^2 kappa2)
  RateResult single_asymptotic;
  /// kappa2 g2^2 omega^2 / (4 (A^2 kappa2^2 + g2^4))
  RateResult single_asymptotic_alt;
  /// g2^2 omega^4 / (32 A^4 kappa2)
  RateResult enhanced_asymptotic;
  /// Complex ground-state energy used by the light-shifted inversion.
  Complex ground_energy{0.0, 0.0};
};

DarkRates dark_rates_steady(const SystemParams& params, const DarkSpaceOptions& options = {});

/// Empirical enhancement of the total over the steady enhanced dark rate.
inline constexpr double kDarkEtaFit = 4.0;

struct DynamicalDarkCorrection {
  /// g2^2 omega^4 / (32 A^4 kappa2)
  RateResult correction;
  /// steady asymptotic + correction
  RateResult total;
  /// kDarkEtaFit x steady asymptotic
  RateResult eta_fit;
};

DynamicalDarkCorrection dynamical_dark_correction(const SystemParams& params);

}  // namespace spt
