#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spt/hilbert.hpp"
#include "spt/model.hpp"
#include "spt/ode.hpp"
#include "spt/timeseries.hpp"

namespace spt {

struct DensityMatrix {
  CMatrix rho;

  static DensityMatrix pure(const QuantumState& state);
  static DensityMatrix pure(const CVector& amplitudes);

  int dim() const { return static_cast<int>(rho.rows()); }
  Complex trace() const { return rho.trace(); }
  double purity() const;
  double hermiticity_defect() const;
  double min_eigenvalue() const;
  /// Re tr(O rho).
  double expectation(const OperatorMatrix& op) const;
  /// Throws NumericalError when trace, Hermiticity or positivity bounds fail.
  void validate(double trace_tol = 1e-6) const;
};

/// Real Gaussian single-photon amplitude (2 sigma^2/pi)^(1/4) exp(-sigma^2 (t-t0)^2).
struct PulseSpec {
  double sigma = 0.5;
  double center_time = 0.0;

  static PulseSpec from_tau(double tau, double center_time);
  static PulseSpec from_sigma(double sigma, double center_time);

  double tau() const { return 0.5 / sigma; }
  double amplitude(double t) const;
  double intensity(double t) const;
  /// Remaining input probability: integral of |alpha|^2 from t to infinity.
  double tail(double t) const;
  void validate() const;
};

Complex gaussian_pulse(const PulseSpec& spec, double t);

struct Observable {
  std::string name;
  OperatorMatrix op;
};

/// Dense-matrix Liouvillian superoperator in column-stacking convention:
/// vec(A X B) = (B^T kron A) vec(X).
SparseMatrix liouvillian(const OperatorMatrix& H, const CollapseSet& collapses);

/// Null vector of the Liouvillian with unit trace (sparse LU with the trace
/// constraint replacing one row). Falls back to long-time integration if the
/// factorization fails.
DensityMatrix steady_state(const OperatorMatrix& H, const CollapseSet& collapses);

/// Integral over [0, inf) of tr(O (rho(t) - rho_ss)), via one sparse solve.
double integrated_excess(const OperatorMatrix& H, const CollapseSet& collapses, const DensityMatrix& rho0,
                         const DensityMatrix& rho_ss, const OperatorMatrix& observable);

struct LindbladOptions {
  OdeOptions ode{};
  /// Expectation values recorded on the output grid.
  std::vector<Observable> observables;
  /// Time integrals of expectation values over the whole run, integrated
  /// alongside the state.
  std::vector<Observable> integrated;
  /// Population of this projector is monitored against top_layer_warning.
  std::optional<OperatorMatrix> top_layer;
  double top_layer_warning = 1e-3;
  /// Compute the minimum eigenvalue of rho at each output time.
  bool check_positivity = true;
};

struct LindbladResult {
  TimeSeries series;
  DensityMatrix final_state;
  std::vector<double> integrals;
  std::vector<std::string> warnings;
  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double max_top_layer = 0.0;
  long steps = 0;
};

/// Integrates d rho/dt = -i[H, rho] + sum D[C] rho on t_grid. The right-hand
/// side is evaluated as A + A^dagger with A = -i H_NH rho + (1/2) sum C rho C^dagger,
/// so every stage is exactly Hermitian.
LindbladResult lindblad_propagate(const OperatorMatrix& H, const CollapseSet& collapses,
                                  const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                  const LindbladOptions& options = {});

struct ReflectionOptions {
  HilbertSpec space{1, 10};
  DecoherenceParams decoherence{};
  double max_mean_n1 = 1e-2;
  double min_ground_population = 0.99;
};

struct ReflectionResult {
  double reflectance = 1.0;
  Complex amplitude{1.0, 0.0};
  double drive_amp = 0.0;
  double mean_n1 = 0.0;
  double ground_population = 1.0;
};

/// Steady-state |r1|^2 under a weak coherent drive drive_amp (a1 + a1^dagger);
/// drive_amp <= 0 selects 1e-4 sqrt(kappa1). The drive is reduced tenfold
/// until the weak-excitation bounds hold.
ReflectionResult steady_state_reflection(const SystemParams& params, double drive_amp = 0.0,
                                         const ReflectionOptions& options = {});

struct PulseResponseOptions {
  HilbertSpec space{1, 10};
  DecoherenceParams decoherence{};
  OdeOptions ode{};
  /// Add the remaining output after the grid end by a Liouvillian solve.
  bool resolvent_tail = true;
  double max_norm_drift = 1e-3;
};

struct PulseResponse {
  /// Channels: I_in1, I_out2, I_refl1, ground_population, top_layer.
  TimeSeries series;
  double absorbed_fraction = 0.0;
  double reflected_fraction = 0.0;
  /// Output photons inside the grid window plus the resolvent tail.
  double gain = 0.0;
  double gain_in_window = 0.0;
  double gain_tail = 0.0;
  double input_norm = 0.0;
  double max_norm_drift = 0.0;
  std::vector<std::string> warnings;
};

/// Single-photon input: the coherence vector phi (rho_10 column) obeys
/// phi' = -i H_NH phi + sqrt(kappa1) alpha |g,1,0>, and the one-photon
/// density matrix rho_11 obeys the Lindblad equation plus the source
/// -alpha (L phi<g00| - sqrt(kappa1) phi<g10|) + h.c. with L = sqrt(kappa1) a1.
PulseResponse single_photon_response(const SystemParams& params, const PulseSpec& pulse,
                                     const std::vector<double>& t_grid,
                                     const PulseResponseOptions& options = {});

enum class GainMethod { propagate, resolvent };

struct GainOptions {
  HilbertSpec space{1, 10};
  DecoherenceParams decoherence{};
  GainMethod method = GainMethod::resolvent;
  /// Input coupling; negative selects kappa1 = Gamma_set.
  double kappa1 = -1.0;
  double rtol = 1e-8;
  /// Propagation stops once the population outside |g,0,0> falls below this.
  double settle = 1e-9;
  double t_max = 1e7;
};

struct GainResult {
  double gain = 0.0;
  /// Interpreted as the impedance-matched input coupling Gamma_set.
  double bandwidth = 0.0;
  double kappa1 = 0.0;
  double duration = 0.0;
  double max_top_layer = 0.0;
  std::vector<std::string> warnings;
};

/// Output photons from cavity 2 starting in |e,0,0> with kappa1 as recovery
/// channel; bandwidth = Gamma_set at the cavity-2 truncation of options.space.
GainResult gain_and_bandwidth(const SystemParams& params, const GainOptions& options = {});

}  // namespace spt
