#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spt/dynamics.hpp"
#include "spt/effective.hpp"
#include "spt/model.hpp"
#include "spt/ode.hpp"
#include "spt/statistics.hpp"

namespace spt {

struct JumpRecord {
  double time = 0.0;
  int channel = 0;
  /// Expectation of TrajectoryOptions::post_jump_observable in the
  /// renormalized post-jump state (NaN when no observable is set).
  double post_value = std::numeric_limits<double>::quiet_NaN();
};

struct Trajectory {
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::string initial_state_label;
  double duration = 0.0;
  std::vector<std::string> channels;
  std::vector<JumpRecord> jumps;
  /// Largest violation of norm monotonicity or post-jump normalization seen.
  double final_norm_accounting = 0.0;
  /// Normalized state at the end of the run (empty unless requested).
  CVector final_state;

  int count(int channel) const;
  int count(const std::string& label) const;
};

enum class Propagator {
  /// Spectral propagation when H_NH is diagonalizable and well-conditioned,
  /// Runge-Kutta otherwise and while a single-photon input is active.
  automatic,
  spectral,
  runge_kutta,
};

struct TrajectoryOptions {
  Propagator propagator = Propagator::automatic;
  OdeOptions ode{1e-9, 1e-12};
  /// Relative accuracy of the located jump times.
  double time_tolerance = 1e-10;
  /// Largest eigenvector-matrix condition number accepted for spectral mode.
  double max_condition = 1e8;
  double norm_drift_limit = 1e-4;
  std::optional<OperatorMatrix> post_jump_observable;
  bool keep_final_state = false;
  long max_jumps = 100'000'000;
};

/// Gaussian single photon arriving through the kappa1 channel.
struct SinglePhotonInput {
  PulseSpec pulse;
  double kappa1 = 0.0;
  /// Index of |g,1,0> (where the photon enters) and |g,0,0>.
  int entry_index = 0;
  int ground_index = 0;
  /// Position of sqrt(kappa1) a1 in the collapse set.
  int channel = 0;
};

class TrajectorySimulator {
 public:
  TrajectorySimulator(OperatorMatrix H, CollapseSet collapses, TrajectoryOptions options = {});

  int dim() const { return dim_; }
  const CollapseSet& collapses() const { return collapses_; }
  bool spectral() const { return spectral_; }
  double eigenvector_condition() const { return condition_; }

  Trajectory run(const QuantumState& initial, double duration, std::uint64_t base_seed,
                 std::uint64_t index) const;
  Trajectory run(const SinglePhotonInput& input, double duration, std::uint64_t base_seed,
                 std::uint64_t index) const;

  /// Trajectories [0, n) written by index; threads <= 0 uses all cores.
  std::vector<Trajectory> ensemble(const QuantumState& initial, double duration, int n,
                                   std::uint64_t base_seed, int threads = 0) const;
  std::vector<Trajectory> ensemble(const SinglePhotonInput& input, double duration, int n,
                                   std::uint64_t base_seed, int threads = 0) const;

  struct Impl;

 private:
  int dim_ = 0;
  OperatorMatrix H_, Hnh_;
  CollapseSet collapses_;
  TrajectoryOptions options_;
  bool spectral_ = false;
  double condition_ = std::numeric_limits<double>::infinity();
  CVector eigenvalues_;
  CMatrix V_;
  Eigen::PartialPivLU<CMatrix> V_lu_;
  std::vector<SparseMatrix> jump_ops_;
  /// Basis states whose H_NH column vanishes: supported there, nothing evolves.
  std::vector<bool> frozen_;
};

/// Convenience wrapper constructing a simulator for one run.
Trajectory run_trajectory(const OperatorMatrix& H, const CollapseSet& collapses, const QuantumState& initial,
                          double duration, std::uint64_t seed, const TrajectoryOptions& options = {});
Trajectory run_trajectory(const OperatorMatrix& H, const CollapseSet& collapses, const SinglePhotonInput& input,
                          double duration, std::uint64_t seed, const TrajectoryOptions& options = {});

struct GainStatisticsOptions {
  HilbertSpec space{1, 10};
  DecoherenceParams decoherence{};
  int n_traj = 1500;
  /// Zero selects a run long enough for the system to settle in |g,0,0>.
  double duration = 0.0;
  std::uint64_t base_seed = 1;
  int threads = 0;
  /// Negative selects kappa1 = Gamma_set at the cavity-2 truncation of space.
  double kappa1 = -1.0;
  /// Start from a single-photon input instead of |e,0,0>.
  bool single_photon_input = false;
  /// Pulse length in units of 1/kappa1 and centre in units of tau.
  double pulse_tau_kappa1 = 10.0;
  double pulse_center_tau = 5.0;
  TrajectoryOptions trajectory{};
  /// Return the raw trajectories alongside the statistics.
  bool keep_trajectories = false;
};

struct GainStatistics {
  CountStatistics statistics;
  std::vector<int> counts;
  /// Mean number of jumps per trajectory in every channel.
  std::map<std::string, double> channel_means;
  double kappa1 = 0.0;
  double duration = 0.0;
  bool spectral = false;
  std::vector<Trajectory> trajectories;
};

/// Counts kappa2 jumps per trajectory.
GainStatistics gain_statistics(const SystemParams& params, const GainStatisticsOptions& options = {});

struct RateEstimate {
  double rate = 0.0;
  double error = 0.0;
  long events = 0;
  /// True when no events were seen: rate is then a 95% upper bound.
  bool upper_bound = false;
};

struct DarkCountOptions {
  DarkSpaceOptions space{};
  int n_traj = 2000;
  double duration = 1e4;
  std::uint64_t base_seed = 1;
  int threads = 0;
  /// Negative selects kappa1 = Gamma_set of the ideal model.
  double kappa1 = -1.0;
  /// Burst closes when the post-jump qutrit-g population exceeds this.
  double burst_close = 0.99;
  /// Validity guard: excited dwell / total time must stay below this.
  double max_dwell_fraction = 0.05;
  TrajectoryOptions trajectory{};
};

struct DarkRateEstimate {
  /// Events per total sampled time.
  RateEstimate single;
  RateEstimate enhanced;
  /// Same with the excited-subspace dwell time removed from the exposure
  /// and single events inside bursts discarded.
  RateEstimate single_excised;
  RateEstimate enhanced_excised;
  long n_events_single = 0;
  long n_events_enhanced = 0;
  long n_bursts_unclosed = 0;
  double total_time = 0.0;
  double dwell_time = 0.0;
  double kappa1 = 0.0;
  bool valid = true;
  std::vector<std::string> warnings;
};

DarkRateEstimate dark_count_trajectories(const SystemParams& params, const DarkCountOptions& options = {});

/// Analyses an existing ensemble (channel indices of C_G and C_E given);
/// the trajectories must carry the qutrit-g population as post-jump value.
DarkRateEstimate dark_rates_from_trajectories(const std::vector<Trajectory>& trajectories, int channel_ground,
                                              int channel_excited, double burst_close);

struct NoJumpOptions {
  DarkSpaceOptions space{};
  /// Zero selects 10 periods of 2 pi / sqrt(g2^2 + omega^2).
  double window = 0.0;
  /// Scale factor on the excited-qutrit part of the cavity-2 jump.
  double excited_prefactor = 1.0;
};

struct NoJumpRates {
  /// Late-time normalized jump rates from |g,0,0>.
  double steady_single = 0.0;
  double steady_enhanced = 0.0;
  /// Relative change over the last decade of time.
  double single_drift = 0.0;
  double enhanced_drift = 0.0;
  bool converged = true;
  /// Time-integrated ratio for C_E over the window after a single dark count.
  double dynamical_enhanced = 0.0;
  double window = 0.0;
  /// Norm decay rate of the eigenmode with the largest |g,0,0> weight.
  double dressed_ground_decay = 0.0;
  double t_end = 0.0;
  std::vector<std::string> warnings;
};

/// t_end <= 0 selects ten lifetimes of the dressed ground state. Much later
/// times let slower excited-manifold modes dominate and trip the drift flag.
NoJumpRates no_jump_rates(const SystemParams& params, double t_end, const NoJumpOptions& options = {});

}  // namespace spt
