#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "spt/model.hpp"

namespace spt {

enum class SignalModel { exponential, empirical_histogram };

struct DetectionParams {
  /// Mean output photon number N.
  double gain = 0.0;
  /// Number of frequency modes M.
  int modes = 1;
  /// Threshold: detect when O - M > zeta sqrt(M).
  double zeta = 0.0;
  SignalModel signal_model = SignalModel::exponential;
  /// Photon-count histogram for the empirical model.
  std::map<int, long> histogram;
  /// Constant shift of the observable from coherent leakage, subtracted before thresholding.
  double offset = 0.0;

  void validate() const;
};

struct DetectionPerformance {
  double efficiency = 0.0;
  double dark_probability = 0.0;
};

struct ObservableMoments {
  double mean = 0.0;
  double variance = 0.0;
};

/// Vacuum moments of O = sum |beta_k|^2 over M heterodyne modes: (M, M).
ObservableMoments vacuum_observable_moments(int modes);

/// Mean observable for a non-squeezed output carrying N photons: 2N + M.
double signal_observable_mean(double gain, int modes);

/// N >> sqrt(M/4), reported as the ratio N / sqrt(M/4).
double detectability_ratio(double gain, int modes);

DetectionPerformance detection_performance(const DetectionParams& params);

/// Upper Gaussian tail Q(z).
double gaussian_tail(double z);

/// Samples O over the vacuum: each quadrature of every mode is N(0, 1/2).
/// Stream contract as for trajectories: (seed, stream) selects the sequence.
std::vector<double> sample_vacuum_observable(int modes, long samples, std::uint64_t seed, std::uint64_t stream = 0);

/// ceil(sqrt(g2^2 + omega^2) T / 2 pi), at least one mode.
int mode_count_estimate(const SystemParams& params, double duration);

}  // namespace spt
