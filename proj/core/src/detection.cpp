#include "spt/detection.hpp"

#include <cmath>

#include "spt/rng.hpp"

namespace spt {

void DetectionParams::validate() const {
  if (!(gain >= 0) || !std::isfinite(gain)) throw DomainError("gain must be finite and >= 0");
  if (modes < 1) throw DomainError("modes must be >= 1");
  if (!(zeta >= 0) || !std::isfinite(zeta)) throw DomainError("zeta must be finite and >= 0");
  if (signal_model == SignalModel::empirical_histogram) {
    long total = 0;
    for (const auto& [n, f] : histogram) {
      if (n < 0 || f < 0) throw DomainError("histogram entries must be non-negative");
      total += f;
    }
    if (total == 0) throw DomainError("empirical signal model needs a non-empty histogram");
  }
}

ObservableMoments vacuum_observable_moments(int modes) {
  if (modes < 1) throw DomainError("modes must be >= 1");
  return {static_cast<double>(modes), static_cast<double>(modes)};
}

double signal_observable_mean(double gain, int modes) {
  if (!(gain >= 0)) throw DomainError("gain must be >= 0");
  if (modes < 1) throw DomainError("modes must be >= 1");
  return 2.0 * gain + modes;
}

double detectability_ratio(double gain, int modes) {
  if (modes < 1) throw DomainError("modes must be >= 1");
  return gain / std::sqrt(modes / 4.0);
}

double gaussian_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

DetectionPerformance detection_performance(const DetectionParams& params) {
  params.validate();
  const double threshold = params.zeta * std::sqrt(static_cast<double>(params.modes)) + params.offset;
  DetectionPerformance out;
  // Vacuum excess is Gaussian with variance M.
  out.dark_probability = gaussian_tail(threshold / std::sqrt(static_cast<double>(params.modes)));
  if (params.signal_model == SignalModel::exponential) {
    // Signal excess over M is exponential with mean 2N.
    if (params.gain == 0) {
      out.efficiency = out.dark_probability;
    } else {
      out.efficiency = threshold <= 0 ? 1.0 : std::exp(-threshold / (2.0 * params.gain));
    }
  } else {
    double total = 0.0, above = 0.0;
    for (const auto& [n, f] : params.histogram) {
      total += f;
      if (2.0 * n > threshold) above += f;
    }
    out.efficiency = above / total;
  }
  return out;
}

std::vector<double> sample_vacuum_observable(int modes, long samples, std::uint64_t seed, std::uint64_t stream) {
  if (modes < 1) throw DomainError("modes must be >= 1");
  if (samples < 0) throw DomainError("samples must be >= 0");
  Philox4x32 rng(seed, stream);
  const double s = std::sqrt(0.5);
  std::vector<double> out(samples);
  for (long i = 0; i < samples; ++i) {
    double o = 0.0;
    for (int k = 0; k < modes; ++k) {
      const double x = s * rng.normal(), p = s * rng.normal();
      o += x * x + p * p;
    }
    out[i] = o;
  }
  return out;
}

int mode_count_estimate(const SystemParams& params, double duration) {
  if (!(duration >= 0) || !std::isfinite(duration)) throw DomainError("duration must be finite and >= 0");
  const double dw = std::sqrt(params.g2 * params.g2 + params.omega * params.omega);
  const double m = std::ceil(dw * duration / (2.0 * M_PI));
  return std::max(1, static_cast<int>(m));
}

}  // namespace spt
