#pragma once

#include <functional>
#include <map>
#include <vector>

namespace spt {

/// Photon-count statistics over an ensemble of trajectories.
struct CountStatistics {
  long n_traj = 0;
  double mean = 0.0;
  /// Unbiased sample variance.
  double variance = 0.0;
  std::map<int, long> histogram;
  /// Mandel form 1 + (var - mean) / mean^2.
  double g2_zero = 0.0;
  /// 1 + (var + mean) / mean^2, reported alongside for comparison.
  double g2_zero_plus_variant = 0.0;
  /// Standard error of the mean.
  double statistical_error = 0.0;
  /// Standard error of the sample variance (fourth-moment estimate).
  double variance_error = 0.0;
  /// Jackknife standard error of g2_zero.
  double g2_zero_error = 0.0;

  double fano() const { return mean > 0 ? variance / mean : 0.0; }
  /// Associative merge of two ensembles.
  CountStatistics merged(const CountStatistics& other) const;
};

CountStatistics count_statistics(const std::vector<int>& counts);
/// Rebuild all moments from a histogram.
CountStatistics count_statistics(const std::map<int, long>& histogram);

/// Kolmogorov limiting survival function Q(x) = 2 sum (-1)^(k-1) exp(-2 k^2 x^2).
double kolmogorov_survival(double x);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  long n = 0;
};

/// One-sample KS test of continuous samples against a CDF.
KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf);

/// KS distance between the empirical distribution of integer samples and a
/// discrete CDF, evaluated on both sides of every support point.
KsResult ks_test_discrete(const std::vector<int>& samples, const std::function<double(int)>& cdf);

/// Tail test used for counting distributions: counts >= n_min compared with
/// the conditional exponential law P(N <= n | N >= n_min) = 1 - exp(-(n + 1 - n_min)/lambda).
KsResult exponential_tail_test(const std::vector<int>& counts, int n_min, double lambda);

}  // namespace spt
