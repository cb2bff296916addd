#include "spt/statistics.hpp"

#include <algorithm>
#include <cmath>

#include "spt/types.hpp"

namespace spt {

namespace {

struct Moments {
  double n = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0;
};

CountStatistics from_moments(const Moments& m, std::map<int, long> histogram) {
  CountStatistics st;
  st.n_traj = static_cast<long>(m.n);
  st.histogram = std::move(histogram);
  if (m.n == 0) return st;
  const double n = m.n;
  st.mean = m.s1 / n;
  const double mu = st.mean;
  // central moments about the sample mean
  const double c2 = m.s2 / n - mu * mu;
  const double c4 = m.s4 / n - 4 * mu * m.s3 / n + 6 * mu * mu * m.s2 / n - 3 * std::pow(mu, 4);
  st.variance = n > 1 ? c2 * n / (n - 1) : 0.0;
  st.variance = std::max(st.variance, 0.0);
  st.statistical_error = n > 1 ? std::sqrt(st.variance / n) : 0.0;
  if (n > 3) {
    const double v = (c4 - (n - 3) / (n - 1) * c2 * c2) / n;
    st.variance_error = std::sqrt(std::max(v, 0.0));
  }
  if (mu > 0) {
    st.g2_zero = 1.0 + (st.variance - mu) / (mu * mu);
    st.g2_zero_plus_variant = 1.0 + (st.variance + mu) / (mu * mu);
  }
  if (n > 2 && mu > 0) {
    // Jackknife over the histogram: every count value contributes with its multiplicity.
    double sum = 0, sum2 = 0;
    for (const auto& [k, f] : st.histogram) {
      const double x = k;
      const double s1 = m.s1 - x, s2 = m.s2 - x * x, nn = n - 1;
      const double mean = s1 / nn;
      const double var = (s2 - nn * mean * mean) / (nn - 1);
      const double g = mean > 0 ? 1.0 + (var - mean) / (mean * mean) : 0.0;
      sum += f * g;
      sum2 += f * g * g;
    }
    const double gbar = sum / n;
    st.g2_zero_error = std::sqrt(std::max(0.0, (n - 1) / n * (sum2 - n * gbar * gbar)));
  }
  return st;
}

}  // namespace

CountStatistics count_statistics(const std::map<int, long>& histogram) {
  Moments m;
  for (const auto& [k, f] : histogram) {
    if (k < 0 || f < 0) throw DomainError("histogram entries must be non-negative");
    const double x = k;
    m.n += f;
    m.s1 += f * x;
    m.s2 += f * x * x;
    m.s3 += f * x * x * x;
    m.s4 += f * x * x * x * x;
  }
  return from_moments(m, histogram);
}

CountStatistics count_statistics(const std::vector<int>& counts) {
  std::map<int, long> h;
  for (int c : counts) ++h[c];
  return count_statistics(h);
}

CountStatistics CountStatistics::merged(const CountStatistics& other) const {
  std::map<int, long> h = histogram;
  for (const auto& [k, f] : other.histogram) h[k] += f;
  return count_statistics(h);
}

double kolmogorov_survival(double x) {
  if (x <= 0) return 1.0;
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

double p_value(double d, long n) {
  // Stephens' small-sample correction to the asymptotic law.
  const double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

KsResult ks_test(std::vector<double> samples, const std::function<double(double)>& cdf) {
  KsResult r;
  r.n = static_cast<long>(samples.size());
  if (samples.empty()) return r;
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  r.statistic = d;
  r.p_value = p_value(d, r.n);
  return r;
}

KsResult ks_test_discrete(const std::vector<int>& samples, const std::function<double(int)>& cdf) {
  KsResult r;
  r.n = static_cast<long>(samples.size());
  if (samples.empty()) return r;
  std::map<int, long> h;
  for (int s : samples) ++h[s];
  const double n = static_cast<double>(samples.size());
  double below = 0.0, d = 0.0;
  for (const auto& [k, f] : h) {
    const double left = below / n;
    below += f;
    const double right = below / n;
    d = std::max({d, std::abs(right - cdf(k)), std::abs(left - cdf(k - 1))});
  }
  r.statistic = d;
  r.p_value = p_value(d, r.n);
  return r;
}

KsResult exponential_tail_test(const std::vector<int>& counts, int n_min, double lambda) {
  if (!(lambda > 0)) throw DomainError("tail scale must be positive");
  std::vector<int> tail;
  for (int c : counts) {
    if (c >= n_min) tail.push_back(c);
  }
  return ks_test_discrete(tail, [n_min, lambda](int n) {
    return n < n_min ? 0.0 : 1.0 - std::exp(-(n + 1 - n_min) / lambda);
  });
}

}  // namespace spt
