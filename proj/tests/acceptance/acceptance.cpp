// One PASS/FAIL line per acceptance criterion. Default settings are the
// reduced CI variants; --full runs the complete ensembles and trajectory checks.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spt/detection.hpp"
#include "spt/dressed.hpp"
#include "spt/dynamics.hpp"
#include "spt/effective.hpp"
#include "spt/montecarlo.hpp"
#include "spt/units.hpp"

using namespace spt;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  // Records one sub-check; the criterion passes only if every check does.
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [x]");
  }
  // Context that does not decide the outcome.
  void info(const std::string& what) { detail << (detail.tellp() > 0 ? "; " : "") << "(" << what << ")"; }
};

struct Settings {
  bool full = false;
  int threads = 0;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string pm(double v, double e) { return fmt("%.4g", v) + " +- " + fmt("%.2g", e); }

SystemParams base_params(double g1, double omega, double kappa2) {
  SystemParams p;
  p.g1 = g1;
  p.omega = omega;
  p.kappa2 = kappa2;
  return p;
}

// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = x.size();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<double> logspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = a * std::pow(b / a, i / double(n - 1));
  return v;
}

void criterion1(Outcome& o, const Settings&) {
  const SystemParams p = base_params(0.05, 2.0, 2.0);
  const double r1 = setting_rate_analytic(p, 1).value;
  const double r2 = setting_rate_analytic(p, 2).value;
  // Closed forms at this point reduce to 4 g1^2 / kappa2 and 2.88 / 896.
  o.check(std::abs(r1 / 0.0025 - 1) < 1e-9, "order 1 " + fmt("%.7g", r1));
  o.check(std::abs(r2 / (2.88 / 896) - 1) < 1e-9, "order 2 " + fmt("%.8g", r2));
  double worst = 0;
  for (int k = 1; k <= 3; ++k) {
    const double exact = setting_rate_analytic(p, k).value;
    worst = std::max(worst, std::abs(setting_rate(p, k).value / exact - 1));
  }
  o.check(worst < 1e-9, "inversion vs closed form orders 1-3 max rel " + fmt("%.2g", worst));
}

void criterion2(Outcome& o, const Settings&) {
  double worst_all = 0, worst_hi = 0, at = 0;
  for (const double k2 : logspace(0.6, 4.0, 50)) {
    const SystemParams p = base_params(0.05, 2.0, k2);
    const double numeric = setting_rate(p, 10).value;
    const double printed = setting_rate_analytic(p, 3, ClosedForm::printed).value;
    const double dev = std::abs(printed / numeric - 1);
    if (dev > worst_all) {
      worst_all = dev;
      at = k2;
    }
    if (k2 >= 1.5) worst_hi = std::max(worst_hi, dev);
  }
  o.check(worst_all < 0.05, "max dev on [0.6, 4] " + fmt("%.3g", worst_all) + " at kappa2 " + fmt("%.3g", at));
  o.check(worst_hi < 0.02, "max dev on [1.5, 4] " + fmt("%.3g", worst_hi));
}

void criterion3(Outcome& o, const Settings&) {
  SystemParams p = base_params(0.05, 2.0, 2.0);
  const double gamma_set = setting_rate(p, 10).value;
  const auto grid = logspace(gamma_set / 10, gamma_set * 10, 81);
  double best = 1e9, best_k = 0, worst_off = 0;
  for (const double k1 : grid) {
    p.kappa1 = k1;
    const double r = steady_state_reflection(p).reflectance;
    if (r < best) {
      best = r;
      best_k = k1;
    }
    if (std::abs(std::log10(k1 / gamma_set)) >= 0.5) {
      worst_off = std::max(worst_off, std::abs(r / reflection_analytic(gamma_set, k1) - 1));
    }
  }
  o.check(std::abs(best_k / gamma_set - 1) < 0.05, "dip at kappa1/Gamma_set " + fmt("%.4g", best_k / gamma_set));
  p.kappa1 = gamma_set;
  const double dip = steady_state_reflection(p).reflectance;
  o.check(dip < 1e-3, "dip value " + fmt("%.3g", dip));
  o.check(worst_off < 0.05, "off-dip max dev " + fmt("%.3g", worst_off));
}

void criterion4(Outcome& o, const Settings&) {
  SystemParams p = base_params(0.05, 2.0, 1.0);
  p.kappa1 = setting_rate(p, 10).value;
  const double tau = 10.0 / p.kappa1;
  const PulseSpec pulse = PulseSpec::from_tau(tau, 5 * tau);
  std::vector<double> grid(401);
  for (int i = 0; i <= 400; ++i) grid[i] = i * 20.0 * tau / 400;
  const PulseResponse r = single_photon_response(p, pulse, grid);
  GainOptions g;
  g.kappa1 = p.kappa1;
  const double reference = gain_and_bandwidth(p, g).gain;
  o.check(r.absorbed_fraction >= 0.99, "absorbed " + fmt("%.5f", r.absorbed_fraction));
  o.check(std::abs(r.gain / reference - 1) < 0.02,
          "pulse gain " + fmt("%.5g", r.gain) + " vs e00 gain " + fmt("%.5g", reference));
}

void criterion5(Outcome& o, const Settings& s) {
  GainStatisticsOptions opt;
  opt.space = {2, 16};
  opt.n_traj = 1500;
  opt.threads = s.threads;
  const CountStatistics st = gain_statistics(base_params(0.25, 2.0, 1.0), opt).statistics;
  o.check(std::abs(st.mean - 11.67) < 3 * st.statistical_error, "mean " + pm(st.mean, st.statistical_error));
  o.check(std::abs(st.variance - 101) < 3 * st.variance_error, "variance " + pm(st.variance, st.variance_error));
  o.check(std::abs(st.g2_zero - 1.66) <= 0.1, "g2(0) " + pm(st.g2_zero, st.g2_zero_error));
}

void criterion6(Outcome& o, const Settings& s) {
  GainStatisticsOptions opt;
  opt.space = {4, 16};
  opt.n_traj = s.full ? 1500 : 300;
  opt.duration = 9000;
  opt.threads = s.threads;
  const GainStatistics g = gain_statistics(base_params(0.005, 0.5, 1.0), opt);
  const CountStatistics& st = g.statistics;
  const double tol = s.full ? 0.10 : 0.20;
  o.check(std::abs(st.mean / 74 - 1) <= tol,
          std::to_string(opt.n_traj) + " traj mean " + pm(st.mean, st.statistical_error) + " (tol " +
              fmt("%.0f", tol * 100) + "%)");
  const KsResult ks = exponential_tail_test(g.counts, 5, st.mean);
  o.check(ks.p_value > 0.01, "tail KS p " + fmt("%.3g", ks.p_value) + " (n " + std::to_string(ks.n) + ")");
}

void criterion7(Outcome& o, const Settings& s) {
  const UnitSystem u(120.0);
  SystemParams p;
  p.g1 = u.from_mhz(6.0);
  p.omega = u.from_mhz(240.0);
  p.kappa2 = u.from_mhz(120.0);
  p.anharmonicity = u.from_mhz(8426.0);
  GainOptions g;
  g.decoherence = DecoherenceParams::radiative(u.from_mhz(0.227));
  // Gain and bandwidth belong to the ideal model; A enters the dark counts only.
  SystemParams ideal = p;
  ideal.anharmonicity = kInfiniteAnharmonicity;
  const GainResult r = gain_and_bandwidth(ideal, g);
  o.check(std::abs(r.gain / 172 - 1) <= 0.15, "gain " + fmt("%.4g", r.gain));
  o.info("gain without qutrit decay " + fmt("%.4g", gain_and_bandwidth(ideal).gain));
  o.check(std::abs(u.to_mhz(r.bandwidth) / 0.6 - 1) <= 0.15, "bandwidth " + fmt("%.4g", u.to_mhz(r.bandwidth)) + " MHz");
  const double single_khz = u.to_khz(dark_rates_steady(p).single_asymptotic.value);
  o.check(std::abs(single_khz / 14.4 - 1) <= 0.20, "single dark " + fmt("%.4g", single_khz) + " kHz");
  DarkCountOptions d;
  d.threads = s.threads;
  const DarkRateEstimate est = dark_count_trajectories(p, d);
  const double hz = u.to_hz(est.enhanced.rate);
  const bool ok = est.enhanced.upper_bound ? hz >= 330 : hz >= 330 && hz <= 1320;
  o.check(ok, std::string("enhanced dark ") + (est.enhanced.upper_bound ? "< " : "") + fmt("%.3g", hz) + " Hz (" +
                  std::to_string(est.n_events_enhanced) + " events)");
}

void criterion8(Outcome& o, const Settings& s) {
  const std::vector<double> as = {30, 40, 50, 60, 70, 85, 100};
  std::vector<double> single, enhanced;
  double worst_nojump = 0, eta_min = 1e9, eta_max = 0;
  for (const double a : as) {
    SystemParams p = base_params(0.2, 2.0, 0.1);
    p.anharmonicity = a;
    const DarkRates steady = dark_rates_steady(p);
    single.push_back(steady.single.value);
    enhanced.push_back(steady.enhanced.value);
    // Enhanced events per unit time: steady excitation plus excitation within
    // the window that follows each single dark count.
    const NoJumpRates nj = no_jump_rates(p, 0.0);
    const double eta = 1 + nj.steady_single * nj.dynamical_enhanced * nj.window / nj.steady_enhanced;
    eta_min = std::min(eta_min, eta);
    eta_max = std::max(eta_max, eta);
    worst_nojump = std::max(worst_nojump, std::abs(nj.steady_single / single.back() - 1));
  }
  const double s1 = loglog_slope(as, single), s2 = loglog_slope(as, enhanced);
  o.check(std::abs(s1 + 2) <= 0.1, "single slope " + fmt("%.3f", s1));
  o.check(std::abs(s2 + 4) <= 0.3, "enhanced slope " + fmt("%.3f", s2));
  o.check(eta_min >= 2.5 && eta_max <= 6, "no-jump eta in [" + fmt("%.2f", eta_min) + ", " + fmt("%.2f", eta_max) + "]");
  o.info("no-jump single vs inversion max dev " + fmt("%.3g", worst_nojump));
  if (!s.full) return;
  long events = 0;
  double expected = 0;
  std::string per_a;
  for (std::size_t i = 0; i < as.size(); ++i) {
    SystemParams p = base_params(0.2, 2.0, 0.1);
    p.anharmonicity = as[i];
    DarkCountOptions d;
    d.threads = s.threads;
    const DarkRateEstimate est = dark_count_trajectories(p, d);
    events += est.n_events_enhanced;
    expected += enhanced[i] * est.total_time;
    per_a += (i ? " " : "") + fmt("%.2f", est.enhanced.rate / enhanced[i]);
  }
  const double eta = events / expected, err = std::sqrt(double(events)) / expected;
  o.check(eta >= 2.5 && eta <= 6, "trajectory eta " + pm(eta, err) + " (per A: " + per_a + ")");
}

void criterion9(Outcome& o, const Settings&) {
  const SystemParams p = base_params(0.05, 2.0, 1.0);
  const double clean = gain_and_bandwidth(p).gain;
  GainOptions g;
  g.decoherence = DecoherenceParams::dephasing(1e-2);
  const double dephased = gain_and_bandwidth(p, g).gain;
  g.decoherence = DecoherenceParams::radiative(1e-2);
  const double radiative = gain_and_bandwidth(p, g).gain;
  o.check(std::abs(dephased / clean - 1) < 0.05, "dephasing change " + fmt("%.3g", dephased / clean - 1));
  o.check(1 - radiative / clean > 0.10, "radiative reduction " + fmt("%.3g", 1 - radiative / clean));
}

void criterion10(Outcome& o, const Settings&) {
  const auto perf = [](double gain, int modes, double zeta) {
    DetectionParams d;
    d.gain = gain;
    d.modes = modes;
    d.zeta = zeta;
    return detection_performance(d);
  };
  const DetectionPerformance a = perf(200, 90, 2), b = perf(1000, 600, 3);
  o.check(std::abs(a.efficiency - 0.954) < 1e-3 && std::abs(a.dark_probability - 0.0228) < 1e-3,
          "(200,90,2) -> " + fmt("%.4f", a.efficiency) + ", " + fmt("%.4f", a.dark_probability));
  o.check(std::abs(b.efficiency - 0.964) < 1e-3 && std::abs(b.dark_probability - 0.00135) < 1e-3,
          "(1000,600,3) -> " + fmt("%.4f", b.efficiency) + ", " + fmt("%.5f", b.dark_probability));
  const int m = 90;
  const long n = 100000;
  const auto x = sample_vacuum_observable(m, n, 1);
  double s1 = 0, s2 = 0, s4 = 0;
  for (const double v : x) s1 += v;
  const double mean = s1 / n;
  for (const double v : x) {
    s2 += (v - mean) * (v - mean);
    s4 += std::pow(v - mean, 4);
  }
  const double var = s2 / (n - 1);
  const double mean_err = std::sqrt(var / n), var_err = std::sqrt((s4 / n - var * var) / n);
  o.check(std::abs(mean - m) < 3 * mean_err && std::abs(var - m) < 3 * var_err,
          "vacuum moments (" + pm(mean, mean_err) + ", " + pm(var, var_err) + ")");
}

void criterion11(Outcome& o, const Settings&) {
  // Density-matrix bounds with every decoherence channel on.
  SystemParams p = base_params(0.2, 2.0, 1.0);
  p.kappa1 = 0.1;
  const HilbertSpace space({1, 4});
  const OperatorMatrix h = hamiltonian_ideal(p, space);
  const CollapseSet cs = collapse_set(p, {0.01, 0.02, 0.01, 0.02}, space);
  std::vector<double> grid;
  for (int i = 0; i <= 50; ++i) grid.push_back(i * 2.0);
  const LindbladResult lr =
      lindblad_propagate(h, cs, DensityMatrix::pure(basis_state(space, Level::e, 0, 0)), grid);
  o.check(lr.max_trace_error < 1e-6 && lr.min_eigenvalue > -1e-8 && lr.final_state.hermiticity_defect() < 1e-9,
          "rho bounds (trace " + fmt("%.1e", lr.max_trace_error) + ", min eig " + fmt("%.1e", lr.min_eigenvalue) + ")");

  // Non-Hermitian norm monotonicity, recorded by the sampler.
  double worst_norm = 0;
  TrajectoryOptions rk;
  rk.propagator = Propagator::runge_kutta;
  for (const auto& opts : {TrajectoryOptions{}, rk}) {
    const TrajectorySimulator sim(h, cs, opts);
    for (const Trajectory& t : sim.ensemble(basis_state(space, Level::e, 0, 0), 200.0, 20, 3, 1)) {
      worst_norm = std::max(worst_norm, t.final_norm_accounting);
    }
  }
  o.check(worst_norm < 1e-10, "norm monotonicity " + fmt("%.1e", worst_norm));

  double worst_p = 0, worst_ab = 0;
  for (const double omega : {0.1, 0.5, 2.0, 7.0}) {
    const DressedBasis d = dressed_basis(1.0, omega);
    worst_p = std::max(worst_p, (d.p_matrix.transpose() * d.p_matrix - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff());
    worst_ab = std::max(worst_ab, std::abs(d.alpha * d.alpha + d.beta * d.beta - 0.5));
  }
  o.check(worst_p < 1e-12 && worst_ab < 1e-12, "P orthogonal, alpha^2 + beta^2 = 1/2");

  const CollapseSet split = collapse_set(p, {}, space, true);
  const OperatorMatrix sum = split[split.find(labels::kappa2_ground)].op + split[split.find(labels::kappa2_excited)].op;
  const OperatorMatrix a2 = annihilation(space, Cavity::two) * Complex(std::sqrt(p.kappa2));
  o.check((sum - a2).dense().cwiseAbs().maxCoeff() < 1e-14, "C_G + C_E = sqrt(kappa2) a2");

  // Effective setting jump scales as g1^2.
  const double r1 = setting_rate(base_params(0.01, 2.0, 1.0), 6).value;
  const double r2 = setting_rate(base_params(0.03, 2.0, 1.0), 6).value;
  o.check(std::abs(r2 / r1 / 9 - 1) < 1e-9, "g1^2 scaling ratio " + fmt("%.10g", r2 / r1));

  const TrajectorySimulator sim(h, cs);
  const auto one = sim.ensemble(basis_state(space, Level::e, 0, 0), 200.0, 16, 9, 1);
  const auto many = sim.ensemble(basis_state(space, Level::e, 0, 0), 200.0, 16, 9, 4);
  bool same = true;
  for (std::size_t i = 0; i < one.size(); ++i) {
    same = same && one[i].jumps.size() == many[i].jumps.size();
    for (std::size_t k = 0; same && k < one[i].jumps.size(); ++k) {
      same = one[i].jumps[k].time == many[i].jumps[k].time && one[i].jumps[k].channel == many[i].jumps[k].channel;
    }
  }
  o.check(same, "trajectory determinism across thread counts");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  Settings s;
  std::vector<int> only;
  app.add_flag("--full,--nightly", s.full, "Full ensembles and the trajectory dark-count check");
  app.add_option("--only", only, "Run only these criteria")->check(CLI::Range(1, 11));
  app.add_option("--threads", s.threads, "Worker threads (0 = all cores)");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::function<void(Outcome&, const Settings&)>> criteria = {
      criterion1, criterion2, criterion3, criterion4,  criterion5, criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11};
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i](o, s);
    } catch (const std::exception& e) {
      o.check(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("criterion %2d: %s  %s  (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", o.detail.str().c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
