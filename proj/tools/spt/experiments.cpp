#include "spt/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "spt/detection.hpp"
#include "spt/dynamics.hpp"
#include "spt/effective.hpp"
#include "spt/montecarlo.hpp"
#include "spt/units.hpp"

#ifndef SPT_VERSION
#define SPT_VERSION "unknown"
#endif

namespace spt::cli {

namespace {

struct ParamInfo {
  std::function<double&(ExperimentConfig&)> ref;
  bool rate;
};

const std::map<std::string, ParamInfo>& parameter_table() {
  static const std::map<std::string, ParamInfo> table = {
      {"g1", {[](ExperimentConfig& c) -> double& { return c.params.g1; }, true}},
      {"g2", {[](ExperimentConfig& c) -> double& { return c.params.g2; }, true}},
      {"omega", {[](ExperimentConfig& c) -> double& { return c.params.omega; }, true}},
      {"kappa1", {[](ExperimentConfig& c) -> double& { return c.params.kappa1; }, true}},
      {"kappa2", {[](ExperimentConfig& c) -> double& { return c.params.kappa2; }, true}},
      {"A", {[](ExperimentConfig& c) -> double& { return c.params.anharmonicity; }, true}},
      {"Delta", {[](ExperimentConfig& c) -> double& { return c.params.Delta; }, true}},
      {"delta1", {[](ExperimentConfig& c) -> double& { return c.params.delta1; }, true}},
      {"delta2", {[](ExperimentConfig& c) -> double& { return c.params.delta2; }, true}},
      {"gamma", {[](ExperimentConfig& c) -> double& { return c.gamma; }, true}},
      {"gamma-p", {[](ExperimentConfig& c) -> double& { return c.gamma_p; }, true}},
      {"zeta", {[](ExperimentConfig& c) -> double& { return c.zeta; }, false}},
      {"gain", {[](ExperimentConfig& c) -> double& { return c.gain; }, false}},
  };
  return table;
}

const std::vector<std::string> kExperiments = {"setting-rate", "reflection",  "gain",     "pulse-response",
                                               "trajectories", "dark-counts", "detection"};

// Negative kappa1 means "use Gamma_set"; library calls see kappa1 = 0 and
// receive the sentinel through their own kappa1 option where they have one.
SystemParams resolved(const SystemParams& p, bool ideal) {
  SystemParams out = p;
  out.kappa1 = std::max(0.0, p.kappa1);
  if (ideal) out.anharmonicity = kInfiniteAnharmonicity;
  return out;
}

double gamma_set(const ExperimentConfig& c) { return setting_rate(resolved(c.params, true), c.n2).value; }

DecoherenceParams decoherence(const ExperimentConfig& c) {
  DecoherenceParams d = DecoherenceParams::radiative(c.gamma);
  const DecoherenceParams p = DecoherenceParams::dephasing(c.gamma_p);
  d.gamma_p_ee = p.gamma_p_ee;
  d.gamma_p_ff = p.gamma_p_ff;
  return d;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : "; ") + x;
  return s;
}

void describe(Table& t, const ExperimentConfig& c) {
  t.meta("experiment", c.experiment);
  t.meta("version", std::string(SPT_VERSION));
  t.meta("units", c.units == "mhz" ? "rates in 2pi x MHz (g2 = " + format_number(c.params.g2) + ")" : "g2");
  const auto& p = c.params;
  t.meta("g1", p.g1);
  t.meta("g2", p.g2);
  t.meta("omega", p.omega);
  if (p.kappa1 < 0) {
    t.meta("kappa1", "Gamma_set");
  } else {
    t.meta("kappa1", p.kappa1);
  }
  t.meta("kappa2", p.kappa2);
  t.meta("A", p.anharmonicity);
  t.meta("Delta", p.Delta);
  t.meta("delta1", p.delta1);
  t.meta("delta2", p.delta2);
  t.meta("gamma", c.gamma);
  t.meta("gamma_p", c.gamma_p);
  t.meta("n1_max", static_cast<long long>(c.n1));
  t.meta("n2_max", static_cast<long long>(c.n2));
  t.meta("seed", static_cast<long long>(c.seed));
  if (c.sweep) t.meta("sweep", c.sweep->first);
}

std::vector<double> sweep_values(const ExperimentConfig& c, std::vector<double> fallback_range = {}) {
  if (!c.sweep) return {};
  GridSpec g = c.sweep->second;
  if (g.default_range) {
    if (fallback_range.size() != 3) {
      throw DomainError("a bare 'log' grid is only defined for the reflection kappa1 sweep");
    }
    g = g.with_range(fallback_range[0], fallback_range[1], static_cast<int>(fallback_range[2]));
  }
  return g.values();
}

// One configuration per sweep point (the base config when not sweeping).
std::vector<ExperimentConfig> points(const ExperimentConfig& c, const std::vector<double>& values) {
  if (!c.sweep) return {c};
  std::vector<ExperimentConfig> out;
  const auto& info = parameter_table().at(c.sweep->first);
  for (double v : values) {
    ExperimentConfig p = c;
    info.ref(p) = v;
    out.push_back(p);
  }
  return out;
}

std::vector<Column> with_sweep_column(const ExperimentConfig& c, std::vector<Column> cols) {
  if (c.sweep) cols.insert(cols.begin(), Column{c.sweep->first, parameter_table().at(c.sweep->first).rate});
  return cols;
}

void push_sweep(const ExperimentConfig& base, const ExperimentConfig& p, std::vector<Cell>& row) {
  if (base.sweep) {
    ExperimentConfig copy = p;
    row.insert(row.begin(), parameter_table().at(base.sweep->first).ref(copy));
  }
}

double analytic_or_nan(const SystemParams& p, int order, ClosedForm form) {
  try {
    return setting_rate_analytic(p, order, form).value;
  } catch (const DomainError&) {
    return std::nan("");
  }
}

Table setting_rate_experiment(const ExperimentConfig& c) {
  Table t;
  describe(t, c);
  t.set_columns(with_sweep_column(c, {{"gamma_set", true},
                                      {"gamma_set_order1", true},
                                      {"gamma_set_order2", true},
                                      {"gamma_set_order3", true},
                                      {"gamma_set_order3_printed", true},
                                      {"convergence_delta", true}}));
  std::vector<std::string> warnings;
  for (const auto& p : points(c, sweep_values(c))) {
    const SystemParams ideal = resolved(p.params, true);
    const RateResult r = setting_rate(ideal, p.n2);
    for (const auto& w : r.warnings) {
      if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) warnings.push_back(w);
    }
    std::vector<Cell> row = {r.value,
                             analytic_or_nan(ideal, 1, ClosedForm::exact),
                             analytic_or_nan(ideal, 2, ClosedForm::exact),
                             analytic_or_nan(ideal, 3, ClosedForm::exact),
                             analytic_or_nan(ideal, 3, ClosedForm::printed),
                             r.convergence_delta};
    push_sweep(c, p, row);
    t.add_row(std::move(row));
  }
  if (!warnings.empty()) t.meta("warnings", join(warnings));
  return t;
}

Table reflection_experiment(const ExperimentConfig& c) {
  Table t;
  describe(t, c);
  const double gs = gamma_set(c);
  t.summary("gamma_set", gs, true);
  t.set_columns(with_sweep_column(c, {{"kappa1_used", true},
                                      {"reflectance", false},
                                      {"reflectance_analytic", false},
                                      {"mean_n1", false},
                                      {"drive_amp", false}}));
  ReflectionOptions opt;
  opt.space = {c.n1, c.n2};
  opt.decoherence = decoherence(c);
  for (auto p : points(c, sweep_values(c, {gs / 10.0, gs * 10.0, 41}))) {
    if (p.params.kappa1 < 0) p.params.kappa1 = gs;
    const ReflectionResult r = steady_state_reflection(resolved(p.params, true), c.drive, opt);
    std::vector<Cell> row = {p.params.kappa1, r.reflectance, reflection_analytic(gamma_set(p), p.params.kappa1),
                             r.mean_n1, r.drive_amp};
    push_sweep(c, p, row);
    t.add_row(std::move(row));
  }
  return t;
}

GainMethod gain_method(const std::string& m) {
  if (m.empty() || m == "resolvent") return GainMethod::resolvent;
  if (m == "propagate") return GainMethod::propagate;
  throw DomainError("method must be 'resolvent' or 'propagate' for the gain experiment");
}

Table gain_experiment(const ExperimentConfig& c) {
  Table t;
  describe(t, c);
  t.meta("method", c.method.empty() ? "resolvent" : c.method);
  t.set_columns(with_sweep_column(
      c, {{"gain", false}, {"bandwidth", true}, {"kappa1_used", true}, {"max_top_layer", false}}));
  GainOptions opt;
  opt.space = {c.n1, c.n2};
  opt.decoherence = decoherence(c);
  opt.method = gain_method(c.method);
  std::vector<std::string> warnings;
  for (const auto& p : points(c, sweep_values(c))) {
    opt.kappa1 = p.params.kappa1;
    opt.decoherence = decoherence(p);
    const GainResult g = gain_and_bandwidth(resolved(p.params, true), opt);
    for (const auto& w : g.warnings) warnings.push_back(w);
    std::vector<Cell> row = {g.gain, g.bandwidth, g.kappa1, g.max_top_layer};
    push_sweep(c, p, row);
    t.add_row(std::move(row));
  }
  if (std::isfinite(c.params.anharmonicity)) {
    warnings.push_back("gain uses the infinite-anharmonicity model; A is ignored");
  }
  if (!warnings.empty()) t.meta("warnings", join(warnings));
  return t;
}

Table pulse_experiment(const ExperimentConfig& c) {
  if (c.sweep) throw DomainError("pulse-response does not take a sweep");
  if (c.points < 2) throw DomainError("points must be >= 2");
  Table t;
  describe(t, c);
  SystemParams p = resolved(c.params, true);
  if (c.params.kappa1 < 0) p.kappa1 = gamma_set(c);
  if (!(p.kappa1 > 0)) throw DomainError("pulse-response requires kappa1 > 0");
  const double tau = c.tau_kappa1 / p.kappa1;
  const PulseSpec pulse = PulseSpec::from_tau(tau, c.center_tau * tau);
  const double t_end = c.t_end > 0 ? c.t_end : pulse.center_time + 5.0 * tau;
  std::vector<double> grid;
  for (int i = 0; i < c.points; ++i) grid.push_back(i == c.points - 1 ? t_end : i * t_end / (c.points - 1));
  PulseResponseOptions opt;
  opt.space = {c.n1, c.n2};
  opt.decoherence = decoherence(c);
  const PulseResponse r = single_photon_response(p, pulse, grid, opt);
  t.meta("tau", tau);
  t.meta("center_time", pulse.center_time);
  t.summary("kappa1_used", p.kappa1, true);
  t.summary("gain", r.gain);
  t.summary("gain_in_window", r.gain_in_window);
  t.summary("gain_tail", r.gain_tail);
  t.summary("absorbed_fraction", r.absorbed_fraction);
  t.summary("reflected_fraction", r.reflected_fraction);
  t.summary("input_norm", r.input_norm);
  if (!r.warnings.empty()) t.meta("warnings", join(r.warnings));
  std::vector<Column> cols = {{"t", false}};
  for (const auto& n : r.series.names()) cols.push_back({n, false});
  t.set_columns(cols);
  for (std::size_t i = 0; i < r.series.size(); ++i) {
    std::vector<Cell> row = {r.series.times()[i]};
    for (const auto& n : r.series.names()) row.push_back(r.series.channel(n)[i]);
    t.add_row(std::move(row));
  }
  return t;
}

Table trajectories_experiment(const ExperimentConfig& c) {
  if (c.sweep) throw DomainError("trajectories does not take a sweep");
  if (c.input != "e00" && c.input != "photon") throw DomainError("input must be 'e00' or 'photon'");
  Table t;
  describe(t, c);
  GainStatisticsOptions opt;
  opt.space = {c.n1, c.n2};
  opt.decoherence = decoherence(c);
  opt.n_traj = c.n_traj > 0 ? c.n_traj : 1500;
  opt.duration = c.duration;
  opt.base_seed = c.seed;
  opt.threads = c.threads;
  opt.kappa1 = c.params.kappa1;
  opt.single_photon_input = c.input == "photon";
  opt.pulse_tau_kappa1 = c.tau_kappa1;
  opt.pulse_center_tau = c.center_tau;
  opt.keep_trajectories = c.jump_log;
  const GainStatistics g = gain_statistics(resolved(c.params, true), opt);
  const CountStatistics& st = g.statistics;

  t.meta("input", c.input);
  t.meta("duration", g.duration);
  t.meta("propagator", g.spectral ? "spectral" : "runge-kutta");
  t.summary("kappa1_used", g.kappa1, true);
  t.summary("n_traj", static_cast<long long>(st.n_traj));
  t.summary("mean", st.mean);
  t.summary("mean_error", st.statistical_error);
  t.summary("variance", st.variance);
  t.summary("variance_error", st.variance_error);
  t.summary("g2_zero_mandel", st.g2_zero);
  t.summary("g2_zero_mandel_error", st.g2_zero_error);
  t.summary("g2_zero_plus_sign", st.g2_zero_plus_variant);
  nlohmann::ordered_json hist = nlohmann::ordered_json::object();
  for (const auto& [k, f] : st.histogram) hist[std::to_string(k)] = f;
  t.summary_json("histogram", hist);

  if (c.jump_log) {
    t.set_columns({{"trajectory_id", false}, {"jump_time", false}, {"channel", false}});
    for (const auto& r : g.trajectories) {
      for (const auto& j : r.jumps) t.add_row({static_cast<long long>(r.index), j.time, r.channels[j.channel]});
    }
  } else {
    t.set_columns({{"count", false}, {"frequency", false}});
    for (const auto& [k, f] : st.histogram) t.add_row({static_cast<long long>(k), static_cast<long long>(f)});
  }
  return t;
}

Table dark_experiment(const ExperimentConfig& c) {
  Table t;
  describe(t, c);
  std::vector<Column> cols = {{"single_inversion", true},      {"enhanced_inversion", true},
                              {"single_bare", true},           {"enhanced_bare", true},
                              {"single_asymptotic", true},     {"single_asymptotic_alt", true},
                              {"enhanced_asymptotic", true},   {"enhanced_total_estimate", true},
                              {"enhanced_eta_fit", true},      {"nojump_single", true},
                              {"nojump_enhanced", true},       {"nojump_dynamical_enhanced", true},
                              {"nojump_converged", false}};
  const bool traj = c.n_traj > 0;
  if (traj) {
    for (const char* n : {"traj_single", "traj_single_error", "traj_single_excised", "traj_enhanced",
                          "traj_enhanced_error", "traj_enhanced_excised"}) {
      cols.push_back({n, true});
    }
    cols.push_back({"traj_enhanced_events", false});
    cols.push_back({"traj_upper_bound", false});
  }
  t.set_columns(with_sweep_column(c, cols));
  if (traj) t.meta("duration", c.duration > 0 ? c.duration : 1e4);
  std::vector<std::string> warnings;
  for (const auto& p : points(c, sweep_values(c))) {
    const SystemParams params = resolved(p.params, false);
    const DarkRates d = dark_rates_steady(params);
    const DynamicalDarkCorrection dyn = dynamical_dark_correction(params);
    NoJumpOptions nj_opt;
    nj_opt.window = c.window;
    const NoJumpRates nj = no_jump_rates(params, c.t_end, nj_opt);
    for (const auto& w : nj.warnings) warnings.push_back("A=" + format_number(p.params.anharmonicity) + ": " + w);
    std::vector<Cell> row = {d.single.value,
                             d.enhanced.value,
                             d.single_bare.value,
                             d.enhanced_bare.value,
                             d.single_asymptotic.value,
                             d.single_asymptotic_alt.value,
                             d.enhanced_asymptotic.value,
                             dyn.total.value,
                             dyn.eta_fit.value,
                             nj.steady_single,
                             nj.steady_enhanced,
                             nj.dynamical_enhanced,
                             static_cast<long long>(nj.converged)};
    if (traj) {
      DarkCountOptions o;
      o.n_traj = c.n_traj;
      o.duration = c.duration > 0 ? c.duration : 1e4;
      o.base_seed = c.seed;
      o.threads = c.threads;
      o.kappa1 = p.params.kappa1;
      const DarkRateEstimate e = dark_count_trajectories(params, o);
      for (const auto& w : e.warnings) warnings.push_back("A=" + format_number(p.params.anharmonicity) + ": " + w);
      row.insert(row.end(), {e.single.rate, e.single.error, e.single_excised.rate, e.enhanced.rate, e.enhanced.error,
                             e.enhanced_excised.rate, static_cast<long long>(e.n_events_enhanced),
                             static_cast<long long>(e.enhanced.upper_bound)});
    }
    push_sweep(c, p, row);
    t.add_row(std::move(row));
  }
  if (!warnings.empty()) t.meta("warnings", join(warnings));
  return t;
}

std::map<int, long> read_histogram(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open histogram file '" + path + "'");
  std::map<int, long> h;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    long count = 0, freq = 0;
    char comma = 0;
    if (!(ss >> count >> comma >> freq) || comma != ',') {
      if (lineno == 1 || h.empty()) continue;  // header row
      throw DomainError(path + ":" + std::to_string(lineno) + ": expected 'count,frequency'");
    }
    h[static_cast<int>(count)] += freq;
  }
  return h;
}

Table detection_experiment(const ExperimentConfig& c) {
  Table t;
  describe(t, c);
  DetectionParams base;
  base.gain = c.gain;
  base.zeta = c.zeta;
  if (c.modes > 0) {
    base.modes = c.modes;
  } else if (c.mode_duration > 0) {
    base.modes = mode_count_estimate(c.params, c.mode_duration);
  } else {
    throw DomainError("detection needs --modes or --mode-duration");
  }
  if (c.model == "empirical") {
    if (c.histogram.empty()) throw DomainError("the empirical model needs --histogram");
    base.signal_model = SignalModel::empirical_histogram;
    base.histogram = read_histogram(c.histogram);
  } else if (c.model != "exponential") {
    throw DomainError("model must be 'exponential' or 'empirical'");
  }
  t.meta("model", c.model);
  t.summary("modes", static_cast<long long>(base.modes));
  t.summary("signal_observable_mean", signal_observable_mean(base.gain, base.modes));
  t.summary("detectability_ratio", detectability_ratio(base.gain, base.modes));
  if (c.samples > 0) {
    const auto s = sample_vacuum_observable(base.modes, c.samples, c.seed);
    double m = 0, v = 0;
    for (double x : s) m += x;
    m /= s.size();
    for (double x : s) v += (x - m) * (x - m);
    v /= std::max<std::size_t>(1, s.size() - 1);
    t.summary("vacuum_sample_mean", m);
    t.summary("vacuum_sample_variance", v);
  }
  if (c.sweep && c.sweep->first != "zeta" && c.sweep->first != "gain") {
    throw DomainError("detection sweeps only zeta or gain");
  }
  t.set_columns(with_sweep_column(c, {{"efficiency", false}, {"dark_probability", false}}));
  for (const auto& p : points(c, sweep_values(c))) {
    DetectionParams d = base;
    d.gain = p.gain;
    d.zeta = p.zeta;
    const DetectionPerformance perf = detection_performance(d);
    std::vector<Cell> row = {perf.efficiency, perf.dark_probability};
    push_sweep(c, p, row);
    t.add_row(std::move(row));
  }
  return t;
}

void apply_units(ExperimentConfig& c) {
  if (c.units == "g2") return;
  if (c.units != "mhz") throw DomainError("units must be 'g2' or 'mhz'");
  const UnitSystem u(c.params.g2);
  if (c.sweep && c.sweep->first == "g2") throw DomainError("g2 cannot be swept in mhz units");
  for (const auto& [name, info] : parameter_table()) {
    if (!info.rate || name == "g2") continue;
    double& v = info.ref(c);
    if (name == "kappa1" && v < 0) continue;  // sentinel for Gamma_set
    v = u.from_mhz(v);
  }
  if (c.sweep && parameter_table().at(c.sweep->first).rate && !c.sweep->second.default_range) {
    c.sweep->second.start = u.from_mhz(c.sweep->second.start);
    c.sweep->second.stop = u.from_mhz(c.sweep->second.stop);
  }
  c.params.g2 = 1.0;
}

}  // namespace

const std::vector<std::string>& sweepable_parameters() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, info] : parameter_table()) v.push_back(k);
    return v;
  }();
  return names;
}

Table run_experiment(ExperimentConfig c) {
  if (std::find(kExperiments.begin(), kExperiments.end(), c.experiment) == kExperiments.end()) {
    throw DomainError("unknown experiment '" + c.experiment + "'");
  }
  if (c.sweep && !parameter_table().count(c.sweep->first)) {
    throw DomainError("sweep parameter '" + c.sweep->first + "' is not a known field");
  }
  if (c.n1 < 1 || c.n2 < 1) throw DomainError("n1 and n2 must be >= 1");
  const double g2_mhz = c.params.g2;
  apply_units(c);
  Table t;
  if (c.experiment == "setting-rate") t = setting_rate_experiment(c);
  else if (c.experiment == "reflection") t = reflection_experiment(c);
  else if (c.experiment == "gain") t = gain_experiment(c);
  else if (c.experiment == "pulse-response") t = pulse_experiment(c);
  else if (c.experiment == "trajectories") t = trajectories_experiment(c);
  else if (c.experiment == "dark-counts") t = dark_experiment(c);
  else t = detection_experiment(c);
  if (c.units == "mhz") t.set_rate_units(g2_mhz, "_mhz");
  return t;
}

namespace {

std::string timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  return buf;
}

double parse_real(const std::string& name, const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) throw DomainError("--" + name + ": '" + text + "' is not a number");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Single-photon transistor simulator"};
  app.set_version_flag("--version", std::string(SPT_VERSION));
  app.set_config("--config", "", "Key-value config file (TOML/INI); command-line flags take precedence");
  app.get_config_formatter_base()->arrayDelimiter(',');

  ExperimentConfig c;
  c.params.g1 = 0.05;
  c.params.g2 = 1.0;
  c.params.omega = 2.0;
  c.params.kappa2 = 1.0;
  c.params.kappa1 = -1.0;
  std::string A_text = "inf", format = "csv", output = "-";
  std::string sweep_name, grid_text;
  bool no_timestamp = false;
  std::map<std::string, std::string> shortcut_grids;

  app.add_option("experiment", c.experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(kExperiments));
  auto* sys = "System parameters (units of g2 unless --units mhz)";
  app.add_option("--g1", c.params.g1, "Cavity-1 coupling")->capture_default_str()->group(sys);
  app.add_option("--g2", c.params.g2, "Cavity-2 coupling (unit of frequency)")->capture_default_str()->group(sys);
  app.add_option("--omega", c.params.omega, "Drive strength")->capture_default_str()->group(sys);
  app.add_option("--kappa1", c.params.kappa1, "Cavity-1 decay; negative selects Gamma_set")
      ->capture_default_str()
      ->group(sys);
  app.add_option("--kappa2", c.params.kappa2, "Cavity-2 decay")->capture_default_str()->group(sys);
  app.add_option("--A,--anharmonicity", A_text, "Anharmonicity (inf for the ideal model)")
      ->capture_default_str()
      ->group(sys);
  app.add_option("--Delta", c.params.Delta, "Drive detuning")->group(sys);
  app.add_option("--delta1", c.params.delta1, "Cavity-1 detuning")->group(sys);
  app.add_option("--delta2", c.params.delta2, "Cavity-2 detuning")->group(sys);
  app.add_option("--gamma", c.gamma, "Radiative qutrit decay (gamma_fe = 2 gamma)")->group(sys);
  app.add_option("--gamma-p", c.gamma_p, "Qutrit dephasing (gamma_p_ff = 2 gamma_p)")->group(sys);
  app.add_option("--n1", c.n1, "Cavity-1 photon truncation")->capture_default_str()->group(sys);
  app.add_option("--n2", c.n2, "Cavity-2 photon truncation")->capture_default_str()->group(sys);
  app.add_option("--units", c.units, "Rate units")->check(CLI::IsMember({"g2", "mhz"}))->capture_default_str();

  auto* sw = "Sweeps";
  app.add_option("--sweep", sweep_name, "Parameter to sweep")->group(sw);
  app.add_option("--grid", grid_text, "Sweep grid start:stop:count[:log]")->group(sw);
  for (const auto& name : sweepable_parameters()) {
    app.add_option("--" + name + "-grid", shortcut_grids[name], "Sweep " + name + " over a grid")->group(sw);
  }

  auto* run = "Run control";
  app.add_option("--seed", c.seed, "Base seed for trajectory streams")->capture_default_str()->group(run);
  app.add_option("--threads", c.threads, "Worker threads (0 = all cores)")->capture_default_str()->group(run);
  app.add_option("-o,--output", output, "Output file ('-' for stdout)")->capture_default_str()->group(run);
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}))->group(run);
  app.add_flag("--no-timestamp", no_timestamp, "Omit the generation timestamp")->group(run);

  auto* ex = "Experiment options";
  app.add_option("--method", c.method, "gain: resolvent|propagate")->group(ex);
  app.add_option("--drive", c.drive, "reflection: coherent drive amplitude (0 = automatic)")->group(ex);
  app.add_option("--tau-kappa1", c.tau_kappa1, "pulse length in units of 1/kappa1")->capture_default_str()->group(ex);
  app.add_option("--center-tau", c.center_tau, "pulse centre in units of tau")->capture_default_str()->group(ex);
  app.add_option("--points", c.points, "pulse-response: output grid points")->capture_default_str()->group(ex);
  app.add_option("--t-end", c.t_end, "pulse-response window / no-jump end time (0 = automatic)")->group(ex);
  app.add_option("--n-traj", c.n_traj, "number of trajectories")->group(ex);
  app.add_option("--duration", c.duration, "trajectory duration (0 = automatic)")->group(ex);
  app.add_option("--input", c.input, "trajectories: e00|photon")->capture_default_str()->group(ex);
  app.add_option("--gain", c.gain, "detection: mean output photon number")->group(ex);
  app.add_option("--modes", c.modes, "detection: number of modes M")->group(ex);
  app.add_option("--zeta", c.zeta, "detection: threshold parameter")->capture_default_str()->group(ex);
  app.add_option("--mode-duration", c.mode_duration, "detection: estimate M from this duration")->group(ex);
  app.add_option("--model", c.model, "detection: exponential|empirical")->capture_default_str()->group(ex);
  app.add_option("--histogram", c.histogram, "detection: count,frequency CSV for the empirical model")->group(ex);
  app.add_option("--samples", c.samples, "detection: vacuum sampler draws")->group(ex);
  app.add_option("--window", c.window, "dark-counts: dynamical window (0 = 10 dressed periods)")->group(ex);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    c.params.anharmonicity = parse_real("A", A_text);
    std::vector<std::pair<std::string, std::string>> grids;
    for (const auto& [name, text] : shortcut_grids) {
      if (!text.empty()) grids.emplace_back(name, text);
    }
    if (!sweep_name.empty() || !grid_text.empty()) {
      if (sweep_name.empty() || grid_text.empty()) throw DomainError("--sweep and --grid must be given together");
      grids.emplace_back(sweep_name, grid_text);
    }
    if (grids.size() > 1) throw DomainError("only one sweep parameter may be given");
    if (!grids.empty()) {
      try {
        c.sweep = std::make_pair(grids[0].first, parse_grid(grids[0].second));
      } catch (const std::invalid_argument& e) {
        throw DomainError(std::string("--") + grids[0].first + "-grid: " + e.what());
      }
    }
    c.jump_log = format == "csv";
    const Table t = run_experiment(c);
    const std::string stamp = no_timestamp ? "" : timestamp_now();
    const std::string text = format == "json" ? t.json(stamp) : t.csv(stamp);
    if (output == "-") {
      std::cout << text;
    } else {
      std::ofstream out(output);
      if (!out) throw DomainError("cannot write '" + output + "'");
      out << text;
    }
    return 0;
  } catch (const DomainError& e) {
    std::cerr << "spt: config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "spt: numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "spt: error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace spt::cli
