#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "spt/montecarlo.hpp"

namespace spt {

namespace {

// 95% upper bound for zero Poisson events.
constexpr double kZeroEventBound = 2.995732273553991;

RateEstimate estimate(long events, double exposure) {
  RateEstimate r;
  r.events = events;
  if (!(exposure > 0)) return r;
  if (events == 0) {
    r.rate = kZeroEventBound / exposure;
    r.upper_bound = true;
    return r;
  }
  r.rate = events / exposure;
  r.error = r.rate / std::sqrt(static_cast<double>(events));
  return r;
}

double ideal_setting_rate(const SystemParams& params) {
  SystemParams ideal = params;
  ideal.anharmonicity = kInfiniteAnharmonicity;
  return setting_rate(ideal, 10).value;
}

}  // namespace

DarkRateEstimate dark_rates_from_trajectories(const std::vector<Trajectory>& trajectories, int channel_ground,
                                              int channel_excited, double burst_close) {
  DarkRateEstimate out;
  long single_outside = 0;
  for (const Trajectory& tr : trajectories) {
    out.total_time += tr.duration;
    bool open = false;
    double start = 0.0;
    for (const JumpRecord& j : tr.jumps) {
      if (j.channel == channel_ground) {
        ++out.n_events_single;
        if (!open) ++single_outside;
      }
      if (j.channel == channel_excited && !open) {
        ++out.n_events_enhanced;
        open = true;
        start = j.time;
      }
      if (open && std::isnan(j.post_value)) {
        throw DomainError("dark-count analysis needs the qutrit-g population recorded at every jump");
      }
      if (open && j.post_value > burst_close) {
        out.dwell_time += j.time - start;
        open = false;
      }
    }
    if (open) {
      out.dwell_time += tr.duration - start;
      ++out.n_bursts_unclosed;
    }
  }
  const double excised = out.total_time - out.dwell_time;
  out.single = estimate(out.n_events_single, out.total_time);
  out.enhanced = estimate(out.n_events_enhanced, out.total_time);
  out.single_excised = estimate(single_outside, excised);
  out.enhanced_excised = estimate(out.n_events_enhanced, excised);
  return out;
}

DarkRateEstimate dark_count_trajectories(const SystemParams& params, const DarkCountOptions& options) {
  params.validate();
  if (!params.finite_anharmonicity()) throw DomainError("dark-count trajectories require a finite anharmonicity");
  if (options.n_traj < 1) throw DomainError("dark-count trajectories need n_traj >= 1");
  if (!(options.duration > 0)) throw DomainError("dark-count duration must be positive");

  SystemParams p = params;
  p.kappa1 = options.kappa1 >= 0 ? options.kappa1 : ideal_setting_rate(params);
  const HilbertSpace space(options.space.enlarged ? options.space.space : HilbertSpec{1, 1});
  const Subspace sub = options.space.enlarged ? Subspace::full(space) : dark_count_subspace(space);
  const OperatorMatrix H = sub.restrict(hamiltonian_finite_A(p, space));
  const CollapseSet cs = collapse_set(p, {}, space, true).restrict(sub);

  TrajectoryOptions topt = options.trajectory;
  topt.post_jump_observable = sub.level_projector(Level::g);
  const TrajectorySimulator sim(H, cs, topt);
  const auto runs =
      sim.ensemble(sub.basis_state(Level::g, 0, 0), options.duration, options.n_traj, options.base_seed, options.threads);

  DarkRateEstimate out = dark_rates_from_trajectories(runs, cs.find(labels::kappa2_ground),
                                                      cs.find(labels::kappa2_excited), options.burst_close);
  out.kappa1 = p.kappa1;
  if (out.dwell_time > options.max_dwell_fraction * out.total_time) {
    out.valid = false;
    out.warnings.push_back("excited-subspace dwell time is not small compared with the sampled time");
  }
  if (out.n_bursts_unclosed > 0) out.warnings.push_back("some bursts were still open at the end of a trajectory");
  return out;
}

NoJumpRates no_jump_rates(const SystemParams& params, double t_end, const NoJumpOptions& options) {
  params.validate();
  if (!params.finite_anharmonicity()) throw DomainError("no-jump rates require a finite anharmonicity");
  if (!std::isfinite(t_end)) throw DomainError("t_end must be finite");

  SystemParams p = params;
  if (!options.space.include_kappa1) p.kappa1 = 0.0;
  const HilbertSpace space(options.space.enlarged ? options.space.space : HilbertSpec{1, 1});
  const Subspace sub = options.space.enlarged ? Subspace::full(space) : dark_count_subspace(space);
  const OperatorMatrix H = sub.restrict(hamiltonian_finite_A(p, space));
  CollapseSet cs = collapse_set(p, {}, space, true).restrict(sub);
  cs.scale(labels::kappa2_excited, options.excited_prefactor);
  const OperatorMatrix Hnh = nonhermitian(H, cs);
  const CMatrix CG = cs[cs.find(labels::kappa2_ground)].op.dense();
  const CMatrix CE = cs[cs.find(labels::kappa2_excited)].op.dense();
  const CMatrix MG = CG.adjoint() * CG, ME = CE.adjoint() * CE;

  Eigen::ComplexEigenSolver<CMatrix> es(Hnh.dense());
  if (es.info() != Eigen::Success) throw NumericalError("no-jump analysis: eigen-decomposition failed");
  const CMatrix V = es.eigenvectors();
  const CVector lam = es.eigenvalues();
  const Eigen::PartialPivLU<CMatrix> lu(V);
  const CVector w0 = lu.solve(sub.basis_state(Level::g, 0, 0).amplitudes);
  const int g00 = sub.index(Level::g, 0, 0);
  Eigen::Index dressed = 0;
  for (Eigen::Index j = 1; j < lam.size(); ++j) {
    if (std::norm(V(g00, j)) / V.col(j).squaredNorm() > std::norm(V(g00, dressed)) / V.col(dressed).squaredNorm()) {
      dressed = j;
    }
  }

  // State at time t, rescaled by the slowest decay so nothing underflows.
  auto state_at = [&](const CVector& w, double t) {
    double shift = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < lam.size(); ++j) {
      if (std::abs(w(j)) > 0) shift = std::max(shift, lam(j).imag() * t);
    }
    CVector z(w.size());
    for (Eigen::Index j = 0; j < w.size(); ++j) z(j) = w(j) * std::exp(-kI * lam(j) * t - shift);
    return CVector(V * z);
  };
  auto rate = [](const CVector& psi, const CMatrix& M) { return psi.dot(M * psi).real() / psi.squaredNorm(); };

  NoJumpRates out;
  out.dressed_ground_decay = -2.0 * lam(dressed).imag();
  if (t_end <= 0) {
    if (!(out.dressed_ground_decay > 0)) throw NumericalError("dressed ground state does not decay; pass t_end");
    t_end = 10.0 / out.dressed_ground_decay;
  }
  out.t_end = t_end;
  const CVector late = state_at(w0, t_end);
  const CVector early = state_at(w0, 0.1 * t_end);
  out.steady_single = rate(late, MG);
  out.steady_enhanced = rate(late, ME);
  auto drift = [](double a, double b) { return a > 0 ? std::abs(a - b) / a : (b == 0 ? 0.0 : 1.0); };
  out.single_drift = drift(out.steady_single, rate(early, MG));
  out.enhanced_drift = drift(out.steady_enhanced, rate(early, ME));
  out.converged = out.single_drift <= 0.01 && out.enhanced_drift <= 0.01;
  if (!out.converged) out.warnings.push_back("late-time rate drifts by more than 1% over the last decade");

  out.window = options.window > 0 ? options.window
                                  : 10.0 * 2.0 * M_PI / std::sqrt(p.g2 * p.g2 + p.omega * p.omega);

  // Post-single-dark-count state: C_G applied to the late-time state.
  CVector post = CG * late;
  if (!(post.norm() > 0)) {
    out.dynamical_enhanced = 0.0;
    return out;
  }
  post /= post.norm();
  const CVector w = lu.solve(post);
  const double T = out.window;
  const CMatrix GE = V.adjoint() * ME * V;
  const CMatrix G1 = V.adjoint() * V;
  Complex num{0.0, 0.0}, den{0.0, 0.0};
  for (Eigen::Index j = 0; j < lam.size(); ++j) {
    for (Eigen::Index k = 0; k < lam.size(); ++k) {
      const Complex z = kI * (std::conj(lam(j)) - lam(k));
      const Complex zt = z * T;
      const Complex e = std::abs(zt) < 1e-6 ? T * (1.0 + zt / 2.0 + zt * zt / 6.0) : (std::exp(zt) - 1.0) / z;
      const Complex c = std::conj(w(j)) * w(k) * e;
      num += c * GE(j, k);
      den += c * G1(j, k);
    }
  }
  out.dynamical_enhanced = num.real() / den.real();
  return out;
}

}  // namespace spt
