#include "spt/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <boost/math/tools/toms748_solve.hpp>

#include "spt/rng.hpp"

namespace spt {

int Trajectory::count(int channel) const {
  return static_cast<int>(std::count_if(jumps.begin(), jumps.end(), [&](const JumpRecord& j) { return j.channel == channel; }));
}

int Trajectory::count(const std::string& label) const {
  const auto it = std::find(channels.begin(), channels.end(), label);
  if (it == channels.end()) return 0;
  return count(static_cast<int>(it - channels.begin()));
}

TrajectorySimulator::TrajectorySimulator(OperatorMatrix H, CollapseSet collapses, TrajectoryOptions options)
    : dim_(H.dim()), H_(std::move(H)), collapses_(std::move(collapses)), options_(std::move(options)) {
  for (const Jump& j : collapses_.jumps()) {
    if (j.op.dim() != dim_) throw DomainError("collapse operator " + j.label + " has the wrong dimension");
    jump_ops_.push_back(j.op.sparse());
  }
  if (options_.post_jump_observable && options_.post_jump_observable->dim() != dim_) {
    throw DomainError("post-jump observable has the wrong dimension");
  }
  Hnh_ = nonhermitian(H_, collapses_);

  frozen_.assign(dim_, true);
  const SparseMatrix& s = Hnh_.sparse();
  for (int k = 0; k < s.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
      if (std::abs(it.value()) > 0) frozen_[it.col()] = false;
    }
  }

  if (options_.propagator == Propagator::runge_kutta) return;
  const CMatrix h = Hnh_.dense();
  Eigen::ComplexEigenSolver<CMatrix> es(h);
  if (es.info() == Eigen::Success) {
    V_ = es.eigenvectors();
    eigenvalues_ = es.eigenvalues();
    Eigen::JacobiSVD<CMatrix> svd(V_);
    const auto& sv = svd.singularValues();
    condition_ = sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (condition_ <= options_.max_condition) {
      V_lu_.compute(V_);
      const CMatrix rebuilt = V_ * eigenvalues_.asDiagonal() * V_lu_.inverse();
      const double scale = std::max(1.0, h.norm());
      spectral_ = (rebuilt - h).norm() <= 1e-9 * scale;
    }
  }
  if (options_.propagator == Propagator::spectral && !spectral_) {
    throw NumericalError("non-Hermitian Hamiltonian is not safely diagonalizable; use the Runge-Kutta propagator");
  }
}

struct TrajectorySimulator::Impl {
  const TrajectorySimulator& sim;
  Philox4x32 rng;
  Trajectory traj;
  CVector psi;
  double t = 0.0;
  const SinglePhotonInput* input = nullptr;
  bool pulse_active = false;

  double tolerance(double a, double b) const {
    return sim.options_.time_tolerance * std::max({std::abs(a), std::abs(b), 1e-300});
  }

  bool frozen() const {
    double outside = 0.0;
    for (int i = 0; i < sim.dim_; ++i) {
      if (!sim.frozen_[i]) outside += std::norm(psi(i));
    }
    return outside <= 1e-24 * psi.squaredNorm();
  }

  void note_drift(double d) {
    traj.final_norm_accounting = std::max(traj.final_norm_accounting, d);
    if (d > sim.options_.norm_drift_limit) {
      throw NumericalError("trajectory norm accounting drift " + std::to_string(d) + " exceeds limit");
    }
  }

  // Spectral segment: returns true if a jump time was found before the end.
  bool spectral_segment(double u) {
    const CVector w = sim.V_lu_.solve(psi);
    const double remaining = traj.duration - t;
    CVector z(w.size());
    auto evolve = [&](double s) {
      for (Eigen::Index j = 0; j < w.size(); ++j) z(j) = w(j) * std::exp(-kI * sim.eigenvalues_(j) * s);
      return CVector(sim.V_ * z);
    };
    auto log_norm = [&](double s) { return std::log(std::max(evolve(s).squaredNorm(), 1e-300)) - std::log(u); };
    note_drift(std::abs(evolve(0.0).squaredNorm() - 1.0));
    const double f_end = log_norm(remaining);
    if (f_end > 0) {
      psi = evolve(remaining);
      psi /= psi.norm();
      t = traj.duration;
      return false;
    }
    double a = 0.0, b = remaining;
    double fa = log_norm(0.0), fb = f_end;
    // Bracket from below so the root finder sees a well-scaled interval.
    double fastest = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) fastest = std::max(fastest, -2.0 * sim.eigenvalues_(j).imag());
    const double earliest = std::max(1e-300, -std::log(u) / std::max(1e-300, fastest));
    for (double s = earliest; s < remaining; s *= 2.0) {
      const double fs = log_norm(s);
      if (fs <= 0) {
        b = s;
        fb = fs;
        break;
      }
      a = s;
      fa = fs;
    }
    std::uintmax_t iters = 300;
    const auto root = boost::math::tools::toms748_solve(
        log_norm, a, b, fa, fb, [&](double x, double y) { return std::abs(y - x) <= tolerance(t + x, t + y); },
        iters);
    const double s = 0.5 * (root.first + root.second);
    psi = evolve(s);
    t += s;
    return true;
  }

  double total_norm(double time, const CVector& c) const {
    double n = c.squaredNorm();
    if (pulse_active) n += input->pulse.tail(time);
    return n;
  }

  bool rk_segment(double u) {
    const double sqk = input ? std::sqrt(input->kappa1) : 0.0;
    auto rhs = [&](double time, const CVector& y, CVector& dy) {
      dy.noalias() = sim.Hnh_.sparse() * y;
      dy *= -kI;
      if (pulse_active) dy(input->entry_index) += sqk * input->pulse.amplitude(time);
    };
    DormandPrince5 ode(rhs, sim.options_.ode);
    ode.initialize(t, psi);
    double n_old = total_norm(t, psi);
    while (ode.t() < traj.duration) {
      ode.step(traj.duration);
      const double n_new = total_norm(ode.t(), ode.y());
      note_drift(std::max(0.0, n_new - n_old));
      if (n_new <= u) {
        CVector tmp;
        auto f = [&](double s) {
          ode.interpolate(s, tmp);
          return total_norm(s, tmp) - u;
        };
        double a = ode.t_prev(), b = ode.t();
        double fa = n_old - u, fb = n_new - u;
        std::uintmax_t iters = 300;
        const auto root = boost::math::tools::toms748_solve(
            f, a, b, fa, fb, [&](double x, double y) { return std::abs(y - x) <= tolerance(x, y); }, iters);
        t = 0.5 * (root.first + root.second);
        ode.interpolate(t, psi);
        return true;
      }
      n_old = n_new;
      if (!pulse_active && frozen()) break;
    }
    psi = ode.y();
    t = traj.duration;
    psi /= psi.norm();
    return false;
  }

  void jump() {
    const std::size_t nc = sim.jump_ops_.size();
    std::vector<CVector> out(nc);
    std::vector<double> p(nc);
    double total = 0.0;
    for (std::size_t j = 0; j < nc; ++j) {
      out[j] = sim.jump_ops_[j] * psi;
      if (pulse_active && static_cast<int>(j) == input->channel) {
        out[j](input->ground_index) -= input->pulse.amplitude(t);
      }
      p[j] = out[j].squaredNorm();
      total += p[j];
    }
    if (!(total > 0)) throw NumericalError("jump requested with vanishing jump probabilities");
    const double r = rng.uniform() * total;
    std::size_t chosen = 0;
    double acc = 0.0;
    for (; chosen < nc; ++chosen) {
      acc += p[chosen];
      if (r < acc && p[chosen] > 0) break;
    }
    if (chosen == nc) {
      chosen = nc - 1;
      while (p[chosen] <= 0) --chosen;
    }
    psi = out[chosen] / std::sqrt(p[chosen]);
    pulse_active = false;
    note_drift(std::abs(psi.squaredNorm() - 1.0) > 1e-12 ? std::abs(psi.squaredNorm() - 1.0) : 0.0);
    JumpRecord rec;
    rec.time = t;
    rec.channel = static_cast<int>(chosen);
    if (sim.options_.post_jump_observable) {
      rec.post_value = psi.dot(sim.options_.post_jump_observable->sparse() * psi).real();
    }
    if (!traj.jumps.empty() && rec.time <= traj.jumps.back().time) {
      rec.time = std::nextafter(traj.jumps.back().time, traj.duration + 1.0);
    }
    traj.jumps.push_back(rec);
  }

  void run() {
    const bool use_spectral = sim.spectral_ && sim.options_.propagator != Propagator::runge_kutta;
    while (t < traj.duration) {
      if (!pulse_active && frozen()) break;
      if (static_cast<long>(traj.jumps.size()) >= sim.options_.max_jumps) {
        throw NumericalError("trajectory exceeded the maximum number of jumps");
      }
      const double u = rng.uniform();
      const bool jumped = (!pulse_active && use_spectral) ? spectral_segment(u) : rk_segment(u);
      if (!jumped) break;
      jump();
    }
    if (sim.options_.keep_final_state) traj.final_state = psi / psi.norm();
  }
};

namespace {

Trajectory make_trajectory(const TrajectorySimulator& sim, double duration, std::uint64_t seed,
                           std::uint64_t index, std::string label) {
  if (!(duration >= 0) || !std::isfinite(duration)) throw DomainError("trajectory duration must be finite and >= 0");
  Trajectory t;
  t.index = index;
  t.seed = seed;
  t.duration = duration;
  t.initial_state_label = std::move(label);
  t.channels = sim.collapses().labels();
  return t;
}

}  // namespace

Trajectory TrajectorySimulator::run(const QuantumState& initial, double duration, std::uint64_t base_seed,
                                    std::uint64_t index) const {
  if (initial.amplitudes.size() != dim_) throw DomainError("initial state has the wrong dimension");
  const double n = initial.amplitudes.norm();
  if (!(n > 0)) throw DomainError("initial state has zero norm");
  Impl impl{*this, Philox4x32(base_seed, index), make_trajectory(*this, duration, base_seed, index, initial.label),
            initial.amplitudes / n};
  impl.run();
  return std::move(impl.traj);
}

Trajectory TrajectorySimulator::run(const SinglePhotonInput& input, double duration, std::uint64_t base_seed,
                                    std::uint64_t index) const {
  input.pulse.validate();
  if (!(input.kappa1 > 0)) throw DomainError("single-photon input requires kappa1 > 0");
  if (input.entry_index < 0 || input.entry_index >= dim_ || input.ground_index < 0 || input.ground_index >= dim_) {
    throw DomainError("single-photon input indices out of range");
  }
  if (input.channel < 0 || input.channel >= static_cast<int>(jump_ops_.size())) {
    throw DomainError("single-photon input channel out of range");
  }
  if (1.0 - input.pulse.tail(0.0) > options_.norm_drift_limit) {
    throw DomainError("pulse must start after t = 0");
  }
  Impl impl{*this, Philox4x32(base_seed, index),
            make_trajectory(*this, duration, base_seed, index, "single-photon-input"), CVector::Zero(dim_)};
  impl.input = &input;
  impl.pulse_active = true;
  impl.run();
  return std::move(impl.traj);
}

namespace {

template <class Fn>
std::vector<Trajectory> parallel_runs(int n, int threads, Fn&& fn) {
  if (n < 0) throw DomainError("number of trajectories must be >= 0");
  std::vector<Trajectory> out(n);
  int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, std::max(n, 1));
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (int i = next++; i < n; i = next++) {
      try {
        out[i] = fn(static_cast<std::uint64_t>(i));
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace

std::vector<Trajectory> TrajectorySimulator::ensemble(const QuantumState& initial, double duration, int n,
                                                      std::uint64_t base_seed, int threads) const {
  return parallel_runs(n, threads, [&](std::uint64_t i) { return run(initial, duration, base_seed, i); });
}

std::vector<Trajectory> TrajectorySimulator::ensemble(const SinglePhotonInput& input, double duration, int n,
                                                      std::uint64_t base_seed, int threads) const {
  return parallel_runs(n, threads, [&](std::uint64_t i) { return run(input, duration, base_seed, i); });
}

Trajectory run_trajectory(const OperatorMatrix& H, const CollapseSet& collapses, const QuantumState& initial,
                          double duration, std::uint64_t seed, const TrajectoryOptions& options) {
  return TrajectorySimulator(H, collapses, options).run(initial, duration, seed, 0);
}

Trajectory run_trajectory(const OperatorMatrix& H, const CollapseSet& collapses, const SinglePhotonInput& input,
                          double duration, std::uint64_t seed, const TrajectoryOptions& options) {
  return TrajectorySimulator(H, collapses, options).run(input, duration, seed, 0);
}

GainStatistics gain_statistics(const SystemParams& params, const GainStatisticsOptions& options) {
  params.validate();
  options.decoherence.validate();
  if (options.n_traj < 1) throw DomainError("gain statistics need at least one trajectory");
  const HilbertSpace space(options.space);
  SystemParams p = params;
  if (options.kappa1 >= 0) {
    p.kappa1 = options.kappa1;
  } else {
    SystemParams ideal = params;
    ideal.anharmonicity = kInfiniteAnharmonicity;
    p.kappa1 = setting_rate(ideal, options.space.n2_max).value;
  }
  const OperatorMatrix H = p.finite_anharmonicity() ? hamiltonian_finite_A(p, space) : hamiltonian_ideal(p, space);
  const CollapseSet cs = collapse_set(p, options.decoherence, space);
  const TrajectorySimulator sim(H, cs, options.trajectory);

  GainStatistics out;
  out.kappa1 = p.kappa1;
  out.spectral = sim.spectral();
  out.duration = options.duration > 0 ? options.duration : 1e7;

  std::vector<Trajectory> runs;
  if (options.single_photon_input) {
    if (!(p.kappa1 > 0)) throw DomainError("single-photon input requires kappa1 > 0");
    SinglePhotonInput in;
    const double tau = options.pulse_tau_kappa1 / p.kappa1;
    in.pulse = PulseSpec::from_tau(tau, options.pulse_center_tau * tau);
    in.kappa1 = p.kappa1;
    in.entry_index = space.index(Level::g, 1, 0);
    in.ground_index = space.index(Level::g, 0, 0);
    in.channel = cs.find(labels::kappa1);
    runs = sim.ensemble(in, out.duration, options.n_traj, options.base_seed, options.threads);
  } else {
    runs = sim.ensemble(basis_state(space, Level::e, 0, 0), out.duration, options.n_traj, options.base_seed,
                        options.threads);
  }
  const int k2 = cs.find(labels::kappa2);
  out.counts.reserve(runs.size());
  std::vector<double> channel_totals(cs.size(), 0.0);
  for (const Trajectory& t : runs) {
    out.counts.push_back(k2 >= 0 ? t.count(k2) : 0);
    for (const JumpRecord& j : t.jumps) channel_totals[j.channel] += 1.0;
  }
  for (std::size_t c = 0; c < cs.size(); ++c) out.channel_means[cs[c].label] = channel_totals[c] / runs.size();
  out.statistics = count_statistics(out.counts);
  if (options.keep_trajectories) out.trajectories = std::move(runs);
  return out;
}

}  // namespace spt
