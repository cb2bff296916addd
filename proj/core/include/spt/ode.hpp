#pragma once

#include <functional>
#include <limits>

#include "spt/types.hpp"

namespace spt {

struct OdeOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  /// Initial step; 0 selects one automatically.
  double h_init = 0.0;
  double h_max = std::numeric_limits<double>::infinity();
  /// Non-zero selects fixed-step mode (no error control).
  double fixed_step = 0.0;
  long max_steps = 100'000'000;
};

/// Dormand-Prince 5(4) with FSAL and a fourth-order continuous extension.
class DormandPrince5 {
 public:
  using Rhs = std::function<void(double t, const CVector& y, CVector& dydt)>;

  explicit DormandPrince5(Rhs rhs, OdeOptions options = {});

  void initialize(double t0, const CVector& y0);
  /// Replace the state at the current time (e.g. after a quantum jump).
  void reset_state(const CVector& y);

  /// Take one accepted step that does not pass t_limit.
  void step(double t_limit);
  void integrate_to(double t_end);

  double t() const { return t_; }
  double t_prev() const { return t_prev_; }
  const CVector& y() const { return y_; }
  const CVector& y_prev() const { return y_prev_; }
  /// Dense output on [t_prev, t].
  CVector interpolate(double t) const;
  void interpolate(double t, CVector& out) const;

  long accepted_steps() const { return accepted_; }
  long rejected_steps() const { return rejected_; }
  long rhs_evaluations() const { return evaluations_; }
  const OdeOptions& options() const { return options_; }

 private:
  double initial_step(double t_limit);
  double error_norm() const;
  void attempt(double h);

  Rhs rhs_;
  OdeOptions options_;
  double t_ = 0.0, t_prev_ = 0.0, h_ = 0.0;
  CVector y_, y_prev_, y_new_, tmp_, err_;
  CVector k1_, k2_, k3_, k4_, k5_, k6_, k7_;
  CVector r1_, r2_, r3_, r4_, r5_;
  bool dense_ready_ = false;
  long accepted_ = 0, rejected_ = 0, evaluations_ = 0;
};

}  // namespace spt
