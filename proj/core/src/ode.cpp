#include "spt/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spt {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                 a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

}  // namespace

DormandPrince5::DormandPrince5(Rhs rhs, OdeOptions options) : rhs_(std::move(rhs)), options_(options) {
  if (!(options_.rtol > 0) || !(options_.atol >= 0)) throw DomainError("ODE tolerances must be positive");
  if (options_.fixed_step < 0) throw DomainError("fixed step must be non-negative");
}

void DormandPrince5::initialize(double t0, const CVector& y0) {
  t_ = t_prev_ = t0;
  y_ = y0;
  y_prev_ = y0;
  const Eigen::Index n = y0.size();
  for (CVector* v : {&y_new_, &tmp_, &err_, &k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_}) v->resize(n);
  rhs_(t_, y_, k1_);
  ++evaluations_;
  h_ = 0.0;
  dense_ready_ = false;
}

void DormandPrince5::reset_state(const CVector& y) {
  y_ = y;
  y_prev_ = y;
  t_prev_ = t_;
  rhs_(t_, y_, k1_);
  ++evaluations_;
  dense_ready_ = false;
}

double DormandPrince5::initial_step(double t_limit) {
  const double span = std::abs(t_limit - t_);
  if (options_.h_init > 0) return std::min(options_.h_init, span);
  const Eigen::ArrayXd scale = options_.atol + options_.rtol * y_.array().abs();
  const double d0 = std::sqrt((y_.array().abs() / scale).square().mean());
  const double d1n = std::sqrt((k1_.array().abs() / scale).square().mean());
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, span);
  tmp_ = y_ + h0 * k1_;
  rhs_(t_ + h0, tmp_, k2_);
  ++evaluations_;
  const double d2 = std::sqrt(((k2_ - k1_).array().abs() / scale).square().mean()) / h0;
  const double m = std::max(d1n, d2);
  const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 1.0 / 5.0);
  return std::min({100.0 * h0, h1, span, options_.h_max});
}

void DormandPrince5::attempt(double h) {
  tmp_ = y_ + h * a21 * k1_;
  rhs_(t_ + c2 * h, tmp_, k2_);
  tmp_ = y_ + h * (a31 * k1_ + a32 * k2_);
  rhs_(t_ + c3 * h, tmp_, k3_);
  tmp_ = y_ + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
  rhs_(t_ + c4 * h, tmp_, k4_);
  tmp_ = y_ + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
  rhs_(t_ + c5 * h, tmp_, k5_);
  tmp_ = y_ + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
  rhs_(t_ + h, tmp_, k6_);
  y_new_ = y_ + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
  rhs_(t_ + h, y_new_, k7_);
  evaluations_ += 6;
  err_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
}

double DormandPrince5::error_norm() const {
  const Eigen::ArrayXd scale =
      options_.atol + options_.rtol * y_.array().abs().max(y_new_.array().abs());
  return std::sqrt((err_.array().abs() / scale).square().mean());
}

void DormandPrince5::step(double t_limit) {
  if (t_limit <= t_) throw DomainError("step limit must lie ahead of the current time");
  double h = 0.0;
  if (options_.fixed_step > 0) {
    // Absorb round-off in the accumulated time so a grid of n steps stays n steps.
    const double remaining = t_limit - t_;
    h = remaining < options_.fixed_step * (1.0 + 1e-9) ? remaining : options_.fixed_step;
    attempt(h);
  } else {
    if (h_ <= 0) h_ = initial_step(t_limit);
    long tries = 0;
    while (true) {
      h = std::min({h_, t_limit - t_, options_.h_max});
      if (h <= 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_))) {
        std::ostringstream os;
        os << "integrator step size underflow at t=" << t_;
        throw NumericalError(os.str());
      }
      attempt(h);
      const double err = error_norm();
      if (err <= 1.0) {
        const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A step shortened by t_limit does not shrink the nominal step.
        h_ = h < h_ ? std::max(h_, h * fac) : h * fac;
        break;
      }
      h_ = std::isfinite(err) ? h * std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25 * h;
      ++rejected_;
      if (++tries > 1000) throw NumericalError("integrator failed to satisfy tolerance");
    }
  }
  if (++accepted_ > options_.max_steps) throw NumericalError("integrator exceeded the maximum step count");

  r1_ = y_;
  r2_ = y_new_ - y_;
  r3_ = h * k1_ - r2_;
  r4_ = r2_ - h * k7_ - r3_;
  r5_ = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
  t_prev_ = t_;
  y_prev_.swap(y_);
  y_.swap(y_new_);
  k1_.swap(k7_);
  t_ = t_prev_ + h;
  if (t_limit - t_ <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_limit))) {
    t_ = t_limit;
  }
  dense_ready_ = true;
}

void DormandPrince5::integrate_to(double t_end) {
  while (t_ < t_end) step(t_end);
}

void DormandPrince5::interpolate(double t, CVector& out) const {
  if (!dense_ready_ || t == t_) {
    out = y_;
    return;
  }
  const double h = t_ - t_prev_;
  const double th = (t - t_prev_) / h;
  const double th1 = 1.0 - th;
  out = r1_ + th * (r2_ + th1 * (r3_ + th * (r4_ + th1 * r5_)));
}

CVector DormandPrince5::interpolate(double t) const {
  CVector out;
  interpolate(t, out);
  return out;
}

}  // namespace spt
