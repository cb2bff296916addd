#include <cmath>
#include <sstream>

#include "spt/dynamics.hpp"
#include "spt/effective.hpp"

namespace spt {

namespace {

OperatorMatrix drive_term(const HilbertSpace& space, double amp) {
  const OperatorMatrix a1 = annihilation(space, Cavity::one);
  return (a1 + a1.adjoint()) * Complex(amp);
}

}  // namespace

ReflectionResult steady_state_reflection(const SystemParams& params, double drive_amp,
                                         const ReflectionOptions& options) {
  params.validate();
  if (!(params.kappa1 > 0)) throw DomainError("reflection requires kappa1 > 0");
  const HilbertSpace space(options.space);
  const OperatorMatrix H0 = hamiltonian_ideal(params, space);
  const CollapseSet cs = collapse_set(params, options.decoherence, space);
  const OperatorMatrix a1 = annihilation(space, Cavity::one);
  const OperatorMatrix n1 = number_op(space, Cavity::one);
  const int g00 = space.index(Level::g, 0, 0);
  const double sk1 = std::sqrt(params.kappa1);

  double eps = drive_amp > 0 ? drive_amp : 1e-4 * sk1;
  for (int attempt = 0; attempt < 12; ++attempt, eps *= 0.1) {
    const DensityMatrix rho = steady_state(H0 + drive_term(space, eps), cs);
    ReflectionResult r;
    r.drive_amp = eps;
    r.mean_n1 = rho.expectation(n1);
    r.ground_population = rho.rho(g00, g00).real();
    if (r.mean_n1 >= options.max_mean_n1 || r.ground_population <= options.min_ground_population) continue;
    // H_drive = eps (a1 + a1^dagger) corresponds to the input amplitude -i eps / sqrt(kappa1).
    Complex a_mean{0.0, 0.0};
    const SparseMatrix& m = a1.sparse();
    for (int k = 0; k < m.outerSize(); ++k) {
      for (SparseMatrix::InnerIterator it(m, k); it; ++it) a_mean += it.value() * rho.rho(it.col(), it.row());
    }
    const Complex a_in = Complex(0.0, -eps / sk1);
    r.amplitude = (-a_in + sk1 * a_mean) / a_in;
    r.reflectance = std::norm(r.amplitude);
    return r;
  }
  throw NumericalError("steady_state_reflection: could not reach the weak-drive regime");
}

namespace {

class PulseRhs {
 public:
  PulseRhs(const OperatorMatrix& H, const CollapseSet& cs, const HilbertSpace& space, const PulseSpec& pulse,
           double kappa1, double kappa2)
      : d_(H.dim()),
        pulse_(pulse),
        sk1_(std::sqrt(kappa1)),
        kappa2_(kappa2),
        g00_(space.index(Level::g, 0, 0)),
        g10_(space.index(Level::g, 1, 0)),
        hnh_(nonhermitian(H, cs).sparse() * Complex(0.0, -1.0)),
        a1_(annihilation(space, Cavity::one).sparse() * Complex(sk1_)),
        n2_(number_op(space, Cavity::two)) {
    for (const Jump& j : cs.jumps()) {
      if (j.op.sparse().nonZeros() == 0) continue;
      jumps_.push_back(j.op.sparse());
      jumps_adj_.push_back(SparseMatrix(j.op.sparse().adjoint()));
    }
  }

  int phi_offset() const { return 0; }
  Eigen::Index rho_offset() const { return d_; }
  Eigen::Index gain_index() const { return d_ + static_cast<Eigen::Index>(d_) * d_; }
  Eigen::Index refl_index() const { return gain_index() + 1; }
  Eigen::Index size() const { return refl_index() + 1; }

  double reflected_intensity(double t, const CVector& y) const {
    return std::norm(Complex(pulse_.amplitude(t)) - sk1_ * y(g10_));
  }

  void operator()(double t, const CVector& y, CVector& dy) {
    dy.resize(y.size());
    const double al = pulse_.amplitude(t);
    const auto phi = y.head(d_);
    dy.head(d_).noalias() = hnh_ * phi;
    dy(g10_) += sk1_ * al;

    Eigen::Map<const CMatrix> rho(y.data() + d_, d_, d_);
    Eigen::Map<CMatrix> out(dy.data() + d_, d_, d_);
    a_.noalias() = hnh_ * rho;
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      tmp_.noalias() = jumps_[k] * rho;
      a_.noalias() += 0.5 * (tmp_ * jumps_adj_[k]);
    }
    // Source -alpha (L phi <g00| - sqrt(k1) phi <g10|) + h.c., split in halves.
    lphi_.noalias() = a1_ * phi;
    a_.col(g00_) -= al * lphi_;
    a_.col(g10_) += (al * sk1_) * phi;
    out = a_ + a_.adjoint();

    Complex n2{0.0, 0.0};
    const SparseMatrix& m = n2_.sparse();
    for (int c = 0; c < m.outerSize(); ++c) {
      for (SparseMatrix::InnerIterator it(m, c); it; ++it) n2 += it.value() * rho(it.col(), it.row());
    }
    dy(gain_index()) = kappa2_ * n2.real();
    dy(refl_index()) = std::norm(Complex(al) - sk1_ * y(g10_));
  }

 private:
  int d_;
  PulseSpec pulse_;
  double sk1_, kappa2_;
  int g00_, g10_;
  SparseMatrix hnh_, a1_;
  OperatorMatrix n2_;
  std::vector<SparseMatrix> jumps_, jumps_adj_;
  CMatrix a_, tmp_;
  CVector lphi_;
};

}  // namespace

PulseResponse single_photon_response(const SystemParams& params, const PulseSpec& pulse,
                                     const std::vector<double>& t_grid, const PulseResponseOptions& options) {
  params.validate();
  pulse.validate();
  if (!(params.kappa1 > 0)) throw DomainError("single_photon_response requires kappa1 > 0");
  if (t_grid.size() < 2) throw DomainError("time grid needs at least two points");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("time grid must be strictly increasing");
  }
  PulseResponse res;
  if (pulse.tau() * params.kappa1 <= 1.0) {
    res.warnings.push_back("pulse shorter than 1/kappa1: absorption will be incomplete");
  }
  if (1.0 - pulse.tail(t_grid.front()) > 1e-6) {
    res.warnings.push_back("grid starts after the pulse has begun; earlier input is ignored");
  }

  const HilbertSpace space(options.space);
  const int d = space.dim();
  const OperatorMatrix H = hamiltonian_ideal(params, space);
  const CollapseSet cs = collapse_set(params, options.decoherence, space);
  PulseRhs rhs(H, cs, space, pulse, params.kappa1, params.kappa2);
  DormandPrince5 ode([&rhs](double t, const CVector& y, CVector& dy) { rhs(t, y, dy); }, options.ode);

  const int g00 = space.index(Level::g, 0, 0);
  CVector y0 = CVector::Zero(rhs.size());
  y0(rhs.rho_offset() + static_cast<Eigen::Index>(g00) * d + g00) = 1.0;
  ode.initialize(t_grid.front(), y0);

  const OperatorMatrix n2 = number_op(space, Cavity::two);
  const OperatorMatrix top = top_layer_projector(space, Cavity::two);
  res.series = TimeSeries({"I_in1", "I_out2", "I_refl1", "ground_population", "top_layer"});
  double max_top = 0.0;
  CVector sample;
  auto record = [&](double t, const CVector& y) {
    DensityMatrix rho{Eigen::Map<const CMatrix>(y.data() + d, d, d)};
    const double drift = std::abs(rho.trace().real() - 1.0);
    res.max_norm_drift = std::max(res.max_norm_drift, drift);
    if (drift > options.max_norm_drift) {
      std::ostringstream os;
      os << "single_photon_response: normalization drift " << drift << " at t=" << t;
      throw NumericalError(os.str());
    }
    const double tl = rho.expectation(top);
    max_top = std::max(max_top, tl);
    res.series.push(t, {pulse.intensity(t), params.kappa2 * rho.expectation(n2), rhs.reflected_intensity(t, y),
                        rho.rho(g00, g00).real(), tl});
  };
  record(t_grid.front(), y0);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    while (ode.t() < t_grid[i]) ode.step(t_grid.back());
    ode.interpolate(t_grid[i], sample);
    record(t_grid[i], sample);
  }
  const CVector& yf = ode.y();
  res.gain_in_window = yf(rhs.gain_index()).real();
  res.reflected_fraction = yf(rhs.refl_index()).real();
  res.input_norm = pulse.tail(t_grid.front()) - pulse.tail(t_grid.back());
  res.absorbed_fraction = res.input_norm - res.reflected_fraction;

  const double phi_left = yf.head(d).squaredNorm();
  if (phi_left > 1e-6 || pulse.tail(t_grid.back()) > 1e-6) {
    res.warnings.push_back("input pulse not finished at the end of the grid; tail estimate is approximate");
  }
  if (options.resolvent_tail) {
    DensityMatrix rho_end{Eigen::Map<const CMatrix>(yf.data() + d, d, d)};
    const DensityMatrix ground = DensityMatrix::pure(basis_state(space, Level::g, 0, 0));
    res.gain_tail = params.kappa2 * integrated_excess(H, cs, rho_end, ground, n2);
  }
  res.gain = res.gain_in_window + res.gain_tail;
  if (max_top > 1e-3) {
    std::ostringstream os;
    os << "truncation warning: top Fock layer population " << max_top << " exceeds 1e-3";
    res.warnings.push_back(os.str());
  }
  return res;
}

GainResult gain_and_bandwidth(const SystemParams& params, const GainOptions& options) {
  params.validate();
  GainResult res;
  const RateResult gset = setting_rate(params, std::max(1, options.space.n2_max));
  res.bandwidth = gset.value;
  res.kappa1 = options.kappa1 >= 0 ? options.kappa1 : gset.value;
  for (const auto& w : gset.warnings) res.warnings.push_back(w);

  SystemParams p = params;
  p.kappa1 = res.kappa1;
  const HilbertSpace space(options.space);
  const OperatorMatrix H = hamiltonian_ideal(p, space);
  const CollapseSet cs = collapse_set(p, options.decoherence, space);
  const OperatorMatrix n2 = number_op(space, Cavity::two);
  const DensityMatrix rho0 = DensityMatrix::pure(basis_state(space, Level::e, 0, 0));
  const int g00 = space.index(Level::g, 0, 0);

  if (options.method == GainMethod::resolvent) {
    const DensityMatrix ground = DensityMatrix::pure(basis_state(space, Level::g, 0, 0));
    const DensityMatrix ss = steady_state(H, cs);
    res.gain = p.kappa2 * integrated_excess(H, cs, rho0, ss, n2);
    res.duration = std::numeric_limits<double>::infinity();
    (void)ground;
    return res;
  }

  LindbladOptions lo;
  lo.ode.rtol = options.rtol;
  lo.ode.atol = options.rtol * 1e-3;
  lo.integrated.push_back({"n2", n2});
  lo.top_layer = top_layer_projector(space, Cavity::two);
  lo.check_positivity = false;

  DensityMatrix rho = rho0;
  double t = 0.0, chunk = 50.0 / std::max(p.kappa2, 1e-3);
  while (true) {
    const LindbladResult r = lindblad_propagate(H, cs, rho, {t, t + chunk}, lo);
    res.gain += p.kappa2 * r.integrals[0];
    res.max_top_layer = std::max(res.max_top_layer, r.max_top_layer);
    rho = r.final_state;
    t += chunk;
    const double excited = 1.0 - rho.rho(g00, g00).real();
    if (excited < options.settle) break;
    if (t >= options.t_max) {
      res.warnings.push_back("gain propagation reached t_max before settling");
      break;
    }
    chunk = std::min(2.0 * chunk, options.t_max - t);
  }
  res.duration = t;
  if (res.max_top_layer > 1e-3) {
    std::ostringstream os;
    os << "truncation warning: top Fock layer population " << res.max_top_layer << " exceeds 1e-3";
    res.warnings.push_back(os.str());
  }
  return res;
}

}  // namespace spt
