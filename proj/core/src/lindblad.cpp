#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>
#include <unsupported/Eigen/KroneckerProduct>

#include "spt/dynamics.hpp"

namespace spt {

DensityMatrix DensityMatrix::pure(const QuantumState& state) { return pure(state.amplitudes); }

DensityMatrix DensityMatrix::pure(const CVector& amplitudes) {
  return {amplitudes * amplitudes.adjoint()};
}

double DensityMatrix::purity() const { return (rho * rho).trace().real(); }

double DensityMatrix::hermiticity_defect() const { return (rho - rho.adjoint()).cwiseAbs().maxCoeff(); }

double DensityMatrix::min_eigenvalue() const {
  const CMatrix h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double DensityMatrix::expectation(const OperatorMatrix& op) const {
  const SparseMatrix& m = op.sparse();
  Complex acc{0.0, 0.0};
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) acc += it.value() * rho(it.col(), it.row());
  }
  return acc.real();
}

void DensityMatrix::validate(double trace_tol) const {
  std::ostringstream os;
  if (std::abs(trace() - 1.0) > trace_tol) os << "trace " << trace() << " deviates from 1; ";
  if (hermiticity_defect() > 1e-9) os << "Hermiticity defect " << hermiticity_defect() << "; ";
  if (min_eigenvalue() < -1e-8) os << "negative eigenvalue " << min_eigenvalue() << "; ";
  if (!os.str().empty()) throw NumericalError("invalid density matrix: " + os.str());
}

PulseSpec PulseSpec::from_tau(double tau, double center_time) {
  if (!(tau > 0)) throw DomainError("pulse width tau must be positive");
  return {0.5 / tau, center_time};
}

PulseSpec PulseSpec::from_sigma(double sigma, double center_time) {
  PulseSpec p{sigma, center_time};
  p.validate();
  return p;
}

void PulseSpec::validate() const {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw DomainError("pulse sigma must be positive");
  if (!std::isfinite(center_time)) throw DomainError("pulse center must be finite");
}

double PulseSpec::amplitude(double t) const {
  const double x = t - center_time;
  return std::pow(2.0 * sigma * sigma / M_PI, 0.25) * std::exp(-sigma * sigma * x * x);
}

double PulseSpec::intensity(double t) const {
  const double a = amplitude(t);
  return a * a;
}

double PulseSpec::tail(double t) const {
  return 0.5 * std::erfc(std::sqrt(2.0) * sigma * (t - center_time));
}

Complex gaussian_pulse(const PulseSpec& spec, double t) {
  spec.validate();
  return {spec.amplitude(t), 0.0};
}

SparseMatrix liouvillian(const OperatorMatrix& H, const CollapseSet& collapses) {
  const int d = H.dim();
  const OperatorMatrix Hnh = nonhermitian(H, collapses);
  SparseMatrix I(d, d);
  I.setIdentity();
  const SparseMatrix hn = Hnh.sparse();
  const SparseMatrix hn_conj = hn.conjugate();
  SparseMatrix L = SparseMatrix(Eigen::kroneckerProduct(I, hn)) * Complex(0.0, -1.0);
  L += SparseMatrix(Eigen::kroneckerProduct(hn_conj, I)) * Complex(0.0, 1.0);
  for (const Jump& j : collapses.jumps()) {
    const SparseMatrix c = j.op.sparse();
    const SparseMatrix cc = c.conjugate();
    L += SparseMatrix(Eigen::kroneckerProduct(cc, c));
  }
  L.prune(Complex(0.0, 0.0));
  L.makeCompressed();
  return L;
}

namespace {

// Liouvillian with row 0 replaced by the trace functional.
SparseMatrix trace_constrained(const SparseMatrix& L, int d) {
  std::vector<Eigen::Triplet<Complex>> t;
  t.reserve(L.nonZeros() + d);
  for (int k = 0; k < L.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(L, k); it; ++it) {
      if (it.row() != 0) t.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (int i = 0; i < d; ++i) t.emplace_back(0, i * d + i, 1.0);
  SparseMatrix M(L.rows(), L.cols());
  M.setFromTriplets(t.begin(), t.end());
  M.makeCompressed();
  return M;
}

struct ConstrainedSolver {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool ok = false;

  ConstrainedSolver(const SparseMatrix& L, int d) {
    const SparseMatrix M = trace_constrained(L, d);
    lu.analyzePattern(M);
    lu.factorize(M);
    ok = lu.info() == Eigen::Success;
  }
};

CMatrix unvec(const CVector& v, int d) { return Eigen::Map<const CMatrix>(v.data(), d, d); }

// Rolls rho forward until it stops changing; used when the sparse solve fails.
DensityMatrix steady_state_by_integration(const OperatorMatrix& H, const CollapseSet& collapses) {
  const int d = H.dim();
  DensityMatrix rho{CMatrix::Identity(d, d) / static_cast<double>(d)};
  LindbladOptions opt;
  opt.check_positivity = false;
  opt.ode.rtol = 1e-10;
  opt.ode.atol = 1e-13;
  double span = 10.0;
  for (int round = 0; round < 40; ++round) {
    const LindbladResult r = lindblad_propagate(H, collapses, rho, {0.0, span}, opt);
    const double change = (r.final_state.rho - rho.rho).cwiseAbs().maxCoeff();
    rho = r.final_state;
    if (change < 1e-11) return rho;
    span *= 2.0;
  }
  throw NumericalError("steady state: Liouvillian solve failed and long-time integration did not settle");
}

}  // namespace

DensityMatrix steady_state(const OperatorMatrix& H, const CollapseSet& collapses) {
  const int d = H.dim();
  const SparseMatrix L = liouvillian(H, collapses);
  ConstrainedSolver solver(L, d);
  if (solver.ok) {
    CVector b = CVector::Zero(static_cast<Eigen::Index>(d) * d);
    b(0) = 1.0;
    const CVector x = solver.lu.solve(b);
    const double residual = (L * x).norm();
    if (solver.lu.info() == Eigen::Success && x.allFinite() && residual < 1e-8) {
      DensityMatrix rho{unvec(x, d)};
      rho.rho = 0.5 * (rho.rho + rho.rho.adjoint()).eval();
      return rho;
    }
  }
  return steady_state_by_integration(H, collapses);
}

double integrated_excess(const OperatorMatrix& H, const CollapseSet& collapses, const DensityMatrix& rho0,
                         const DensityMatrix& rho_ss, const OperatorMatrix& observable) {
  const int d = H.dim();
  const SparseMatrix L = liouvillian(H, collapses);
  ConstrainedSolver solver(L, d);
  if (!solver.ok) throw NumericalError("integrated_excess: singular Liouvillian (" + solver.lu.lastErrorMessage() + ")");
  const CMatrix diff = rho_ss.rho - rho0.rho;
  CVector b = Eigen::Map<const CVector>(diff.data(), static_cast<Eigen::Index>(d) * d);
  b(0) = 0.0;
  const CVector x = solver.lu.solve(b);
  if (!x.allFinite()) throw NumericalError("integrated_excess: solve produced non-finite values");
  return DensityMatrix{unvec(x, d)}.expectation(observable);
}

namespace {

class LindbladRhs {
 public:
  LindbladRhs(const OperatorMatrix& H, const CollapseSet& collapses, const std::vector<Observable>& integrated)
      : d_(H.dim()), hnh_(nonhermitian(H, collapses).sparse() * Complex(0.0, -1.0)) {
    for (const Jump& j : collapses.jumps()) {
      if (j.op.sparse().nonZeros() == 0) continue;
      jumps_.push_back(j.op.sparse());
      jumps_adj_.push_back(SparseMatrix(j.op.sparse().adjoint()));
    }
    for (const Observable& o : integrated) integrated_.push_back(o.op.sparse());
    a_.resize(d_, d_);
  }

  void operator()(double, const CVector& y, CVector& dy) {
    const Eigen::Index dd = static_cast<Eigen::Index>(d_) * d_;
    Eigen::Map<const CMatrix> rho(y.data(), d_, d_);
    dy.resize(y.size());
    Eigen::Map<CMatrix> out(dy.data(), d_, d_);
    a_.noalias() = hnh_ * rho;
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
      tmp_.noalias() = jumps_[k] * rho;
      a_.noalias() += 0.5 * (tmp_ * jumps_adj_[k]);
    }
    out = a_ + a_.adjoint();
    for (std::size_t k = 0; k < integrated_.size(); ++k) {
      Complex acc{0.0, 0.0};
      const SparseMatrix& m = integrated_[k];
      for (int c = 0; c < m.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) acc += it.value() * rho(it.col(), it.row());
      }
      dy(dd + static_cast<Eigen::Index>(k)) = acc.real();
    }
  }

 private:
  int d_;
  SparseMatrix hnh_;
  std::vector<SparseMatrix> jumps_, jumps_adj_, integrated_;
  CMatrix a_, tmp_;
};

}  // namespace

LindbladResult lindblad_propagate(const OperatorMatrix& H, const CollapseSet& collapses,
                                  const DensityMatrix& rho0, const std::vector<double>& t_grid,
                                  const LindbladOptions& options) {
  const int d = H.dim();
  if (rho0.dim() != d) throw DomainError("initial density matrix has the wrong dimension");
  if (t_grid.size() < 2) throw DomainError("time grid needs at least two points");
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > t_grid[i - 1])) throw DomainError("time grid must be strictly increasing");
  }
  if (rho0.hermiticity_defect() > 1e-9) throw DomainError("initial density matrix is not Hermitian");

  const Eigen::Index dd = static_cast<Eigen::Index>(d) * d;
  const std::size_t m = options.integrated.size();
  LindbladRhs rhs(H, collapses, options.integrated);
  DormandPrince5 ode([&rhs](double t, const CVector& y, CVector& dy) { rhs(t, y, dy); }, options.ode);

  CVector y0 = CVector::Zero(dd + static_cast<Eigen::Index>(m));
  y0.head(dd) = Eigen::Map<const CVector>(rho0.rho.data(), dd);
  ode.initialize(t_grid.front(), y0);

  std::vector<std::string> names{"trace"};
  if (options.top_layer) names.push_back("top_layer");
  for (const Observable& o : options.observables) names.push_back(o.name);
  if (options.check_positivity) names.push_back("min_eigenvalue");

  LindbladResult res;
  res.series = TimeSeries(names);
  res.min_eigenvalue = std::numeric_limits<double>::infinity();
  const double trace0 = rho0.trace().real();
  CVector sample;

  auto record = [&](double t, const CVector& y) {
    DensityMatrix rho{Eigen::Map<const CMatrix>(y.data(), d, d)};
    std::vector<double> row;
    const double tr = rho.trace().real();
    row.push_back(tr);
    res.max_trace_error = std::max(res.max_trace_error, std::abs(tr - trace0));
    if (options.top_layer) {
      const double top = rho.expectation(*options.top_layer);
      res.max_top_layer = std::max(res.max_top_layer, top);
      row.push_back(top);
    }
    for (const Observable& o : options.observables) row.push_back(rho.expectation(o.op));
    if (options.check_positivity) {
      const double mev = rho.min_eigenvalue();
      res.min_eigenvalue = std::min(res.min_eigenvalue, mev);
      row.push_back(mev);
    }
    res.series.push(t, row);
  };

  record(t_grid.front(), y0);
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    while (ode.t() < t_grid[i]) ode.step(t_grid.back());
    ode.interpolate(t_grid[i], sample);
    record(t_grid[i], sample);
  }
  const CVector& yf = ode.y();
  res.final_state.rho = Eigen::Map<const CMatrix>(yf.data(), d, d);
  for (std::size_t k = 0; k < m; ++k) res.integrals.push_back(yf(dd + static_cast<Eigen::Index>(k)).real());
  res.steps = ode.accepted_steps();

  if (options.top_layer && res.max_top_layer > options.top_layer_warning) {
    std::ostringstream os;
    os << "truncation warning: top Fock layer population " << res.max_top_layer << " exceeds "
       << options.top_layer_warning;
    res.warnings.push_back(os.str());
  }
  if (!options.check_positivity) res.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  return res;
}

}  // namespace spt
