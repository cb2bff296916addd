#include "spt/effective.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/LU>

namespace spt {

std::string to_string(RateMethod method) {
  switch (method) {
    case RateMethod::numeric_inversion: return "numeric_inversion";
    case RateMethod::analytic_N1: return "analytic_N1";
    case RateMethod::analytic_N2: return "analytic_N2";
    case RateMethod::analytic_N3: return "analytic_N3";
    case RateMethod::asymptotic: return "asymptotic";
  }
  return "unknown";
}

double EffectiveJump::rate(int source) const { return matrix.col(source).squaredNorm(); }

double EffectiveJump::rate(int target, int source) const { return std::norm(matrix(target, source)); }

EffectiveJump effective_jump(const CMatrix& C, const CMatrix& H_NH, const CMatrix& V_plus,
                             std::vector<std::string> source_labels,
                             std::vector<std::string> target_labels) {
  if (H_NH.rows() != H_NH.cols()) throw DomainError("H_NH must be square");
  if (C.cols() != H_NH.rows() || V_plus.rows() != H_NH.rows()) {
    throw DomainError("effective_jump: inconsistent block dimensions");
  }
  EffectiveJump out;
  out.source_labels = std::move(source_labels);
  out.target_labels = std::move(target_labels);
  if (C.size() == 0 || C.isZero(0.0) || V_plus.isZero(0.0)) {
    out.matrix = CMatrix::Zero(C.rows(), V_plus.cols());
    out.rcond = 1.0;
    return out;
  }
  Eigen::PartialPivLU<CMatrix> lu(H_NH);
  out.rcond = lu.rcond();
  if (!(out.rcond > 1e3 * std::numeric_limits<double>::epsilon())) {
    std::ostringstream os;
    os << "effective_jump: non-Hermitian block is singular (rcond=" << out.rcond << ")";
    throw NumericalError(os.str());
  }
  const CMatrix X = lu.solve(V_plus);
  out.residual = (H_NH * X - V_plus).norm() / V_plus.norm();
  if (!(out.residual < 1e-10)) {
    std::ostringstream os;
    os << "effective_jump: solve residual " << out.residual << " exceeds 1e-10";
    throw NumericalError(os.str());
  }
  out.matrix = C * X;
  return out;
}

namespace {

CMatrix block(const OperatorMatrix& op, const std::vector<int>& rows, const std::vector<int>& cols) {
  const CMatrix d = op.dense();
  CMatrix out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = d(rows[i], cols[j]);
  }
  return out;
}

double setting_rate_value(const SystemParams& params, int n2_trunc) {
  const HilbertSpace space({1, n2_trunc});
  SystemParams p = params;
  p.anharmonicity = kInfiniteAnharmonicity;
  const OperatorMatrix H = hamiltonian_ideal(p, space);
  CollapseSet cs;
  cs.add(labels::kappa2, annihilation(space, Cavity::two) * Complex(std::sqrt(p.kappa2)));
  const OperatorMatrix Hnh = nonhermitian(H, cs);

  std::vector<int> excited;
  std::vector<std::string> target_labels;
  for (int n = 0; n <= n2_trunc; ++n) {
    for (Level m : {Level::e, Level::f}) {
      excited.push_back(space.index(m, 0, n));
      target_labels.push_back(space.label(excited.back()));
    }
  }
  const std::vector<int> source{space.index(Level::g, 1, 0)};
  const EffectiveJump L = effective_jump(block(cs[0].op, excited, excited), block(Hnh, excited, excited),
                                         block(H, excited, source), {space.label(source[0])},
                                         target_labels);
  return L.rate(0);
}

}  // namespace

RateResult setting_rate(const SystemParams& params, int n2_trunc) {
  if (n2_trunc < 1) throw DomainError("setting_rate requires n2_trunc >= 1");
  params.validate();
  RateResult r;
  r.method = RateMethod::numeric_inversion;
  r.truncation = n2_trunc;
  r.value = setting_rate_value(params, n2_trunc);
  if (n2_trunc >= 2) r.convergence_delta = r.value - setting_rate_value(params, n2_trunc - 1);
  if (params.g1 > 0.2 * std::min(params.g2, params.omega)) {
    r.warnings.push_back("g1 exceeds 0.2*min(g2, omega); effective-operator rate is not perturbative");
  }
  if (!params.zero_detunings()) r.warnings.push_back("non-zero detunings: closed forms do not apply");
  return r;
}

double setting_rate_f(double g2, double kappa2, double omega) {
  const double g22 = g2 * g2, k2 = kappa2 * kappa2, o2 = omega * omega;
  return 36.0 * k2 * (8.0 * g22 * g22 + 6.0 * g22 * k2 + k2 * k2) + k2 * o2 * (88.0 * g22 + 49.0 * k2) +
         14.0 * k2 * o2 * o2 + o2 * o2 * o2;
}

RateResult setting_rate_analytic(const SystemParams& params, int order, ClosedForm form) {
  params.validate();
  if (order < 1 || order > 3) throw DomainError("closed-form setting rate order must be 1, 2 or 3");
  if (!(params.omega > 0)) throw DomainError("closed-form setting rates diverge at omega = 0");
  const double g1 = params.g1, g2 = params.g2, k = params.kappa2, o = params.omega;
  const double g12 = g1 * g1, g22 = g2 * g2, k2 = k * k, o2 = o * o;
  RateResult r;
  r.truncation = order;
  r.variant = form == ClosedForm::exact ? "exact" : "printed";
  switch (order) {
    case 1:
      r.method = RateMethod::analytic_N1;
      r.value = 16.0 * g12 * g22 * k / (k2 * o2 + o2 * o2);
      break;
    case 2:
      r.method = RateMethod::analytic_N2;
      r.value = 16.0 * g12 * g22 * k * (16.0 * g22 + 4.0 * k2 + o2) /
                (4.0 * k2 * o2 * (4.0 * g22 + k2) + 5.0 * k2 * o2 * o2 + o2 * o2 * o2);
      break;
    default: {
      if (!(k > 0)) throw DomainError("three-photon closed form requires kappa2 > 0");
      r.method = RateMethod::analytic_N3;
      const double f = setting_rate_f(g2, k, o);
      double bracket = 1.0 / o2 - (72.0 * g22 * k2 + 36.0 * k2 * k2 + 13.0 * k2 * o2 + o2 * o2) / f;
      if (form == ClosedForm::printed) bracket -= 96.0 * g22 * g22 * k2 * o2 * o2 / (f * f);
      r.value = 16.0 * g12 * g22 / k * bracket;
      break;
    }
  }
  return r;
}

double reflection_analytic(double gamma_set, double kappa1) {
  if (!(gamma_set >= 0) || !(kappa1 >= 0)) throw DomainError("rates must be non-negative");
  if (gamma_set == 0 && kappa1 == 0) throw DomainError("reflection undefined for zero rates");
  const double d = (gamma_set - kappa1) / (gamma_set + kappa1);
  return d * d;
}

Subspace dark_count_subspace(const HilbertSpace& space) {
  return Subspace(space, {{Level::g, 0, 0}, {Level::e, 0, 0}, {Level::g, 0, 1}, {Level::e, 0, 1},
                          {Level::f, 0, 0}, {Level::f, 0, 1}, {Level::g, 1, 0}});
}

namespace {

struct DarkBlocks {
  CMatrix H_E;       // eliminated-space non-Hermitian Hamiltonian
  CMatrix V_plus;    // g00 -> eliminated space
  CMatrix C_G;       // rows: ground targets, cols: eliminated
  CMatrix C_E;       // rows: excited targets, cols: eliminated
  std::vector<std::string> labels;
  std::vector<std::string> excited_targets;
};

DarkBlocks dark_blocks(const SystemParams& params, const DarkSpaceOptions& options) {
  const HilbertSpace space(options.enlarged ? options.space : HilbertSpec{1, 1});
  const Subspace sub = options.enlarged ? Subspace::full(space) : dark_count_subspace(space);
  SystemParams p = params;
  if (!options.include_kappa1) p.kappa1 = 0.0;
  const OperatorMatrix H = sub.restrict(hamiltonian_finite_A(p, space));
  const CollapseSet cs = collapse_set(p, {}, space, true).restrict(sub);
  const OperatorMatrix Hnh = nonhermitian(H, cs);

  const int g00 = sub.index(Level::g, 0, 0);
  std::vector<int> elim;
  DarkBlocks b;
  for (int i = 0; i < sub.dim(); ++i) {
    if (i == g00) continue;
    elim.push_back(i);
    b.labels.push_back(sub.label(i));
  }
  const CMatrix hd = Hnh.dense();
  const CMatrix hs = H.dense();
  const CMatrix cg = cs[cs.find(labels::kappa2_ground)].op.dense();
  const CMatrix ce = cs[cs.find(labels::kappa2_excited)].op.dense();
  const int n = static_cast<int>(elim.size());
  b.H_E.resize(n, n);
  b.V_plus.resize(n, 1);
  b.C_G.resize(1, n);
  for (int i = 0; i < n; ++i) {
    b.V_plus(i, 0) = hs(elim[i], g00);
    b.C_G(0, i) = cg(g00, elim[i]);
    for (int j = 0; j < n; ++j) b.H_E(i, j) = hd(elim[i], elim[j]);
  }
  std::vector<int> targets;
  for (Level m : {Level::e, Level::f}) {
    const int t = sub.find({m, 0, 0});
    if (t >= 0) {
      targets.push_back(t);
      b.excited_targets.push_back(sub.label(t));
    }
  }
  b.C_E.resize(targets.size(), n);
  for (std::size_t t = 0; t < targets.size(); ++t) {
    for (int j = 0; j < n; ++j) b.C_E(t, j) = ce(targets[t], elim[j]);
  }
  return b;
}

// Fixed point of lambda = V^dagger (lambda - H_E)^{-1} V: the complex energy
// of the dressed ground state.
Complex ground_energy(const DarkBlocks& b) {
  const int n = static_cast<int>(b.H_E.rows());
  const CMatrix I = CMatrix::Identity(n, n);
  Complex lambda{0.0, 0.0};
  for (int it = 0; it < 200; ++it) {
    const CVector x = (I * lambda - b.H_E).partialPivLu().solve(b.V_plus.col(0));
    const Complex next = (b.V_plus.col(0).adjoint() * x)(0, 0);
    if (std::abs(next - lambda) <= 1e-15 * std::max(1.0, std::abs(next))) return next;
    lambda = next;
  }
  throw NumericalError("light-shifted ground energy did not converge");
}

}  // namespace

DarkRates dark_rates_steady(const SystemParams& params, const DarkSpaceOptions& options) {
  params.validate();
  if (!params.finite_anharmonicity()) throw DomainError("dark rates require a finite anharmonicity A > 0");
  const DarkBlocks b = dark_blocks(params, options);
  const int n = static_cast<int>(b.H_E.rows());
  const int trunc = options.enlarged ? options.space.n2_max : 1;

  DarkRates out;
  out.ground_energy = ground_energy(b);
  const CMatrix shifted = b.H_E - out.ground_energy * CMatrix::Identity(n, n);

  auto make = [&](double value, const std::string& variant) {
    RateResult r;
    r.value = value;
    r.method = RateMethod::numeric_inversion;
    r.truncation = trunc;
    r.variant = variant;
    return r;
  };
  const EffectiveJump LG = effective_jump(b.C_G, shifted, b.V_plus, {"|g,0,0>"}, {"|g,0,0>"});
  const EffectiveJump LE = effective_jump(b.C_E, shifted, b.V_plus, {"|g,0,0>"}, b.excited_targets);
  const EffectiveJump LG0 = effective_jump(b.C_G, b.H_E, b.V_plus, {"|g,0,0>"}, {"|g,0,0>"});
  const EffectiveJump LE0 = effective_jump(b.C_E, b.H_E, b.V_plus, {"|g,0,0>"}, b.excited_targets);
  out.single = make(LG.rate(0), "light-shifted");
  out.enhanced = make(LE.rate(0), "light-shifted");
  out.single_bare = make(LG0.rate(0), "bare");
  out.enhanced_bare = make(LE0.rate(0), "bare");

  const double g22 = params.g2 * params.g2, o2 = params.omega * params.omega;
  const double A = params.anharmonicity, k = params.kappa2;
  auto asym = [&](double value, const std::string& variant) {
    RateResult r;
    r.value = value;
    r.method = RateMethod::asymptotic;
    r.truncation = 1;
    r.variant = variant;
    return r;
  };
  out.single_asymptotic = asym(g22 * o2 / (4.0 * A * A * k), "A^-2");
  out.single_asymptotic_alt = asym(k * g22 * o2 / (4.0 * (A * A * k * k + g22 * g22)), "main-text");
  out.enhanced_asymptotic = asym(g22 * o2 * o2 / (32.0 * std::pow(A, 4) * k), "A^-4");
  return out;
}

DynamicalDarkCorrection dynamical_dark_correction(const SystemParams& params) {
  params.validate();
  if (!params.finite_anharmonicity()) throw DomainError("dynamical correction requires a finite A > 0");
  if (!(params.kappa2 > 0)) throw DomainError("dynamical correction requires kappa2 > 0");
  const double g22 = params.g2 * params.g2, o4 = std::pow(params.omega, 4);
  const double steady = g22 * o4 / (32.0 * std::pow(params.anharmonicity, 4) * params.kappa2);
  DynamicalDarkCorrection d;
  d.correction.value = steady;
  d.correction.method = RateMethod::asymptotic;
  d.correction.variant = "dressed-ground admixture";
  d.total = d.correction;
  d.total.value = 2.0 * steady;
  d.total.variant = "steady + dynamical";
  d.eta_fit = d.correction;
  d.eta_fit.value = kDarkEtaFit * steady;
  d.eta_fit.variant = "eta fit";
  return d;
}

}  // namespace spt
