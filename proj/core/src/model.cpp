#include "spt/model.hpp"

#include <algorithm>

namespace spt {

bool SystemParams::zero_detunings() const {
  return delta_e == 0 && delta_f == 0 && delta_cav1 == 0 && delta_cav2 == 0 && Delta == 0 &&
         delta1 == 0 && delta2 == 0;
}

void SystemParams::validate() const {
  const double values[] = {g1, g2, omega, kappa1, kappa2, delta_e, delta_f, delta_cav1,
                           delta_cav2, Delta, delta1, delta2, residual_ratio};
  for (double v : values) {
    if (std::isnan(v) || std::isinf(v)) throw DomainError("system parameters must be finite numbers");
  }
  if (g1 < 0 || g2 < 0 || kappa1 < 0 || kappa2 < 0) {
    throw DomainError("couplings and decay rates must be non-negative");
  }
  if (omega < 0) throw DomainError("drive strength must be non-negative");
  if (std::isnan(anharmonicity)) throw DomainError("anharmonicity is NaN");
  if (finite_anharmonicity() && anharmonicity <= 0) {
    throw DomainError("finite anharmonicity must be positive");
  }
  if (std::isinf(anharmonicity) && anharmonicity < 0) throw DomainError("anharmonicity must be positive");
  if (residual_ratio <= 0) throw DomainError("residual coupling ratio must be positive");
}

DecoherenceParams DecoherenceParams::radiative(double gamma) { return {gamma, 2.0 * gamma, 0.0, 0.0}; }

DecoherenceParams DecoherenceParams::dephasing(double gamma_p) { return {0.0, 0.0, gamma_p, 2.0 * gamma_p}; }

void DecoherenceParams::validate() const {
  for (double v : {gamma_eg, gamma_fe, gamma_p_ee, gamma_p_ff}) {
    if (!(v >= 0) || std::isinf(v)) throw DomainError("decoherence rates must be finite and non-negative");
  }
}

void CollapseSet::add(std::string label, OperatorMatrix op) {
  jumps_.push_back({std::move(label), std::move(op)});
}

int CollapseSet::find(const std::string& label) const {
  for (std::size_t i = 0; i < jumps_.size(); ++i) {
    if (jumps_[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

std::vector<std::string> CollapseSet::labels() const {
  std::vector<std::string> out;
  for (const Jump& j : jumps_) out.push_back(j.label);
  return out;
}

OperatorMatrix CollapseSet::decay_operator(int dim) const {
  SparseMatrix acc(dim, dim);
  for (const Jump& j : jumps_) acc += SparseMatrix(j.op.sparse().adjoint() * j.op.sparse());
  return OperatorMatrix(acc.pruned(), false);
}

CollapseSet CollapseSet::restrict(const Subspace& sub) const {
  CollapseSet out;
  for (const Jump& j : jumps_) out.add(j.label, sub.restrict(j.op));
  return out;
}

void CollapseSet::scale(const std::string& label, double factor) {
  const int i = find(label);
  if (i < 0) throw DomainError("no collapse operator labelled " + label);
  jumps_[i].op = jumps_[i].op * Complex(factor, 0.0);
}

namespace {

OperatorMatrix hermitian_pair(const OperatorMatrix& lowering, double coefficient) {
  return (lowering + lowering.adjoint()) * Complex(coefficient, 0.0);
}

OperatorMatrix resonant_couplings(const SystemParams& p, const HilbertSpace& space) {
  const OperatorMatrix a1 = annihilation(space, Cavity::one);
  const OperatorMatrix a2 = annihilation(space, Cavity::two);
  const OperatorMatrix s_eg = qutrit_op(space, Level::e, Level::g);
  const OperatorMatrix s_fe = qutrit_op(space, Level::f, Level::e);
  OperatorMatrix h = hermitian_pair(a1.adjoint() * s_eg, p.g1);
  h = h + hermitian_pair(a2.adjoint() * s_fe, p.g2);
  h = h + hermitian_pair(s_fe, 0.5 * p.omega);
  return h;
}

OperatorMatrix make_hermitian(const OperatorMatrix& h) {
  SparseMatrix m = h.sparse();
  m = (0.5 * (m + SparseMatrix(m.adjoint()))).pruned();
  return OperatorMatrix(std::move(m), true);
}

}  // namespace

OperatorMatrix hamiltonian_ideal(const SystemParams& params, const HilbertSpace& space) {
  params.validate();
  if (params.finite_anharmonicity()) {
    throw DomainError("hamiltonian_ideal requires infinite anharmonicity; use hamiltonian_finite_A");
  }
  const OperatorMatrix s_ee = level_projector(space, Level::e);
  const OperatorMatrix s_ff = level_projector(space, Level::f);
  OperatorMatrix h = s_ee * Complex(params.delta_e) + s_ff * Complex(params.delta_e + params.delta_f) +
                     number_op(space, Cavity::one) * Complex(params.delta_cav1) +
                     number_op(space, Cavity::two) * Complex(params.delta_cav2);
  h = h + resonant_couplings(params, space);
  return make_hermitian(h);
}

OperatorMatrix hamiltonian_finite_A(const SystemParams& params, const HilbertSpace& space,
                                    ResidualTerms residual) {
  params.validate();
  if (!params.finite_anharmonicity()) {
    throw DomainError("hamiltonian_finite_A requires a finite positive anharmonicity");
  }
  const double A = params.anharmonicity;
  const double r = params.residual_ratio;
  const OperatorMatrix s_ee = level_projector(space, Level::e);
  const OperatorMatrix s_ff = level_projector(space, Level::f);
  OperatorMatrix h = s_ee * Complex(params.Delta + A) + s_ff * Complex(2.0 * params.Delta + A) +
                     number_op(space, Cavity::one) * Complex(params.Delta + A + params.delta1) +
                     number_op(space, Cavity::two) * Complex(params.Delta + params.delta2);
  h = h + resonant_couplings(params, space);

  const OperatorMatrix a1 = annihilation(space, Cavity::one);
  const OperatorMatrix a2 = annihilation(space, Cavity::two);
  const OperatorMatrix s_eg = qutrit_op(space, Level::e, Level::g);
  const OperatorMatrix s_fe = qutrit_op(space, Level::f, Level::e);
  if (residual.cavity1) h = h + hermitian_pair(a1.adjoint() * s_fe, r * params.g1);
  if (residual.cavity2) h = h + hermitian_pair(a2.adjoint() * s_eg, params.g2 / r);
  if (residual.drive) h = h + hermitian_pair(s_eg, 0.5 * params.omega / r);
  return make_hermitian(h);
}

OperatorMatrix anharmonic_frame_offset(double anharmonicity, const HilbertSpace& space) {
  return (level_projector(space, Level::e) + level_projector(space, Level::f) +
          number_op(space, Cavity::one)) *
         Complex(anharmonicity);
}

CollapseSet collapse_set(const SystemParams& params, const DecoherenceParams& decoherence,
                         const HilbertSpace& space, bool split) {
  params.validate();
  decoherence.validate();
  CollapseSet set;
  set.add(labels::kappa1, annihilation(space, Cavity::one) * Complex(std::sqrt(params.kappa1)));
  const OperatorMatrix c2 = annihilation(space, Cavity::two) * Complex(std::sqrt(params.kappa2));
  if (split) {
    const OperatorMatrix pg = level_projector(space, Level::g);
    const OperatorMatrix pe = level_projector(space, Level::e) + level_projector(space, Level::f);
    set.add(labels::kappa2_ground, pg * c2 * pg);
    set.add(labels::kappa2_excited, pe * c2 * pe);
  } else {
    set.add(labels::kappa2, c2);
  }
  if (decoherence.gamma_eg > 0) {
    set.add(labels::gamma_eg, qutrit_op(space, Level::e, Level::g) * Complex(std::sqrt(decoherence.gamma_eg)));
  }
  if (decoherence.gamma_fe > 0) {
    set.add(labels::gamma_fe, qutrit_op(space, Level::f, Level::e) * Complex(std::sqrt(decoherence.gamma_fe)));
  }
  if (decoherence.gamma_p_ee > 0) {
    set.add(labels::gamma_p_ee, level_projector(space, Level::e) * Complex(std::sqrt(decoherence.gamma_p_ee)));
  }
  if (decoherence.gamma_p_ff > 0) {
    set.add(labels::gamma_p_ff, level_projector(space, Level::f) * Complex(std::sqrt(decoherence.gamma_p_ff)));
  }
  return set;
}

OperatorMatrix nonhermitian(const OperatorMatrix& H, const CollapseSet& collapses) {
  if (H.hermiticity_defect() >= 1e-12) throw DomainError("nonhermitian requires a Hermitian H");
  return H - collapses.decay_operator(H.dim()) * Complex(0.0, 0.5);
}

}  // namespace spt
