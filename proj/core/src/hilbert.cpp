#include "spt/hilbert.hpp"

#include <cmath>
#include <sstream>

namespace spt {

namespace {

constexpr double kHermitianTol = 1e-12;

SparseMatrix from_triplets(int dim, const std::vector<Eigen::Triplet<Complex>>& t) {
  SparseMatrix m(dim, dim);
  m.setFromTriplets(t.begin(), t.end());
  m.makeCompressed();
  return m;
}

}  // namespace

char level_name(Level level) {
  switch (level) {
    case Level::g: return 'g';
    case Level::e: return 'e';
    case Level::f: return 'f';
  }
  return '?';
}

HilbertSpace::HilbertSpace(HilbertSpec spec) : spec_(spec) {
  if (spec.n1_max < 0 || spec.n2_max < 0) {
    throw DomainError("Fock truncations must be non-negative");
  }
  dim_ = 3 * (spec.n1_max + 1) * (spec.n2_max + 1);
}

int HilbertSpace::index(Level level, int n1, int n2) const {
  if (n1 < 0 || n1 > spec_.n1_max || n2 < 0 || n2 > spec_.n2_max) {
    throw std::out_of_range("basis state outside truncation");
  }
  return (static_cast<int>(level) * (spec_.n1_max + 1) + n1) * (spec_.n2_max + 1) + n2;
}

BasisState HilbertSpace::state(int index) const {
  if (index < 0 || index >= dim_) throw std::out_of_range("basis index out of range");
  const int n2 = index % (spec_.n2_max + 1);
  const int rest = index / (spec_.n2_max + 1);
  const int n1 = rest % (spec_.n1_max + 1);
  const int m = rest / (spec_.n1_max + 1);
  return {static_cast<Level>(m), n1, n2};
}

std::string HilbertSpace::label(int index) const {
  const BasisState s = state(index);
  std::ostringstream os;
  os << '|' << level_name(s.level) << ',' << s.n1 << ',' << s.n2 << '>';
  return os.str();
}

HilbertSpace build_space(const HilbertSpec& spec) { return HilbertSpace(spec); }

OperatorMatrix::OperatorMatrix(SparseMatrix m, bool hermitian) : m_(std::move(m)) {
  if (m_.rows() != m_.cols()) throw DomainError("operator must be square");
  m_.makeCompressed();
  if (hermitian) {
    const double defect = hermiticity_defect();
    if (defect >= kHermitianTol) {
      throw NumericalError("operator flagged Hermitian has defect " + std::to_string(defect));
    }
    hermitian_ = true;
  }
}

OperatorMatrix OperatorMatrix::zero(int dim) { return OperatorMatrix(SparseMatrix(dim, dim), true); }

OperatorMatrix OperatorMatrix::identity(int dim) {
  SparseMatrix m(dim, dim);
  m.setIdentity();
  return OperatorMatrix(std::move(m), true);
}

OperatorMatrix OperatorMatrix::from_dense(const CMatrix& m, bool hermitian) {
  return OperatorMatrix(SparseMatrix(m.sparseView(0.0, 0.0)), hermitian);
}

OperatorMatrix OperatorMatrix::adjoint() const {
  OperatorMatrix out;
  out.m_ = m_.adjoint();
  out.m_.makeCompressed();
  out.hermitian_ = hermitian_;
  return out;
}

double OperatorMatrix::hermiticity_defect() const {
  const SparseMatrix diff = m_ - SparseMatrix(m_.adjoint());
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& o) const {
  OperatorMatrix out;
  out.m_ = m_ + o.m_;
  out.m_.makeCompressed();
  out.hermitian_ = hermitian_ && o.hermitian_;
  return out;
}

OperatorMatrix OperatorMatrix::operator-(const OperatorMatrix& o) const {
  OperatorMatrix out;
  out.m_ = m_ - o.m_;
  out.m_.makeCompressed();
  out.hermitian_ = hermitian_ && o.hermitian_;
  return out;
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& o) const {
  OperatorMatrix out;
  out.m_ = (m_ * o.m_).pruned();
  out.m_.makeCompressed();
  return out;
}

OperatorMatrix OperatorMatrix::operator*(Complex s) const {
  OperatorMatrix out;
  out.m_ = m_ * s;
  out.m_.makeCompressed();
  out.hermitian_ = hermitian_ && s.imag() == 0.0;
  return out;
}

OperatorMatrix annihilation(const HilbertSpace& space, Cavity cavity) {
  std::vector<Eigen::Triplet<Complex>> t;
  for (int i = 0; i < space.dim(); ++i) {
    const BasisState s = space.state(i);
    const int n = cavity == Cavity::one ? s.n1 : s.n2;
    if (n == 0) continue;
    const int row = cavity == Cavity::one ? space.index(s.level, s.n1 - 1, s.n2)
                                          : space.index(s.level, s.n1, s.n2 - 1);
    t.emplace_back(row, i, std::sqrt(static_cast<double>(n)));
  }
  return OperatorMatrix(from_triplets(space.dim(), t));
}

OperatorMatrix number_op(const HilbertSpace& space, Cavity cavity) {
  std::vector<Eigen::Triplet<Complex>> t;
  for (int i = 0; i < space.dim(); ++i) {
    const BasisState s = space.state(i);
    const int n = cavity == Cavity::one ? s.n1 : s.n2;
    if (n != 0) t.emplace_back(i, i, static_cast<double>(n));
  }
  return OperatorMatrix(from_triplets(space.dim(), t), true);
}

OperatorMatrix qutrit_op(const HilbertSpace& space, Level from, Level to) {
  std::vector<Eigen::Triplet<Complex>> t;
  for (int i = 0; i < space.dim(); ++i) {
    const BasisState s = space.state(i);
    if (s.level != from) continue;
    t.emplace_back(space.index(to, s.n1, s.n2), i, 1.0);
  }
  return OperatorMatrix(from_triplets(space.dim(), t), from == to);
}

OperatorMatrix level_projector(const HilbertSpace& space, Level level) {
  return qutrit_op(space, level, level);
}

OperatorMatrix identity(const HilbertSpace& space) { return OperatorMatrix::identity(space.dim()); }

OperatorMatrix top_layer_projector(const HilbertSpace& space, Cavity cavity) {
  const int top = cavity == Cavity::one ? space.spec().n1_max : space.spec().n2_max;
  std::vector<Eigen::Triplet<Complex>> t;
  for (int i = 0; i < space.dim(); ++i) {
    const BasisState s = space.state(i);
    if ((cavity == Cavity::one ? s.n1 : s.n2) == top) t.emplace_back(i, i, 1.0);
  }
  return OperatorMatrix(from_triplets(space.dim(), t), true);
}

QuantumState basis_state(const HilbertSpace& space, Level level, int n1, int n2) {
  QuantumState st;
  st.amplitudes = CVector::Zero(space.dim());
  const int i = space.index(level, n1, n2);
  st.amplitudes(i) = 1.0;
  st.label = space.label(i);
  return st;
}

Subspace::Subspace(const HilbertSpace& parent, std::vector<BasisState> states)
    : parent_(parent), states_(std::move(states)), position_(parent.dim(), -1) {
  indices_.reserve(states_.size());
  for (const BasisState& s : states_) {
    const int i = parent_.index(s);
    if (position_[i] != -1) throw DomainError("duplicate basis state in subspace");
    position_[i] = static_cast<int>(indices_.size());
    indices_.push_back(i);
  }
}

Subspace Subspace::full(const HilbertSpace& parent) {
  std::vector<BasisState> states;
  states.reserve(parent.dim());
  for (int i = 0; i < parent.dim(); ++i) states.push_back(parent.state(i));
  return Subspace(parent, std::move(states));
}

int Subspace::find(const BasisState& s) const {
  const HilbertSpec& sp = parent_.spec();
  if (s.n1 < 0 || s.n1 > sp.n1_max || s.n2 < 0 || s.n2 > sp.n2_max) return -1;
  return position_[parent_.index(s)];
}

int Subspace::index(Level level, int n1, int n2) const {
  const int i = find({level, n1, n2});
  if (i < 0) throw std::out_of_range("basis state not in subspace");
  return i;
}

std::string Subspace::label(int i) const { return parent_.label(indices_.at(i)); }

OperatorMatrix Subspace::restrict(const OperatorMatrix& op) const {
  if (op.dim() != parent_.dim()) throw DomainError("operator dimension does not match subspace parent");
  std::vector<Eigen::Triplet<Complex>> t;
  const SparseMatrix& m = op.sparse();
  for (int k = 0; k < m.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(m, k); it; ++it) {
      const int r = position_[it.row()];
      const int c = position_[it.col()];
      if (r >= 0 && c >= 0) t.emplace_back(r, c, it.value());
    }
  }
  return OperatorMatrix(from_triplets(dim(), t), op.hermitian());
}

QuantumState Subspace::basis_state(Level level, int n1, int n2) const {
  QuantumState st;
  st.amplitudes = CVector::Zero(dim());
  const int i = index(level, n1, n2);
  st.amplitudes(i) = 1.0;
  st.label = label(i);
  return st;
}

OperatorMatrix Subspace::level_projector(Level level) const {
  return restrict(spt::level_projector(parent_, level));
}

}  // namespace spt
