#pragma once

#include <string>
#include <vector>

#include "spt/types.hpp"

namespace spt {

enum class Level : int { g = 0, e = 1, f = 2 };
enum class Cavity : int { one = 1, two = 2 };

char level_name(Level level);

struct HilbertSpec {
  int n1_max = 1;
  int n2_max = 1;
};

struct BasisState {
  Level level = Level::g;
  int n1 = 0;
  int n2 = 0;

  bool operator==(const BasisState&) const = default;
};

/// Truncated qutrit x cavity-1 x cavity-2 space. Ordering is m-major, then
/// n1, then n2: index = (m*(N1+1) + n1)*(N2+1) + n2.
class HilbertSpace {
 public:
  explicit HilbertSpace(HilbertSpec spec);

  const HilbertSpec& spec() const { return spec_; }
  int dim() const { return dim_; }

  int index(Level level, int n1, int n2) const;
  int index(const BasisState& s) const { return index(s.level, s.n1, s.n2); }
  BasisState state(int index) const;
  std::string label(int index) const;

 private:
  HilbertSpec spec_;
  int dim_;
};

HilbertSpace build_space(const HilbertSpec& spec);

/// Square complex operator with sparse storage. The hermitian flag is only
/// set after verification.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;
  explicit OperatorMatrix(SparseMatrix m, bool hermitian = false);

  static OperatorMatrix zero(int dim);
  static OperatorMatrix identity(int dim);
  static OperatorMatrix from_dense(const CMatrix& m, bool hermitian = false);

  int dim() const { return static_cast<int>(m_.rows()); }
  bool hermitian() const { return hermitian_; }
  const SparseMatrix& sparse() const { return m_; }
  CMatrix dense() const { return CMatrix(m_); }
  Complex element(int row, int col) const { return m_.coeff(row, col); }

  OperatorMatrix adjoint() const;
  /// max |M - M^dagger| over all entries.
  double hermiticity_defect() const;

  OperatorMatrix operator+(const OperatorMatrix& o) const;
  OperatorMatrix operator-(const OperatorMatrix& o) const;
  OperatorMatrix operator*(const OperatorMatrix& o) const;
  OperatorMatrix operator*(Complex s) const;
  friend OperatorMatrix operator*(Complex s, const OperatorMatrix& m) { return m * s; }

  CVector apply(const CVector& v) const { return m_ * v; }

 private:
  SparseMatrix m_;
  bool hermitian_ = false;
};

OperatorMatrix annihilation(const HilbertSpace& space, Cavity cavity);
OperatorMatrix number_op(const HilbertSpace& space, Cavity cavity);
/// |to><from| on the qutrit, identity on both cavities.
OperatorMatrix qutrit_op(const HilbertSpace& space, Level from, Level to);
OperatorMatrix level_projector(const HilbertSpace& space, Level level);
OperatorMatrix identity(const HilbertSpace& space);
/// Projector onto basis states whose cavity occupation equals the truncation.
OperatorMatrix top_layer_projector(const HilbertSpace& space, Cavity cavity);

struct QuantumState {
  CVector amplitudes;
  std::string label;

  double norm_squared() const { return amplitudes.squaredNorm(); }
};

QuantumState basis_state(const HilbertSpace& space, Level level, int n1, int n2);

/// An ordered selection of basis states of a product space, used for
/// hand-picked truncations such as the seven-state dark-count space.
class Subspace {
 public:
  Subspace(const HilbertSpace& parent, std::vector<BasisState> states);
  static Subspace full(const HilbertSpace& parent);

  const HilbertSpace& parent() const { return parent_; }
  int dim() const { return static_cast<int>(indices_.size()); }
  const std::vector<int>& parent_indices() const { return indices_; }
  const BasisState& state(int i) const { return states_.at(i); }
  /// Position of a basis state inside the subspace, or -1.
  int find(const BasisState& s) const;
  int index(Level level, int n1, int n2) const;
  std::string label(int i) const;

  OperatorMatrix restrict(const OperatorMatrix& op) const;
  QuantumState basis_state(Level level, int n1, int n2) const;
  OperatorMatrix level_projector(Level level) const;

 private:
  HilbertSpace parent_;
  std::vector<BasisState> states_;
  std::vector<int> indices_;
  std::vector<int> position_;
};

}  // namespace spt
