#include "spt/dressed.hpp"

#include <cmath>

namespace spt {

namespace {

void check(double g2, double omega) {
  if (!(g2 > 0) || !(omega >= 0) || !std::isfinite(g2) || !std::isfinite(omega)) {
    throw DomainError("dressed basis requires g2 > 0 and omega >= 0");
  }
}

}  // namespace

DressedBasis dressed_basis(double g2, double omega) {
  check(g2, omega);
  const double s = std::hypot(g2, omega);
  DressedBasis b;
  b.energies = {-0.5 * g2 - 0.5 * s, 0.5 * g2 - 0.5 * s, -0.5 * g2 + 0.5 * s, 0.5 * g2 + 0.5 * s};
  b.alpha = 0.5 * std::sqrt(1.0 + g2 / s);
  b.beta = 0.5 * std::sqrt(1.0 - g2 / s);
  const double a = b.alpha;
  const double c = b.beta;
  b.p_matrix << -c, a, -a, c,
                 a, -c, -c, a,
                -a, -c, c, a,
                 c, a, a, c;
  return b;
}

DressedJumpCoefficients dressed_jump_coefficients(double g2, double omega) {
  check(g2, omega);
  const double s = std::hypot(g2, omega);
  return {omega / (2.0 * s), g2 / (2.0 * s), 0.5};
}

Eigen::Matrix4d excited_block(double g2, double omega) {
  Eigen::Matrix4d h = Eigen::Matrix4d::Zero();
  h(0, 1) = h(1, 0) = 0.5 * omega;
  h(1, 2) = h(2, 1) = g2;
  h(2, 3) = h(3, 2) = 0.5 * omega;
  return h;
}

Eigen::Matrix4d excited_jump(double kappa2) {
  Eigen::Matrix4d c = Eigen::Matrix4d::Zero();
  c(0, 2) = c(1, 3) = std::sqrt(kappa2);
  return c;
}

OperatorMatrix jump_in_dressed_basis(double g2, double omega, double kappa2) {
  if (!(kappa2 >= 0)) throw DomainError("kappa2 must be non-negative");
  const DressedBasis b = dressed_basis(g2, omega);
  const Eigen::Matrix4d m = b.p_matrix.transpose() * excited_jump(kappa2) * b.p_matrix;
  return OperatorMatrix::from_dense(m.cast<Complex>());
}

OperatorMatrix jump_in_dressed_basis_closed_form(double g2, double omega, double kappa2) {
  if (!(kappa2 >= 0)) throw DomainError("kappa2 must be non-negative");
  const DressedJumpCoefficients k = dressed_jump_coefficients(g2, omega);
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  m(0, 0) = k.diagonal;
  m(1, 1) = -k.diagonal;
  m(2, 2) = -k.diagonal;
  m(3, 3) = k.diagonal;
  m(0, 1) = k.antisymmetric;
  m(1, 0) = -k.antisymmetric;
  m(3, 2) = k.antisymmetric;
  m(2, 3) = -k.antisymmetric;
  m(0, 2) = m(2, 0) = m(1, 3) = m(3, 1) = k.cross;
  return OperatorMatrix::from_dense((std::sqrt(kappa2) * m).cast<Complex>());
}

}  // namespace spt
