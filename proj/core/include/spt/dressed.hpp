#pragma once

#include <array>

#include <Eigen/Dense>

#include "spt/hilbert.hpp"

namespace spt {

/// Closed-form eigenbasis of the excited manifold (e00, f00, e01, f01) at
/// zero detunings. Columns of p_matrix are the dressed states |1>..|4>.
struct DressedBasis {
  std::array<double, 4> energies{};
  double alpha = 0.0;
  double beta = 0.0;
  Eigen::Matrix4d p_matrix = Eigen::Matrix4d::Zero();
};

DressedBasis dressed_basis(double g2, double omega);

/// Coefficients of the cavity-2 jump in the dressed basis, without the
/// sqrt(kappa2) prefactor.
struct DressedJumpCoefficients {
  double diagonal = 0.0;       // omega / (2 sqrt(g2^2 + omega^2))
  double cross = 0.0;          // g2 / (2 sqrt(g2^2 + omega^2))
  double antisymmetric = 0.5;  // coupling 1-2 and 4-3
};

DressedJumpCoefficients dressed_jump_coefficients(double g2, double omega);

/// P^T C P for C = sqrt(kappa2)(|e00><e01| + |f00><f01|).
OperatorMatrix jump_in_dressed_basis(double g2, double omega, double kappa2);

/// The same operator assembled from the closed-form coefficients.
OperatorMatrix jump_in_dressed_basis_closed_form(double g2, double omega, double kappa2);

/// Bare excited-manifold Hamiltonian block in the order (e00, f00, e01, f01).
Eigen::Matrix4d excited_block(double g2, double omega);

/// Bare cavity-2 jump restricted to the excited manifold (same order).
Eigen::Matrix4d excited_jump(double kappa2);

}  // namespace spt
