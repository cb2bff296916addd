#include <gtest/gtest.h>

#include <random>

#include <Eigen/Eigenvalues>

#include "spt/dressed.hpp"
#include "spt/model.hpp"

namespace spt {
namespace {

TEST(DressedBasis, ReferenceEnergiesAndMixing) {
  const DressedBasis b = dressed_basis(1.0, 2.0);
  const double expected[] = {-1.618034, -0.618034, 0.618034, 1.618034};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(b.energies[i], expected[i], 1e-6);
  EXPECT_NEAR(b.alpha, 0.601501, 1e-6);
  EXPECT_NEAR(b.beta, 0.371748, 1e-6);
}

TEST(DressedBasis, VacuumRabiLimit) {
  const DressedBasis b = dressed_basis(1.0, 0.0);
  EXPECT_NEAR(b.energies[0], -1.0, 1e-15);
  EXPECT_NEAR(b.energies[1], 0.0, 1e-15);
  EXPECT_NEAR(b.energies[2], 0.0, 1e-15);
  EXPECT_NEAR(b.energies[3], 1.0, 1e-15);
  EXPECT_NEAR(b.alpha, 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(b.beta, 0.0, 1e-15);
  EXPECT_LT((b.p_matrix.transpose() * b.p_matrix - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(DressedBasis, MatchesIdealHamiltonianBlock) {
  SystemParams p;
  p.g1 = 0.05;
  p.g2 = 1.0;
  p.omega = 2.0;
  const HilbertSpace space({1, 1});
  const CMatrix h = hamiltonian_ideal(p, space).dense();
  const int idx[] = {space.index(Level::e, 0, 0), space.index(Level::f, 0, 0), space.index(Level::e, 0, 1),
                     space.index(Level::f, 0, 1)};
  Eigen::Matrix4d block;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) block(i, j) = h(idx[i], idx[j]).real();
  EXPECT_LT((block - excited_block(1.0, 2.0)).cwiseAbs().maxCoeff(), 1e-15);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(block);
  const DressedBasis b = dressed_basis(1.0, 2.0);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(es.eigenvalues()(i), b.energies[i], 1e-10);
  // Columns of P are eigenvectors with the analytic sign convention; compare
  // up to the solver's arbitrary sign.
  for (int i = 0; i < 4; ++i) {
    const Eigen::Vector4d v = b.p_matrix.col(i);
    EXPECT_LT((block * v - b.energies[i] * v).norm(), 1e-12);
    EXPECT_NEAR(std::abs(v.dot(es.eigenvectors().col(i))), 1.0, 1e-10);
  }
}

TEST(DressedJump, ReferenceCoefficients) {
  const DressedJumpCoefficients k = dressed_jump_coefficients(1.0, 2.0);
  EXPECT_NEAR(k.diagonal, 0.447214, 1e-6);
  EXPECT_NEAR(k.cross, 0.223607, 1e-6);
  EXPECT_DOUBLE_EQ(k.antisymmetric, 0.5);
  const DressedJumpCoefficients k0 = dressed_jump_coefficients(1.0, 0.0);
  EXPECT_DOUBLE_EQ(k0.diagonal, 0.0);
  EXPECT_DOUBLE_EQ(k0.cross, 0.5);
}

TEST(DressedJump, FrobeniusNormIsInvariant) {
  const double kappa2 = 0.7;
  const CMatrix m = jump_in_dressed_basis(1.0, 2.0, kappa2).dense();
  EXPECT_NEAR(m.squaredNorm(), 2 * kappa2, 1e-13);
}

TEST(DressedJump, ClosedFormMatchesRotation) {
  for (const double omega : {0.0, 0.3, 2.0, 5.0}) {
    const CMatrix rotated = jump_in_dressed_basis(1.0, omega, 1.3).dense();
    const CMatrix closed = jump_in_dressed_basis_closed_form(1.0, omega, 1.3).dense();
    EXPECT_LT((rotated - closed).cwiseAbs().maxCoeff(), 1e-12) << "omega = " << omega;
  }
}

TEST(DressedBasis, RandomDrawProperties) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.05, 4.0);
  for (int k = 0; k < 50; ++k) {
    const double g2 = u(rng), omega = u(rng), kappa2 = u(rng);
    const DressedBasis b = dressed_basis(g2, omega);
    const Eigen::Matrix4d& P = b.p_matrix;
    EXPECT_LT((P.transpose() * P - Eigen::Matrix4d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(b.alpha * b.alpha + b.beta * b.beta, 0.5, 1e-12);
    for (int i = 0; i < 3; ++i) EXPECT_LE(b.energies[i], b.energies[i + 1]);
    const Eigen::Matrix4d dressed = jump_in_dressed_basis(g2, omega, kappa2).dense().real();
    EXPECT_LT((P * dressed * P.transpose() - excited_jump(kappa2)).cwiseAbs().maxCoeff(), 1e-10);
    const Eigen::Matrix4d closed = jump_in_dressed_basis_closed_form(g2, omega, kappa2).dense().real();
    EXPECT_LT((dressed - closed).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(DressedBasis, RejectsInvalidInput) {
  EXPECT_THROW(dressed_basis(0.0, 1.0), DomainError);
  EXPECT_THROW(dressed_basis(1.0, -1.0), DomainError);
  EXPECT_THROW(jump_in_dressed_basis(1.0, 1.0, -0.1), DomainError);
}

}  // namespace
}  // namespace spt
