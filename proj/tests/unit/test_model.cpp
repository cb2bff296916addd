#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

#include "spt/dressed.hpp"
#include "spt/model.hpp"

namespace spt {
namespace {

SystemParams reference_params() {
  SystemParams p;
  p.g1 = 0.05;
  p.g2 = 1.0;
  p.omega = 2.0;
  p.kappa2 = 1.0;
  return p;
}

Eigen::VectorXd sorted_eigenvalues(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

TEST(HamiltonianIdeal, ZeroParametersGiveZeroMatrix) {
  SystemParams p;
  p.g2 = 0.0;
  const HilbertSpace space({1, 1});
  EXPECT_DOUBLE_EQ(hamiltonian_ideal(p, space).dense().cwiseAbs().maxCoeff(), 0.0);
}

TEST(HamiltonianIdeal, CouplingMatrixElement) {
  const HilbertSpace space({1, 1});
  const CMatrix h = hamiltonian_ideal(reference_params(), space).dense();
  EXPECT_NEAR(h(space.index(Level::g, 1, 0), space.index(Level::e, 0, 0)).real(), 0.05, 1e-15);
  EXPECT_NEAR(h(space.index(Level::e, 0, 1), space.index(Level::f, 0, 0)).real(), 1.0, 1e-15);
  EXPECT_NEAR(h(space.index(Level::f, 0, 0), space.index(Level::e, 0, 0)).real(), 1.0, 1e-15);
}

TEST(HamiltonianIdeal, ExcitedBlockEigenvalues) {
  const HilbertSpace space({1, 1});
  const CMatrix h = hamiltonian_ideal(reference_params(), space).dense();
  const int idx[] = {space.index(Level::e, 0, 0), space.index(Level::f, 0, 0), space.index(Level::e, 0, 1),
                     space.index(Level::f, 0, 1)};
  CMatrix block(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) block(i, j) = h(idx[i], idx[j]);
  const Eigen::VectorXd ev = sorted_eigenvalues(block);
  const double expected[] = {-1.618034, -0.618034, 0.618034, 1.618034};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(ev(i), expected[i], 1e-6);
}

TEST(HamiltonianIdeal, HermitianForRandomDraws) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  const HilbertSpace space({2, 4});
  for (int k = 0; k < 50; ++k) {
    SystemParams p;
    p.g1 = u(rng);
    p.g2 = u(rng);
    p.omega = u(rng);
    p.delta_e = u(rng) - 1.5;
    p.delta_f = u(rng) - 1.5;
    p.delta_cav1 = u(rng) - 1.5;
    p.delta_cav2 = u(rng) - 1.5;
    const OperatorMatrix h = hamiltonian_ideal(p, space);
    EXPECT_TRUE(h.hermitian());
    EXPECT_LT(h.hermiticity_defect(), 1e-12);
  }
}

TEST(HamiltonianIdeal, RejectsFiniteAnharmonicity) {
  SystemParams p = reference_params();
  p.anharmonicity = 50.0;
  EXPECT_THROW(hamiltonian_ideal(p, HilbertSpace({1, 1})), DomainError);
}

// f carries two excitations: a2^dagger sigma_ef maps |f,0,0> to |e,0,1>.
TEST(HamiltonianIdeal, ExcitationNumberConservedWithoutDrive) {
  SystemParams p = reference_params();
  p.omega = 0.0;
  const HilbertSpace space({2, 3});
  const CMatrix h = hamiltonian_ideal(p, space).dense();
  const CMatrix n = (level_projector(space, Level::e) + level_projector(space, Level::f) * Complex(2.0) +
                     number_op(space, Cavity::one) + number_op(space, Cavity::two))
                        .dense();
  EXPECT_LT((h * n - n * h).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(HamiltonianFiniteA, ReducesToIdealWithoutResiduals) {
  SystemParams p = reference_params();
  p.anharmonicity = 37.0;
  const HilbertSpace space({2, 3});
  const CMatrix finite = hamiltonian_finite_A(p, space, ResidualTerms::none()).dense();
  SystemParams ideal = p;
  ideal.anharmonicity = kInfiniteAnharmonicity;
  const CMatrix expected = (hamiltonian_ideal(ideal, space) + anharmonic_frame_offset(37.0, space)).dense();
  EXPECT_LT((finite - expected).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(HamiltonianFiniteA, GroundEnergyReference) {
  SystemParams p = reference_params();
  p.anharmonicity = 50.0;
  const HilbertSpace space({1, 1});
  const CMatrix h = hamiltonian_finite_A(p, space).dense();
  EXPECT_DOUBLE_EQ(std::abs(h(0, 0)), 0.0);
}

// The resonant f-e drive has matrix element omega/2; the residual e-g drive
// carries the 1/sqrt(2) matrix-element ratio on top, giving omega/(2 sqrt 2).
TEST(HamiltonianFiniteA, ResidualDriveElement) {
  SystemParams p = reference_params();
  p.anharmonicity = 50.0;
  const HilbertSpace space({1, 1});
  const CMatrix h = hamiltonian_finite_A(p, space).dense();
  const Complex residual = h(space.index(Level::e, 0, 0), space.index(Level::g, 0, 0));
  const Complex resonant = h(space.index(Level::f, 0, 0), space.index(Level::e, 0, 0));
  EXPECT_NEAR(residual.real(), 2.0 / (2.0 * std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(residual.real() / resonant.real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(h(space.index(Level::g, 0, 1), space.index(Level::e, 0, 0)).real(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(h(space.index(Level::e, 1, 0), space.index(Level::f, 0, 0)).real(), std::sqrt(2.0) * 0.05, 1e-15);
}

// Eigenvalues sit near multiples of A, so at A = 1e9 the comparison needs
// more than double precision; the matrices are real for these parameters.
TEST(HamiltonianFiniteA, LargeAnharmonicitySpectrumConverges) {
  using LMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  SystemParams p = reference_params();
  p.anharmonicity = 1e9;
  const HilbertSpace space({1, 1});
  auto spectrum = [](const CMatrix& h) {
    EXPECT_DOUBLE_EQ(h.imag().cwiseAbs().maxCoeff(), 0.0);
    const LMatrix m = h.real().cast<long double>();
    Eigen::SelfAdjointEigenSolver<LMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
  };
  const auto full = spectrum(hamiltonian_finite_A(p, space).dense());
  const auto bare = spectrum(hamiltonian_finite_A(p, space, ResidualTerms::none()).dense());
  EXPECT_LT(static_cast<double>((full - bare).cwiseAbs().maxCoeff()), 1e-6);
  // The residual shifts are second order, so they shrink as 1/A.
  p.anharmonicity = 1e4;
  const auto full4 = spectrum(hamiltonian_finite_A(p, space).dense());
  const auto bare4 = spectrum(hamiltonian_finite_A(p, space, ResidualTerms::none()).dense());
  const double shift4 = static_cast<double>((full4 - bare4).cwiseAbs().maxCoeff());
  EXPECT_GT(shift4, 1e-5);
  EXPECT_LT(shift4, 1e-3);
}

TEST(HamiltonianFiniteA, RejectsInvalidAnharmonicity) {
  SystemParams p = reference_params();
  const HilbertSpace space({1, 1});
  EXPECT_THROW(hamiltonian_finite_A(p, space), DomainError);
  p.anharmonicity = -3.0;
  EXPECT_THROW(hamiltonian_finite_A(p, space), DomainError);
  p.anharmonicity = 0.0;
  EXPECT_THROW(hamiltonian_finite_A(p, space), DomainError);
}

TEST(SystemParams, Validation) {
  SystemParams p = reference_params();
  EXPECT_NO_THROW(p.validate());
  p.g1 = -0.1;
  EXPECT_THROW(p.validate(), DomainError);
  p = reference_params();
  p.omega = -1;
  EXPECT_THROW(p.validate(), DomainError);
  p = reference_params();
  p.kappa2 = std::nan("");
  EXPECT_THROW(p.validate(), DomainError);
  DecoherenceParams d;
  d.gamma_fe = -1;
  EXPECT_THROW(d.validate(), DomainError);
}

TEST(CollapseSet, SplitSumsToCavityJump) {
  SystemParams p = reference_params();
  p.kappa2 = 0.7;
  for (const HilbertSpec spec : {HilbertSpec{1, 1}, HilbertSpec{2, 5}}) {
    const HilbertSpace space(spec);
    const CollapseSet split = collapse_set(p, {}, space, true);
    const CMatrix cg = split[split.find(labels::kappa2_ground)].op.dense();
    const CMatrix ce = split[split.find(labels::kappa2_excited)].op.dense();
    const CMatrix c = (annihilation(space, Cavity::two) * Complex(std::sqrt(0.7))).dense();
    EXPECT_LT((cg + ce - c).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((cg.adjoint() * ce).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LT((ce.adjoint() * cg).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(split.find(labels::kappa2), -1);
  }
}

TEST(CollapseSet, RadiativeConvention) {
  const double gamma = 0.013;
  const HilbertSpace space({1, 1});
  const CollapseSet set = collapse_set(reference_params(), DecoherenceParams::radiative(gamma), space);
  const CMatrix cfe = set[set.find(labels::gamma_fe)].op.dense();
  const CMatrix ceg = set[set.find(labels::gamma_eg)].op.dense();
  EXPECT_LT((cfe.adjoint() * cfe - 2 * gamma * level_projector(space, Level::f).dense()).cwiseAbs().maxCoeff(),
            1e-15);
  EXPECT_LT((ceg.adjoint() * ceg - gamma * level_projector(space, Level::e).dense()).cwiseAbs().maxCoeff(), 1e-15);
  const DecoherenceParams dephasing = DecoherenceParams::dephasing(gamma);
  EXPECT_DOUBLE_EQ(dephasing.gamma_p_ff, 2 * dephasing.gamma_p_ee);
}

TEST(CollapseSet, ZeroRatesGiveOnlyCavityJumps) {
  SystemParams p;
  const HilbertSpace space({1, 1});
  const CollapseSet set = collapse_set(p, {}, space);
  ASSERT_EQ(set.size(), 2u);
  EXPECT_EQ(set.labels(), (std::vector<std::string>{labels::kappa1, labels::kappa2}));
  EXPECT_DOUBLE_EQ(set.decay_operator(space.dim()).dense().cwiseAbs().maxCoeff(), 0.0);
}

TEST(CollapseSet, JumpProductsArePositive) {
  SystemParams p = reference_params();
  p.kappa1 = 0.3;
  const HilbertSpace space({2, 3});
  const CollapseSet set = collapse_set(p, {0.1, 0.2, 0.05, 0.1}, space, true);
  for (const Jump& j : set.jumps()) {
    const CMatrix m = j.op.dense().adjoint() * j.op.dense();
    EXPECT_LT((m - m.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_GT(sorted_eigenvalues(m).minCoeff(), -1e-14);
  }
}

TEST(NonHermitian, ZeroCollapsesLeaveH) {
  const HilbertSpace space({1, 1});
  const OperatorMatrix h = hamiltonian_ideal(reference_params(), space);
  EXPECT_DOUBLE_EQ((nonhermitian(h, CollapseSet{}).dense() - h.dense()).cwiseAbs().maxCoeff(), 0.0);
}

TEST(NonHermitian, CavityDecayOnOnePhotonStates) {
  SystemParams p = reference_params();
  p.kappa2 = 0.8;
  const HilbertSpace space({1, 1});
  CollapseSet set;
  set.add(labels::kappa2, annihilation(space, Cavity::two) * Complex(std::sqrt(p.kappa2)));
  const CMatrix hnh = nonhermitian(hamiltonian_ideal(p, space), set).dense();
  for (int i = 0; i < space.dim(); ++i) {
    const double expected = space.state(i).n2 == 1 ? -0.4 : 0.0;
    EXPECT_NEAR(hnh(i, i).imag(), expected, 1e-15);
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(CMatrix(kI * (hnh - hnh.adjoint())), Eigen::EigenvaluesOnly);
  EXPECT_GT(es.eigenvalues().minCoeff(), -1e-14);
}

TEST(NonHermitian, DressedStatesDecayAtQuarterKappa) {
  const double kappa2 = 0.3;
  const DressedBasis basis = dressed_basis(1.0, 2.0);
  const Eigen::Matrix4d c = excited_jump(kappa2);
  const Eigen::Matrix4d decay = basis.p_matrix.transpose() * (c.transpose() * c) * basis.p_matrix;
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(-0.5 * decay(i, i), -kappa2 / 4, 1e-14);
}

// d|psi|^2/dt = -sum <psi|C^dagger C|psi>, checked by a central difference of
// the short-time propagator exp(-i H_NH dt) (Taylor series).
TEST(NonHermitian, NormDecayMatchesJumpRates) {
  SystemParams p = reference_params();
  p.kappa1 = 0.2;
  const HilbertSpace space({1, 2});
  const CollapseSet set = collapse_set(p, DecoherenceParams::radiative(0.05), space);
  const CMatrix hnh = nonhermitian(hamiltonian_ideal(p, space), set).dense();
  const CMatrix decay = set.decay_operator(space.dim()).dense();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  auto propagate = [&](const CVector& psi, double dt) {
    CVector term = psi, out = psi;
    for (int k = 1; k < 30; ++k) {
      term = (-kI * dt / double(k)) * (hnh * term);
      out += term;
    }
    return out;
  };
  for (int trial = 0; trial < 10; ++trial) {
    CVector psi(space.dim());
    for (int i = 0; i < space.dim(); ++i) psi(i) = Complex(n(rng), n(rng));
    psi.normalize();
    const double dt = 1e-4;
    const double derivative =
        (propagate(psi, dt).squaredNorm() - propagate(psi, -dt).squaredNorm()) / (2 * dt);
    const double expected = -psi.dot(decay * psi).real();
    EXPECT_NEAR(derivative, expected, 1e-7);
    EXPECT_LE(derivative, 1e-12);
  }
}

}  // namespace
}  // namespace spt
