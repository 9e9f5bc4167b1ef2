#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ptomo/design.hpp"
#include "ptomo/error.hpp"
#include "ptomo/fisher.hpp"
#include "test_support.hpp"

namespace ptomo {
namespace {

using testing::best_povm;
using testing::random_theta;

// Real-coordinate metric -2 d^2/dx_a dx_b |<psi_0|psi_{0+delta}>|^2, mapped to the
// (theta, conj theta) blocks with d/dtheta = (d/dx - i d/dy) / 2.
FisherBlocks qfim_fidelity_oracle(const LocalParameters& theta, double h) {
  const RVector x0 = theta.to_real();
  const auto n = x0.size();
  const int m = theta.size();
  const CVector psi0 = neighborhood_state(theta).amps();
  auto fid = [&](const RVector& x) {
    return std::norm(psi0.dot(neighborhood_state(LocalParameters::from_real(x)).amps()));
  };
  RMat f(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      RVector ea = RVector::Zero(n), eb = RVector::Zero(n);
      ea(a) = h;
      eb(b) = h;
      const double d2 = (fid(x0 + ea + eb) - fid(x0 + ea - eb) - fid(x0 - ea + eb) + fid(x0 - ea - eb)) /
                        (4.0 * h * h);
      f(a, b) = -2.0 * d2;
    }
  }
  CMat w = CMat::Zero(n, n);  // dx/dz for z = (theta, conj theta)
  for (int k = 0; k < m; ++k) {
    w(k, k) = 0.5;
    w(k, m + k) = 0.5;
    w(m + k, k) = cplx(0.0, -0.5);
    w(m + k, m + k) = cplx(0.0, 0.5);
  }
  const CMat g = w.transpose() * f.cast<cplx>() * w;
  return FisherBlocks{g.bottomLeftCorner(m, m), g.bottomRightCorner(m, m)};
}

Povm with_random_outcome_phases(const Povm& povm, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
  CMat a = povm.coefficients();
  for (Eigen::Index eta = 0; eta < a.rows(); ++eta) a.row(eta) *= std::polar(1.0, u(rng));
  return Povm(a);
}

TEST(QfimPure, FiducialIsTwiceIdentity) {
  for (int d : {2, 4, 6}) {
    const FisherBlocks q = qfim_pure(LocalParameters::zero(d));
    EXPECT_LT(max_abs(q.hermitian - 2.0 * CMat::Identity(d - 1, d - 1)), 1e-12);
    EXPECT_LT(max_abs(q.symmetric), 1e-12);
  }
}

TEST(QfimPure, MatchesFidelityFiniteDifferences) {
  CVector t = CVector::Zero(3);
  t(0) = 0.1;
  const LocalParameters theta(t);
  const FisherBlocks q = qfim_pure(theta);
  const FisherBlocks oracle = qfim_fidelity_oracle(theta, 1e-4);
  EXPECT_LT(max_abs(q.hermitian - oracle.hermitian), 1e-5);
  EXPECT_LT(max_abs(q.symmetric - oracle.symmetric), 1e-5);
  EXPECT_TRUE(q.satisfies_invariants());
}

TEST(QfimPure, GenericComplexPoint) {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 5; ++i) {
    const LocalParameters theta = random_theta(rng, 3 + i % 3, 0.3);
    const FisherBlocks q = qfim_pure(theta);
    const FisherBlocks oracle = qfim_fidelity_oracle(theta, 1e-4);
    EXPECT_LT(max_abs(q.hermitian - oracle.hermitian), 1e-5);
    EXPECT_LT(max_abs(q.symmetric - oracle.symmetric), 1e-5);
    EXPECT_TRUE(q.satisfies_invariants());
  }
}

TEST(CfimFirstOrder, BasisPovm) {
  const FisherBlocks c = cfim_first_order(Povm::computational_basis(4));
  EXPECT_LT(max_abs(c.hermitian - CMat::Identity(3, 3)), 1e-15);
  EXPECT_LT(max_abs(c.symmetric - CMat::Identity(3, 3)), 1e-15);
}

TEST(CfimFirstOrder, SymmetricBlockEqualsCMatrix) {
  const Povm& povm = best_povm();
  const FisherBlocks c = cfim_first_order(povm);
  EXPECT_LT(max_abs(c.hermitian - CMat::Identity(3, 3)), 1e-12);
  EXPECT_LT(max_abs(c.symmetric - c_matrix(povm).mat), 1e-12);
  EXPECT_NEAR(spectral_norm(c.symmetric), c_norm(povm), 1e-12);
  EXPECT_TRUE(c.satisfies_invariants());
}

TEST(CfimFirstOrder, IdentityForHaarPovms) {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 50; ++i) {
    const Povm povm = haar_random_povm(4, 7, rng);
    const FisherBlocks c = cfim_first_order(povm);
    EXPECT_LT(max_abs(c.hermitian - CMat::Identity(3, 3)), 1e-12);
    EXPECT_LT(max_abs(c.symmetric - c_matrix(povm).mat), 1e-12);
  }
}

TEST(CfimFirstOrder, RejectsIncompletePovm) {
  CMat a = Povm::computational_basis(3).coefficients();
  a(0, 0) = 0.5;
  EXPECT_THROW(cfim_first_order(Povm(a)), Error);
  EXPECT_THROW(c_matrix(Povm(a)), Error);
}

TEST(CfimNumeric, AgreesWithFirstOrderAtFiducial) {
  std::mt19937_64 rng(47);
  for (int i = 0; i < 20; ++i) {
    const Povm povm = haar_random_povm(4, 7, rng);
    const FisherBlocks num = cfim_numeric(povm, LocalParameters::zero(4));
    const FisherBlocks ana = cfim_first_order(povm);
    EXPECT_LT(max_abs(num.hermitian - ana.hermitian), 1e-6);
    EXPECT_LT(max_abs(num.symmetric - ana.symmetric), 1e-6);
  }
  const FisherBlocks num = cfim_numeric(best_povm(), LocalParameters::zero(4));
  EXPECT_LT(max_abs(num.hermitian - CMat::Identity(3, 3)), 1e-6);
}

// For the computational basis f_j = |theta_j|^2 / (1 + |theta|^2) with theta_0 = 1,
// so the Fisher blocks have a closed form away from theta = 0.
TEST(CfimNumeric, BasisClosedFormAtGenericPoint) {
  CVector t(3);
  t << cplx(0.1, 0.05), cplx(-0.07, 0.02), cplx(0.0, 0.12);
  const LocalParameters theta(t);
  const double s = 1.0 + t.squaredNorm();
  // ln f_0 = -ln s, ln f_j = ln theta_j + ln conj(theta_j) - ln s.
  // d/dtheta_k ln f_w = delta_{wk}/theta_k - conj(theta_k)/s.
  CMat expect_i = CMat::Zero(3, 3), expect_p = CMat::Zero(3, 3);
  for (int w = 0; w < 4; ++w) {
    const double f = w == 0 ? 1.0 / s : std::norm(t(w - 1)) / s;
    CVector score(3), score_conj(3);
    for (int k = 0; k < 3; ++k) {
      score(k) = (w == k + 1 ? 1.0 / t(k) : 0.0) - std::conj(t(k)) / s;
      score_conj(k) = std::conj(score(k));
    }
    expect_i += f * score_conj * score.transpose();
    expect_p += f * score_conj * score_conj.transpose();
  }
  const FisherBlocks num = cfim_numeric(Povm::computational_basis(4), theta);
  EXPECT_LT(max_abs(num.hermitian - expect_i), 1e-6);
  EXPECT_LT(max_abs(num.symmetric - expect_p), 1e-6);
}

TEST(CfimNumeric, FinitePsdAwayFromFiducial) {
  const LocalParameters theta(CVector::Constant(3, 0.1));
  const FisherBlocks c = cfim_numeric(best_povm(), theta);
  EXPECT_TRUE(c.hermitian.allFinite());
  EXPECT_TRUE(c.symmetric.allFinite());
  EXPECT_TRUE(c.satisfies_invariants());
}

TEST(CfimNumeric, RejectsBadStepAndDimension) {
  EXPECT_THROW(cfim_numeric(best_povm(), LocalParameters::zero(4), 0.0), Error);
  EXPECT_THROW(cfim_numeric(best_povm(), LocalParameters::zero(4), 1e-2), Error);
  EXPECT_THROW(cfim_numeric(best_povm(), LocalParameters::zero(3)), Error);
}

TEST(CMatrix, BasisAndNormKinds) {
  const CMatrix c = c_matrix(Povm::computational_basis(4));
  EXPECT_LT(max_abs(c.mat - CMat::Identity(3, 3)), 1e-15);
  EXPECT_NEAR(c.norm(), 1.0, 1e-15);
  EXPECT_NEAR(c_norm(Povm::computational_basis(4), NormKind::kFrobenius), std::sqrt(3.0), 1e-15);
  EXPECT_LT(symmetry_error(c_matrix(best_povm()).mat), 1e-12);
}

// Three equatorial qubit states at 120 degrees, weight 2/3 each: sum_eta e^{2 i phi_eta}
// vanishes, so C = 0.
TEST(CMatrix, FisherSymmetricPovmHasNullNorm) {
  CMat a(3, 2);
  for (int eta = 0; eta < 3; ++eta) {
    const double phi = 2.0 * std::numbers::pi * eta / 3.0;
    a(eta, 0) = std::sqrt(1.0 / 3.0);
    a(eta, 1) = std::sqrt(1.0 / 3.0) * std::polar(1.0, phi);
  }
  const Povm povm(a);
  ASSERT_TRUE(povm.is_complete(1e-12));
  EXPECT_NEAR(c_norm(povm), 0.0, 1e-15);
  const FisherBlocks c = cfim_first_order(povm);
  EXPECT_LT(max_abs(c.hermitian - CMat::Identity(1, 1)), 1e-15);
  EXPECT_LT(max_abs(c.symmetric), 1e-15);
}

TEST(CMatrix, InvariantUnderOutcomePhases) {
  std::mt19937_64 rng(53);
  const double ref = c_norm(best_povm());
  for (int i = 0; i < 20; ++i) {
    const Povm rotated = with_random_outcome_phases(best_povm(), rng);
    EXPECT_NEAR(c_norm(rotated), ref, 1e-12);
    EXPECT_NEAR(c_norm(rotated, NormKind::kFrobenius), c_norm(best_povm(), NormKind::kFrobenius), 1e-12);
  }
}

TEST(NormKind, ParsesNames) {
  EXPECT_EQ(parse_norm_kind("spectral"), NormKind::kSpectral);
  EXPECT_EQ(parse_norm_kind("frobenius"), NormKind::kFrobenius);
  EXPECT_STREQ(to_string(NormKind::kFrobenius), "frobenius");
  EXPECT_THROW(parse_norm_kind("nuclear"), Error);
}

TEST(GillMassar, WmseBound) {
  EXPECT_DOUBLE_EQ(gill_massar_wmse(4, 100), 0.03);
  EXPECT_DOUBLE_EQ(gill_massar_wmse(2, 1), 1.0);
  EXPECT_DOUBLE_EQ(gill_massar_wmse(4, 100000), 3e-5);
  EXPECT_THROW(gill_massar_wmse(1, 10), Error);
  EXPECT_THROW(gill_massar_wmse(4, 0), Error);
}

TEST(GillMassar, SaturatedAtFiducial) {
  EXPECT_NEAR(gm_inequality_lhs(cfim_first_order(best_povm()), qfim_pure(LocalParameters::zero(4))), 3.0, 1e-12);
  EXPECT_NEAR(gm_inequality_lhs(cfim_first_order(Povm::computational_basis(2)), qfim_pure(LocalParameters::zero(2))),
              1.0, 1e-12);
}

TEST(GillMassar, RandomPovmAtFixedPoint) {
  CVector t(3);
  t << 0.05, cplx(0.0, -0.02), 0.01;
  const LocalParameters theta(t);
  std::mt19937_64 rng(59);
  for (int i = 0; i < 10; ++i) {
    const Povm povm = haar_random_povm(4, 7, rng);
    EXPECT_LE(gm_inequality_lhs(cfim_numeric(povm, theta), qfim_pure(theta)), 3.0 + 1e-9);
  }
}

TEST(GillMassar, InequalityOverHaarEnsemble) {
  std::mt19937_64 rng(61);
  for (int i = 0; i < 100; ++i) {
    const Povm povm = haar_random_povm(4, 7, rng);
    for (int k = 0; k < 10; ++k) {
      const LocalParameters theta = random_theta(rng, 4, 0.1);
      EXPECT_LE(gm_inequality_lhs(cfim_numeric(povm, theta), qfim_pure(theta)), 3.0 + 1e-9);
    }
  }
}

TEST(GillMassar, SizeMismatch) {
  EXPECT_THROW(gm_inequality_lhs(cfim_first_order(best_povm()), qfim_pure(LocalParameters::zero(3))), Error);
}

// At W = J/4 the weighted bound collapses to (d - 1) / N and the optimal CFIM to J/2.
TEST(GillMassar, WeightedFormulaReducesAtInfidelityWeight) {
  std::mt19937_64 rng(67);
  const LocalParameters theta = random_theta(rng, 4, 0.2);
  const CMat j = qfim_pure(theta).assembled();
  EXPECT_NEAR(gill_massar_weighted_wmse(j, j / 4.0, 4, 100), 0.03, 1e-12);
  EXPECT_LT(max_abs(gill_massar_optimal_cfim(j, j / 4.0, 4) - j / 2.0), 1e-10);
}

}  // namespace
}  // namespace ptomo
