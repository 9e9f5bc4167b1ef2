#pragma once

// Complex-parametrization Fisher information for states near |0>.
//
// With theta-hat = [theta, conj(theta)], classical and quantum Fisher
// matrices take the block form
//
//   I-hat = [[I, P], [conj(P), conj(I)]]      J-hat = [[J, Q], [conj(Q), conj(J)]]
//
// where I, J are Hermitian and P, Q are complex symmetric (d-1)x(d-1) blocks.
// Derivatives are Wirtinger derivatives d/dtheta = (d/dx - i d/dy) / 2.

#include <string>

#include "ptomo/povm.hpp"
#include "ptomo/qstate.hpp"

namespace ptomo {

enum class NormKind { kSpectral, kFrobenius };

const char* to_string(NormKind kind);
NormKind parse_norm_kind(const std::string& name);

struct FisherBlocks {
  CMat hermitian;  // I (classical) or J (quantum)
  CMat symmetric;  // P (classical) or Q (quantum)

  int size() const { return static_cast<int>(hermitian.rows()); }
  CMat assembled() const { return assemble_complex_blocks(hermitian, symmetric); }
  // Hermitian/symmetric structure within 1e-10 and PSD within -1e-9.
  bool satisfies_invariants() const;
};

struct CMatrix {
  CMat mat;  // C_jk = sum_eta a_j^eta a_k^eta, j,k >= 1
  NormKind norm_kind = NormKind::kSpectral;

  double norm() const;
};

// QFIM blocks of neighborhood_state(theta) from analytic derivatives.
// At theta = 0: J = 2 I, Q = 0.
FisherBlocks qfim_pure(const LocalParameters& theta);

// First-order CFIM at theta = 0: I_jk = sum conj(a_k) a_j (identity for a
// complete POVM) and P = C. Throws kInvalidInput when completeness is off
// by more than 1e-6.
FisherBlocks cfim_first_order(const Povm& povm);

// CFIM from fourth-order central differences of ln f over Re/Im theta.
// Outcomes with f < 1e-12 at theta are dropped; throws kDegenerateInput if
// none remain.
FisherBlocks cfim_numeric(const Povm& povm, const LocalParameters& theta, double step = 1e-5);

CMatrix c_matrix(const Povm& povm, NormKind kind = NormKind::kSpectral);
double c_norm(const Povm& povm, NormKind kind = NormKind::kSpectral);

// C built directly from an outcomes x dim coefficient array, without phase
// fixing or completeness checks.
CMat c_matrix_from_coefficients(const CMat& coefficients);
double matrix_norm(const CMat& m, NormKind kind);

// Minimal mean infidelity over separable measurements, (d - 1) / n_exp.
double gill_massar_wmse(int dim, long long n_exp);

// tr(I-hat J-hat^{-1}); bounded by d - 1. Throws kNumerical when J-hat has
// condition number >= 1e12.
double gm_inequality_lhs(const FisherBlocks& cfim, const FisherBlocks& qfim);

// Optimal weighted mean square error and the CFIM attaining it, for a
// Hermitian positive weight W-hat on the assembled 2(d-1) space.
double gill_massar_weighted_wmse(const CMat& qfim_assembled, const CMat& weight, int dim,
                                 long long n_exp);
CMat gill_massar_optimal_cfim(const CMat& qfim_assembled, const CMat& weight, int dim);

}  // namespace ptomo
