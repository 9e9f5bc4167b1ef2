#pragma once

#include <vector>

#include "ptomo/linalg.hpp"

namespace ptomo {

/// Rank-1 POVM {|a^eta><a^eta|} stored as an outcomes x dim coefficient
/// array: row eta holds a^eta in the computational basis.
///
/// Every row is phase-fixed on construction: the first component with
/// magnitude above 1e-12 (normally a_0) is made real and non-negative.
/// Completeness sum_eta conj(a_j^eta) a_k^eta = delta_jk is measured, not
/// enforced; `is_complete()` reports it against a tolerance so that raw
/// experimental devices can still produce a (flagged) POVM.
class Povm {
 public:
  explicit Povm(CMat coefficients);

  static Povm computational_basis(int dim);

  int dim() const noexcept { return static_cast<int>(coeffs_.cols()); }
  int outcomes() const noexcept { return static_cast<int>(coeffs_.rows()); }
  const CMat& coefficients() const noexcept { return coeffs_; }
  CVector effect(int eta) const { return coeffs_.row(eta).transpose(); }

  // Max entrywise |A^H A - I|.
  double completeness_deviation() const noexcept { return completeness_deviation_; }
  bool is_complete(double tol = 1e-6) const noexcept { return completeness_deviation_ <= tol; }

  // Outcome permutation: row i of the result is row perm[i] of this POVM.
  Povm permuted(const std::vector<int>& perm) const;

 private:
  CMat coeffs_;
  double completeness_deviation_ = 0.0;
};

// Phase-fixes each row in place (see Povm).
void fix_outcome_phases(CMat& coefficients);

}  // namespace ptomo
