#include "ptomo/povm.hpp"

#include <cmath>

#include "ptomo/error.hpp"

namespace ptomo {

void fix_outcome_phases(CMat& a) {
  for (Eigen::Index eta = 0; eta < a.rows(); ++eta) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      if (std::abs(a(eta, j)) > 1e-12) {
        const cplx phase = std::conj(a(eta, j)) / std::abs(a(eta, j));
        a.row(eta) *= phase;
        a(eta, j) = std::abs(a(eta, j));
        break;
      }
    }
  }
}

Povm::Povm(CMat coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.cols() < 2) throw_invalid("POVM dimension must be at least 2");
  if (coeffs_.rows() < 1) throw_invalid("POVM needs at least one outcome");
  for (const cplx& z : coeffs_.reshaped()) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw_invalid("POVM coefficients must be finite");
  }
  fix_outcome_phases(coeffs_);
  const CMat gram = coeffs_.adjoint() * coeffs_;
  completeness_deviation_ = max_abs(gram - CMat::Identity(gram.rows(), gram.cols()));
}

Povm Povm::computational_basis(int dim) {
  if (dim < 2) throw_invalid("POVM dimension must be at least 2");
  return Povm(CMat::Identity(dim, dim));
}

Povm Povm::permuted(const std::vector<int>& perm) const {
  if (static_cast<int>(perm.size()) != outcomes()) throw_invalid("permutation length mismatch");
  CMat out(coeffs_.rows(), coeffs_.cols());
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const int src = perm[i];
    if (src < 0 || src >= outcomes() || seen[src]) throw_invalid("not a permutation");
    seen[src] = true;
    out.row(i) = coeffs_.row(src);
  }
  return Povm(std::move(out));
}

}  // namespace ptomo
