#include "ptomo/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "ptomo/error.hpp"

namespace ptomo {

double spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

double frobenius_norm(const CMat& m) { return m.norm(); }

CMat polar_unitary(const CMat& m) {
  Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double max_abs(const CMat& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double hermiticity_error(const CMat& m) { return max_abs(m - m.adjoint()); }

double symmetry_error(const CMat& m) { return max_abs(m - m.transpose()); }

CMat hermitian_power(const CMat& h, double p) {
  Eigen::SelfAdjointEigenSolver<CMat> eig(h);
  const RVector& w = eig.eigenvalues();
  if (w.minCoeff() <= 0.0) throw_numerical("hermitian_power: matrix is not positive definite");
  RVector wp = w.unaryExpr([p](double x) { return std::pow(x, p); });
  return eig.eigenvectors() * wp.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();
}

CMat assemble_complex_blocks(const CMat& a, const CMat& b) {
  const auto m = a.rows();
  CMat out(2 * m, 2 * m);
  out.topLeftCorner(m, m) = a;
  out.topRightCorner(m, m) = b;
  out.bottomLeftCorner(m, m) = b.conjugate();
  out.bottomRightCorner(m, m) = a.conjugate();
  return out;
}

}  // namespace ptomo
