#include "ptomo/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ptomo/error.hpp"
#include "ptomo/povm.hpp"

namespace ptomo {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "invalid input";
    case ErrorKind::kDegenerateInput: return "degenerate input";
    case ErrorKind::kNumerical: return "numerical error";
    case ErrorKind::kInternalConsistency: return "internal consistency error";
    case ErrorKind::kIo: return "i/o error";
  }
  return "unknown error";
}

namespace {

bool all_finite(const CVector& v) {
  for (const cplx& z : v) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

}  // namespace

StateVector::StateVector(CVector amps) : amps_(std::move(amps)) {
  if (amps_.size() < 2) throw_invalid("state dimension must be at least 2");
  if (!all_finite(amps_)) throw_invalid("state amplitudes must be finite");
  if (std::abs(amps_.norm() - 1.0) > 1e-12) throw_invalid("state vector is not normalized");
}

StateVector StateVector::normalized(CVector amps) {
  if (!all_finite(amps)) throw_invalid("state amplitudes must be finite");
  const double n = amps.norm();
  if (n == 0.0) throw_invalid("cannot normalize the zero vector");
  return StateVector(amps / n);
}

StateVector StateVector::basis(int dim, int index) {
  if (index < 0 || index >= dim) throw_invalid("basis index out of range");
  CVector v = CVector::Zero(dim);
  v(index) = 1.0;
  return StateVector(std::move(v));
}

LocalParameters::LocalParameters(CVector theta) : theta_(std::move(theta)) {
  if (theta_.size() < 1) throw_invalid("local parameters need at least one component");
  if (!all_finite(theta_)) throw_invalid("local parameters must be finite");
}

LocalParameters LocalParameters::zero(int dim) {
  if (dim < 2) throw_invalid("dimension must be at least 2");
  return LocalParameters(CVector::Zero(dim - 1));
}

LocalParameters LocalParameters::from_real(const RVector& x) {
  if (x.size() % 2 != 0 || x.size() == 0) throw_invalid("real packing needs an even, nonzero length");
  const auto m = x.size() / 2;
  CVector t(m);
  for (Eigen::Index k = 0; k < m; ++k) t(k) = cplx(x(k), x(m + k));
  return LocalParameters(std::move(t));
}

RVector LocalParameters::to_real() const {
  const auto m = theta_.size();
  RVector x(2 * m);
  x.head(m) = theta_.real();
  x.tail(m) = theta_.imag();
  return x;
}

DensityMatrix::DensityMatrix(CMat mat) : mat_(std::move(mat)) {
  if (mat_.rows() != mat_.cols() || mat_.rows() < 2) throw_invalid("density matrix must be square, d >= 2");
  if (hermiticity_error(mat_) > 1e-12) throw_invalid("density matrix is not Hermitian");
  if (std::abs(mat_.trace() - cplx(1.0)) > 1e-12) throw_invalid("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<CMat> eig(mat_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10) throw_invalid("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  return DensityMatrix(psi.amps() * psi.amps().adjoint());
}

StateVector neighborhood_state(const LocalParameters& theta) {
  CVector v(theta.dim());
  v(0) = 1.0;
  v.tail(theta.size()) = theta.theta();
  return StateVector(v / v.norm());
}

StateVector equal_shift_state(double theta_scalar, int dim) {
  if (!(theta_scalar >= 0.0) || !std::isfinite(theta_scalar)) {
    throw_invalid("theta must be a finite non-negative number");
  }
  return neighborhood_state(LocalParameters(CVector::Constant(dim - 1, std::sqrt(theta_scalar))));
}

DensityMatrix depolarize(const StateVector& psi, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw_invalid("lambda must lie in [0, 1]");
  const int d = psi.dim();
  CMat rho = lambda * (psi.amps() * psi.amps().adjoint());
  rho.diagonal().array() += (1.0 - lambda) / d;
  // Exact Hermitian symmetrization; rounding in the outer product is all
  // that is removed here.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho));
}

double fidelity(const StateVector& psi, const DensityMatrix& rho) {
  if (psi.dim() != rho.dim()) throw_invalid("fidelity: dimension mismatch");
  const cplx f = psi.amps().dot(rho.mat() * psi.amps());
  return std::clamp(f.real(), 0.0, 1.0);
}

double infidelity(const StateVector& psi, const DensityMatrix& rho) { return 1.0 - fidelity(psi, rho); }

std::vector<double> born_probabilities(const Povm& povm, const DensityMatrix& rho) {
  if (povm.dim() != rho.dim()) throw_invalid("born_probabilities: dimension mismatch");
  const CMat& a = povm.coefficients();
  const CMat ra = a.conjugate() * rho.mat();
  std::vector<double> p(povm.outcomes());
  for (int eta = 0; eta < povm.outcomes(); ++eta) {
    const double v = ra.row(eta).cwiseProduct(a.row(eta)).sum().real();
    if (v < -1e-10) {
      throw Error(ErrorKind::kInternalConsistency, "negative outcome probability " + std::to_string(v));
    }
    p[eta] = std::max(v, 0.0);
  }
  return p;
}

std::vector<double> born_probabilities(const Povm& povm, const StateVector& psi) {
  if (povm.dim() != psi.dim()) throw_invalid("born_probabilities: dimension mismatch");
  const CVector amp = povm.coefficients().conjugate() * psi.amps();
  std::vector<double> p(povm.outcomes());
  for (int eta = 0; eta < povm.outcomes(); ++eta) p[eta] = std::norm(amp(eta));
  return p;
}

}  // namespace ptomo
