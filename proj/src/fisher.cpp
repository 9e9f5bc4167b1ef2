#include "ptomo/fisher.hpp"

#include <cmath>

#include "ptomo/error.hpp"

namespace ptomo {

const char* to_string(NormKind kind) {
  return kind == NormKind::kSpectral ? "spectral" : "frobenius";
}

NormKind parse_norm_kind(const std::string& name) {
  if (name == "spectral") return NormKind::kSpectral;
  if (name == "frobenius") return NormKind::kFrobenius;
  throw_invalid("unknown norm kind '" + name + "' (expected spectral or frobenius)");
}

bool FisherBlocks::satisfies_invariants() const {
  if (hermiticity_error(hermitian) > 1e-10) return false;
  if (symmetry_error(symmetric) > 1e-10) return false;
  Eigen::SelfAdjointEigenSolver<CMat> eig(assembled(), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().minCoeff() >= -1e-9;
}

double matrix_norm(const CMat& m, NormKind kind) {
  return kind == NormKind::kSpectral ? spectral_norm(m) : frobenius_norm(m);
}

double CMatrix::norm() const { return matrix_norm(mat, norm_kind); }

FisherBlocks qfim_pure(const LocalParameters& theta) {
  const int m = theta.size();
  const int d = theta.dim();
  CVector v(d);
  v(0) = 1.0;
  v.tail(m) = theta.theta();
  const double n = v.norm();
  const CVector psi = v / n;
  const CMat proj = CMat::Identity(d, d) - psi * psi.adjoint();

  // Wirtinger derivatives of psi = v / |v|; only |v| depends on conj(theta).
  std::vector<CVector> d_theta(m), d_theta_conj(m);
  for (int k = 0; k < m; ++k) {
    CVector ek = CVector::Zero(d);
    ek(k + 1) = 1.0;
    d_theta[k] = ek / n - v * (std::conj(theta.theta()(k)) / (2.0 * n * n * n));
    d_theta_conj[k] = -v * (theta.theta()(k) / (2.0 * n * n * n));
  }

  // <d_{theta_j^*} psi| is the bra of d_{theta_j} psi, and vice versa.
  FisherBlocks out{CMat(m, m), CMat(m, m)};
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      out.hermitian(j, k) = 2.0 * (d_theta[j].dot(proj * d_theta[k]) +
                                   d_theta_conj[k].dot(proj * d_theta_conj[j]));
      out.symmetric(j, k) = 2.0 * (d_theta[j].dot(proj * d_theta_conj[k]) +
                                   d_theta[k].dot(proj * d_theta_conj[j]));
    }
  }
  return out;
}

CMat c_matrix_from_coefficients(const CMat& a) {
  const auto m = a.cols() - 1;
  const CMat tail = a.rightCols(m);
  return tail.transpose() * tail;
}

namespace {

void require_complete(const Povm& povm) {
  if (!povm.is_complete(1e-6)) {
    throw_invalid("POVM completeness violated (deviation " + std::to_string(povm.completeness_deviation()) + ")");
  }
}

}  // namespace

CMatrix c_matrix(const Povm& povm, NormKind kind) {
  require_complete(povm);
  CMat c = c_matrix_from_coefficients(povm.coefficients());
  // Symmetric by construction; remove rounding asymmetry.
  c = 0.5 * (c + c.transpose()).eval();
  return CMatrix{std::move(c), kind};
}

double c_norm(const Povm& povm, NormKind kind) { return c_matrix(povm, kind).norm(); }

FisherBlocks cfim_first_order(const Povm& povm) {
  require_complete(povm);
  const CMat& a = povm.coefficients();
  const auto m = a.cols() - 1;
  const CMat tail = a.rightCols(m);
  FisherBlocks out;
  out.hermitian = tail.transpose() * tail.conjugate();
  out.symmetric = c_matrix(povm).mat;
  return out;
}

FisherBlocks cfim_numeric(const Povm& povm, const LocalParameters& theta, double step) {
  if (!(step > 0.0 && step <= 1e-3)) throw_invalid("cfim_numeric: step must lie in (0, 1e-3]");
  if (povm.dim() != theta.dim()) throw_invalid("cfim_numeric: dimension mismatch");
  const int m = theta.size();
  const int n_out = povm.outcomes();
  const CMat abar = povm.coefficients().conjugate();

  auto log_probs = [&](const CVector& t) {
    CVector v(m + 1);
    v(0) = 1.0;
    v.tail(m) = t;
    const CVector amp = abar * (v / v.norm());
    RVector lp(n_out);
    for (int w = 0; w < n_out; ++w) lp(w) = std::log(std::max(std::norm(amp(w)), 1e-300));
    return lp;
  };

  const RVector lp0 = log_probs(theta.theta());
  std::vector<int> kept;
  for (int w = 0; w < n_out; ++w) {
    if (std::exp(lp0(w)) >= 1e-12) kept.push_back(w);
  }
  if (kept.empty()) throw_degenerate("cfim_numeric: every outcome is below the probability floor");

  // Fourth-order central differences of ln f along Re and Im of each theta_k.
  auto derivative = [&](const CVector& dir) {
    const CVector& t = theta.theta();
    return RVector((-log_probs(t + 2.0 * step * dir) + 8.0 * log_probs(t + step * dir) -
                    8.0 * log_probs(t - step * dir) + log_probs(t - 2.0 * step * dir)) /
                   (12.0 * step));
  };
  CMat score(m, n_out);       // d ln f / d theta_k
  CMat score_conj(m, n_out);  // d ln f / d conj(theta_k)
  for (int k = 0; k < m; ++k) {
    CVector dir = CVector::Zero(m);
    dir(k) = 1.0;
    const RVector dx = derivative(dir);
    dir(k) = cplx(0.0, 1.0);
    const RVector dy = derivative(dir);
    for (int w = 0; w < n_out; ++w) {
      score(k, w) = 0.5 * cplx(dx(w), -dy(w));
      score_conj(k, w) = 0.5 * cplx(dx(w), dy(w));
    }
  }

  FisherBlocks out{CMat::Zero(m, m), CMat::Zero(m, m)};
  for (int w : kept) {
    const double f = std::exp(lp0(w));
    out.hermitian += f * score_conj.col(w) * score.col(w).transpose();
    out.symmetric += f * score_conj.col(w) * score_conj.col(w).transpose();
  }
  return out;
}

double gill_massar_wmse(int dim, long long n_exp) {
  if (dim < 2 || n_exp < 1) throw_invalid("gill_massar_wmse needs d >= 2 and n_exp >= 1");
  return static_cast<double>(dim - 1) / static_cast<double>(n_exp);
}

double gm_inequality_lhs(const FisherBlocks& cfim, const FisherBlocks& qfim) {
  if (cfim.size() != qfim.size()) throw_invalid("gm_inequality_lhs: block size mismatch");
  const CMat jhat = qfim.assembled();
  Eigen::SelfAdjointEigenSolver<CMat> eig(jhat, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo >= 1e12) throw_numerical("gm_inequality_lhs: QFIM is singular");
  return (cfim.assembled() * jhat.inverse()).trace().real();
}

double gill_massar_weighted_wmse(const CMat& qfim_assembled, const CMat& weight, int dim, long long n_exp) {
  if (dim < 2 || n_exp < 1) throw_invalid("gill_massar_weighted_wmse needs d >= 2 and n_exp >= 1");
  const CMat jm = hermitian_power(qfim_assembled, -0.5);
  const CMat inner = jm * weight * jm;
  const double tr = hermitian_power(0.5 * (inner + inner.adjoint()), 0.5).trace().real();
  return tr * tr / (static_cast<double>(dim - 1) * static_cast<double>(n_exp));
}

CMat gill_massar_optimal_cfim(const CMat& qfim_assembled, const CMat& weight, int dim) {
  const CMat jp = hermitian_power(qfim_assembled, 0.5);
  const CMat jm = hermitian_power(qfim_assembled, -0.5);
  const CMat inner = jm * weight * jm;
  const CMat root = hermitian_power(0.5 * (inner + inner.adjoint()), 0.5);
  return static_cast<double>(dim - 1) * jp * (root / root.trace().real()) * jp;
}

}  // namespace ptomo
