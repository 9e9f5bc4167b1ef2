#pragma once

#include <complex>

#include <Eigen/Dense>

namespace ptomo {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Largest singular value.
double spectral_norm(const CMat& m);
double frobenius_norm(const CMat& m);

// Nearest unitary in any unitarily invariant norm (U = W V^H from the SVD).
CMat polar_unitary(const CMat& m);

double max_abs(const CMat& m);
double hermiticity_error(const CMat& m);
double symmetry_error(const CMat& m);

// H^{p} for Hermitian positive-definite H.
CMat hermitian_power(const CMat& h, double p);

// 2(m)x2(m) block matrix [[A, B], [conj(B), conj(A)]].
CMat assemble_complex_blocks(const CMat& a, const CMat& b);

}  // namespace ptomo
