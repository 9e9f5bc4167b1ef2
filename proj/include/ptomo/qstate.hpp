#pragma once

// Pure and mixed qudit states around the fiducial basis vector |0>.

#include <vector>

#include "ptomo/linalg.hpp"

namespace ptomo {

class Povm;

class StateVector {
 public:
  // Rejects d < 2, non-finite entries and norms off by more than 1e-12.
  explicit StateVector(CVector amps);
  // Normalizes; rejects zero or non-finite input.
  static StateVector normalized(CVector amps);
  static StateVector basis(int dim, int index);

  int dim() const noexcept { return static_cast<int>(amps_.size()); }
  const CVector& amps() const noexcept { return amps_; }

 private:
  CVector amps_;
};

/// Complex coordinates theta_1..theta_{d-1} of a state near |0>.
class LocalParameters {
 public:
  explicit LocalParameters(CVector theta);
  static LocalParameters zero(int dim);
  // Packs (Re theta, Im theta) into a 2(d-1) real vector and back.
  static LocalParameters from_real(const RVector& x);
  RVector to_real() const;

  int dim() const noexcept { return static_cast<int>(theta_.size()) + 1; }
  int size() const noexcept { return static_cast<int>(theta_.size()); }
  const CVector& theta() const noexcept { return theta_; }

 private:
  CVector theta_;
};

class DensityMatrix {
 public:
  // Checks Hermiticity (1e-12), trace (1e-12) and eigenvalues (>= -1e-10).
  explicit DensityMatrix(CMat mat);
  static DensityMatrix pure(const StateVector& psi);

  int dim() const noexcept { return static_cast<int>(mat_.rows()); }
  const CMat& mat() const noexcept { return mat_; }

 private:
  CMat mat_;
};

// (|0> + sum_j theta_j |j>) / norm, exactly normalized.
StateVector neighborhood_state(const LocalParameters& theta);

// neighborhood_state with theta_j = sqrt(theta_scalar) on every direction.
StateVector equal_shift_state(double theta_scalar, int dim = 4);

// lambda |psi><psi| + (1 - lambda) I / d.
DensityMatrix depolarize(const StateVector& psi, double lambda);

// <psi|rho|psi>.
double fidelity(const StateVector& psi, const DensityMatrix& rho);
double infidelity(const StateVector& psi, const DensityMatrix& rho);

// p_eta = <a^eta|rho|a^eta>.
std::vector<double> born_probabilities(const Povm& povm, const DensityMatrix& rho);
std::vector<double> born_probabilities(const Povm& povm, const StateVector& psi);

}  // namespace ptomo
