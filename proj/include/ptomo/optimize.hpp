#pragma once

#include <functional>
#include <vector>

#include "ptomo/linalg.hpp"

namespace ptomo {

using Objective = std::function<double(const RVector&)>;

struct NelderMeadOptions {
  int max_iterations = 2000;
  double diameter_tolerance = 1e-8;
  double initial_step = 0.5;
};

struct NelderMeadResult {
  RVector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Minimizes f. Converged when the simplex diameter (max vertex distance
// from the best vertex) drops below the tolerance.
NelderMeadResult nelder_mead(const Objective& f, const RVector& x0, const NelderMeadOptions& opts = {});

struct BfgsOptions {
  int max_iterations = 500;
  double value_tolerance = 1e-10;
  double gradient_tolerance = 1e-8;
  double gradient_step = 1e-6;
};

struct BfgsResult {
  RVector x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  // Objective after each accepted step, starting with f(x0).
  std::vector<double> history;
};

RVector central_gradient(const Objective& f, const RVector& x, double step);

// Maximizes f with BFGS on central-difference gradients and a backtracking
// Armijo line search; every accepted step increases f.
BfgsResult bfgs_maximize(const Objective& f, const RVector& x0, const BfgsOptions& opts = {});

}  // namespace ptomo
