#include "ptomo/optimize.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <cmath>
#include <limits>
#include <memory>
#include <mutex>

#include "ptomo/error.hpp"

namespace ptomo {

namespace {

// GSL aborts on errors by default; every failure here is reported by status.
void disable_gsl_abort() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

struct VectorDeleter {
  void operator()(gsl_vector* v) const { gsl_vector_free(v); }
};
using GslVector = std::unique_ptr<gsl_vector, VectorDeleter>;

GslVector to_gsl(const RVector& x) {
  GslVector v(gsl_vector_alloc(static_cast<std::size_t>(x.size())));
  if (!v) throw_numerical("gsl_vector_alloc failed");
  for (Eigen::Index i = 0; i < x.size(); ++i) gsl_vector_set(v.get(), static_cast<std::size_t>(i), x(i));
  return v;
}

RVector from_gsl(const gsl_vector* v) {
  RVector x(static_cast<Eigen::Index>(v->size));
  for (std::size_t i = 0; i < v->size; ++i) x(static_cast<Eigen::Index>(i)) = gsl_vector_get(v, i);
  return x;
}

// Non-finite objective values are mapped to +inf so the minimizers back off.
double finite_or_inf(double v) { return std::isfinite(v) ? v : std::numeric_limits<double>::infinity(); }

struct MinimizeContext {
  const Objective* f;
  double step;
};

double neg_f(const gsl_vector* x, void* params) {
  const auto* ctx = static_cast<const MinimizeContext*>(params);
  return finite_or_inf(-(*ctx->f)(from_gsl(x)));
}

void neg_df(const gsl_vector* x, void* params, gsl_vector* g) {
  const auto* ctx = static_cast<const MinimizeContext*>(params);
  const RVector grad = central_gradient(*ctx->f, from_gsl(x), ctx->step);
  for (std::size_t i = 0; i < g->size; ++i) gsl_vector_set(g, i, -grad(static_cast<Eigen::Index>(i)));
}

void neg_fdf(const gsl_vector* x, void* params, double* value, gsl_vector* g) {
  *value = neg_f(x, params);
  neg_df(x, params, g);
}

double plain_f(const gsl_vector* x, void* params) {
  return finite_or_inf((*static_cast<const Objective*>(params))(from_gsl(x)));
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, const RVector& x0, const NelderMeadOptions& opts) {
  disable_gsl_abort();
  const auto n = static_cast<std::size_t>(x0.size());
  if (n == 0) throw_invalid("nelder_mead: empty starting point");
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, n), &gsl_multimin_fminimizer_free);
  if (!s) throw_numerical("nelder_mead: allocation failed");
  gsl_multimin_function fn{&plain_f, n, const_cast<Objective*>(&f)};
  GslVector x = to_gsl(x0);
  GslVector steps(gsl_vector_alloc(n));
  gsl_vector_set_all(steps.get(), opts.initial_step);
  if (gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), steps.get()) != GSL_SUCCESS) {
    throw_numerical("nelder_mead: initialization failed");
  }

  NelderMeadResult res;
  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    // Characteristic simplex size: mean vertex distance from the centroid.
    if (gsl_multimin_fminimizer_size(s.get()) < opts.diameter_tolerance) {
      res.converged = true;
      break;
    }
    if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS) break;
  }
  res.x = from_gsl(gsl_multimin_fminimizer_x(s.get()));
  res.value = gsl_multimin_fminimizer_minimum(s.get());
  return res;
}

RVector central_gradient(const Objective& f, const RVector& x, double step) {
  RVector g(x.size());
  RVector xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    xp(i) = x(i) + step;
    const double fp = f(xp);
    xp(i) = x(i) - step;
    const double fm = f(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * step);
  }
  return g;
}

BfgsResult bfgs_maximize(const Objective& f, const RVector& x0, const BfgsOptions& opts) {
  disable_gsl_abort();
  const auto n = static_cast<std::size_t>(x0.size());
  if (n == 0) throw_invalid("bfgs_maximize: empty starting point");
  std::unique_ptr<gsl_multimin_fdfminimizer, decltype(&gsl_multimin_fdfminimizer_free)> s(
      gsl_multimin_fdfminimizer_alloc(gsl_multimin_fdfminimizer_vector_bfgs2, n), &gsl_multimin_fdfminimizer_free);
  if (!s) throw_numerical("bfgs_maximize: allocation failed");
  MinimizeContext ctx{&f, opts.gradient_step};
  gsl_multimin_function_fdf fn{&neg_f, &neg_df, &neg_fdf, n, &ctx};
  GslVector x = to_gsl(x0);
  // First trial step 0.01 and the line-search tolerance GSL recommends for bfgs2.
  if (gsl_multimin_fdfminimizer_set(s.get(), &fn, x.get(), 0.01, 0.1) != GSL_SUCCESS) {
    throw_numerical("bfgs_maximize: initialization failed");
  }

  BfgsResult res;
  double fx = -gsl_multimin_fdfminimizer_minimum(s.get());
  res.history.push_back(fx);
  for (res.iterations = 0; res.iterations < opts.max_iterations; ++res.iterations) {
    if (gsl_multimin_test_gradient(gsl_multimin_fdfminimizer_gradient(s.get()), opts.gradient_tolerance) ==
        GSL_SUCCESS) {
      res.converged = true;
      break;
    }
    const int status = gsl_multimin_fdfminimizer_iterate(s.get());
    if (status == GSL_ENOPROG) {
      // No further ascent at the resolution of the numerical gradient.
      res.converged = true;
      break;
    }
    if (status != GSL_SUCCESS) break;
    const double fn_value = -gsl_multimin_fdfminimizer_minimum(s.get());
    const double change = fn_value - fx;
    fx = fn_value;
    res.history.push_back(fx);
    if (std::abs(change) < opts.value_tolerance &&
        gsl_multimin_test_gradient(gsl_multimin_fdfminimizer_gradient(s.get()), 100.0 * opts.gradient_tolerance) ==
            GSL_SUCCESS) {
      res.converged = true;
      ++res.iterations;
      break;
    }
  }
  res.x = from_gsl(gsl_multimin_fdfminimizer_x(s.get()));
  res.value = fx;
  return res;
}

}  // namespace ptomo
