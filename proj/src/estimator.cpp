#include "ptomo/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ptomo/error.hpp"
#include "ptomo/optimize.hpp"
#include "ptomo/sim.hpp"

namespace ptomo {

namespace {

constexpr int kRefineIterations = 30;

// Likelihood evaluator over the packed real coordinates (Re theta, Im theta).
class LikelihoodModel {
 public:
  LikelihoodModel(std::span<const double> freqs, const Povm& povm)
      : abar_(povm.coefficients().conjugate()), freqs_(freqs.begin(), freqs.end()), m_(povm.dim() - 1) {}

  double operator()(const RVector& x) const {
    CVector v(m_ + 1);
    v(0) = 1.0;
    for (int k = 0; k < m_; ++k) v(k + 1) = cplx(x(k), x(m_ + k));
    const CVector amp = abar_ * v;
    const double norm2 = v.squaredNorm();
    double ll = 0.0;
    for (std::size_t w = 0; w < freqs_.size(); ++w) {
      if (freqs_[w] == 0.0) continue;
      ll += freqs_[w] * std::log(std::max(std::norm(amp(w)) / norm2, kProbabilityFloor));
    }
    return ll;
  }

  // Fisher-scoring refinement of a BFGS maximum. The likelihood is quadratically
  // flat at its maximum, so along weakly identified directions a likelihood
  // ascent stalls long before the score vanishes; this works on f - p directly.
  // Steps solve J dx = r with J_wk = dp_w/dx_k / sqrt(p_w), r_w = (f_w - p_w) / sqrt(p_w)
  // (J^T r is the score, J^T J the Fisher information). A step is kept when it
  // lowers |J^T r| and the likelihood does not drop by more than rounding.
  RVector refine(const RVector& x0, int max_iterations) const {
    RVector x = x0;
    double ll = (*this)(x);
    RVector score;
    Eigen::MatrixXd jac;
    RVector res;
    if (!linearize(x, jac, res)) return x;
    score = jac.transpose() * res;
    for (int it = 0; it < max_iterations; ++it) {
      const RVector step = jac.colPivHouseholderQr().solve(res);
      if (!step.allFinite() || step.norm() < 1e-15) break;
      bool accepted = false;
      for (double scale = 1.0; scale > 1e-6; scale *= 0.5) {
        const RVector trial = x + scale * step;
        const double trial_ll = (*this)(trial);
        Eigen::MatrixXd trial_jac;
        RVector trial_res;
        if (!std::isfinite(trial_ll) || trial_ll < ll - kRefineSlack * std::max(1.0, std::abs(ll)) ||
            !linearize(trial, trial_jac, trial_res)) {
          continue;
        }
        const RVector trial_score = trial_jac.transpose() * trial_res;
        if (trial_score.norm() >= score.norm()) continue;
        x = trial;
        ll = trial_ll;
        jac = std::move(trial_jac);
        res = std::move(trial_res);
        score = trial_score;
        accepted = true;
        break;
      }
      if (!accepted) break;
    }
    return x;
  }

 private:
  // Rounding allowance on the likelihood for a refinement step.
  static constexpr double kRefineSlack = 64.0 * std::numeric_limits<double>::epsilon();

  // Weighted Jacobian and residual at x; false if some outcome probability
  // falls below the floor, where the weights are undefined.
  bool linearize(const RVector& x, Eigen::MatrixXd& jac, RVector& res) const {
    CVector v(m_ + 1);
    v(0) = 1.0;
    for (int k = 0; k < m_; ++k) v(k + 1) = cplx(x(k), x(m_ + k));
    const CVector amp = abar_ * v;
    const double norm2 = v.squaredNorm();
    const auto outcomes = static_cast<Eigen::Index>(freqs_.size());
    jac.resize(outcomes, 2 * m_);
    res.resize(outcomes);
    for (Eigen::Index w = 0; w < outcomes; ++w) {
      const double p = std::norm(amp(w)) / norm2;
      if (p < kProbabilityFloor) return false;
      const double sq = std::sqrt(p);
      res(w) = (freqs_[static_cast<std::size_t>(w)] - p) / sq;
      for (int k = 0; k < m_; ++k) {
        // d|amp|^2 = 2 Re(conj(amp) d amp), with d amp = A_k for Re v_k and i A_k for Im v_k.
        const cplx col = abar_(w, k + 1);
        const double d_re = 2.0 * std::real(std::conj(amp(w)) * col);
        const double d_im = 2.0 * std::real(std::conj(amp(w)) * cplx(0.0, 1.0) * col);
        jac(w, k) = (d_re - p * 2.0 * v(k + 1).real()) / norm2 / sq;
        jac(w, m_ + k) = (d_im - p * 2.0 * v(k + 1).imag()) / norm2 / sq;
      }
    }
    return true;
  }


  CMat abar_;
  std::vector<double> freqs_;
  int m_;
};

std::vector<double> normalized_frequencies(std::span<const double> counts, const Povm& povm) {
  if (static_cast<int>(counts.size()) != povm.outcomes()) {
    throw_invalid("counts length " + std::to_string(counts.size()) + " does not match " +
                  std::to_string(povm.outcomes()) + " POVM outcomes");
  }
  double total = 0.0;
  for (double c : counts) {
    if (!std::isfinite(c) || c < 0.0) throw_invalid("counts must be finite and non-negative");
    total += c;
  }
  if (!(total > 0.0)) throw_invalid("at least one count must be positive");
  std::vector<double> f(counts.begin(), counts.end());
  for (double& x : f) x /= total;
  return f;
}

std::vector<double> to_double(std::span<const std::int64_t> counts) {
  std::vector<double> out(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < 0) throw_invalid("counts must be non-negative");
    out[i] = static_cast<double>(counts[i]);
  }
  return out;
}

}  // namespace

double log_likelihood(std::span<const double> frequencies, const Povm& povm, const LocalParameters& theta) {
  if (theta.dim() != povm.dim()) throw_invalid("log_likelihood: dimension mismatch");
  const std::vector<double> f = normalized_frequencies(frequencies, povm);
  return LikelihoodModel(f, povm)(theta.to_real());
}

MleResult estimate_state_detailed(std::span<const double> counts, const Povm& povm, const MleConfig& cfg,
                                  const std::optional<LocalParameters>& warm_start) {
  if (!(cfg.tolerance > 0.0) || cfg.starts < 1 || cfg.max_iterations < 1 || !(cfg.tie_statistic >= 0.0)) {
    throw_invalid("MLE config needs tolerance > 0, starts >= 1, max_iterations >= 1 and tie_statistic >= 0");
  }
  double shots = 0.0;
  for (double c : counts) shots += c;
  const std::vector<double> freqs = normalized_frequencies(counts, povm);
  const LikelihoodModel model(freqs, povm);
  const int m = povm.dim() - 1;

  std::vector<RVector> starts;
  if (warm_start) {
    if (warm_start->dim() != povm.dim()) throw_invalid("warm start dimension mismatch");
    starts.push_back(warm_start->to_real());
  }
  starts.push_back(RVector::Zero(2 * m));
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int s = 0; s < cfg.starts; ++s) {
    RVector x(2 * m);
    for (int k = 0; k < m; ++k) {
      // Uniform on the disk |theta_k| <= radius.
      const double r = cfg.start_radius * std::sqrt(uni(rng));
      const double phi = 2.0 * std::numbers::pi * uni(rng);
      x(k) = r * std::cos(phi);
      x(m + k) = r * std::sin(phi);
    }
    starts.push_back(std::move(x));
  }

  BfgsOptions opts;
  opts.max_iterations = cfg.max_iterations;
  opts.value_tolerance = cfg.tolerance;
  opts.gradient_tolerance = 1e-10;
  std::vector<std::vector<double>> histories;
  std::vector<BfgsResult> results;
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < starts.size(); ++s) {
    BfgsResult r = bfgs_maximize(model, starts[s], opts);
    r.x = model.refine(r.x, kRefineIterations);
    r.value = model(r.x);
    top = std::max(top, r.value);
    histories.push_back(r.history);
    results.push_back(std::move(r));
  }
  // With 2d-1 outcomes the frequencies are usually fitted exactly by several
  // distinct states, so maxima tie. Maxima closer than the likelihood-ratio
  // resolution of the sample are treated as tied, and since the state is known
  // to lie near |0>, the tied maximum closest to the fiducial state wins.
  const double tie = std::max(kLikelihoodTieTolerance, cfg.tie_statistic / (2.0 * shots));
  RVector best_x;
  double best_ll = top;
  int best_start = -1;
  for (std::size_t s = 0; s < results.size(); ++s) {
    if (results[s].value < top - tie) continue;
    if (best_start < 0 || results[s].x.squaredNorm() < best_x.squaredNorm()) {
      best_x = results[s].x;
      best_ll = results[s].value;
      best_start = static_cast<int>(s);
    }
  }
  LocalParameters theta = LocalParameters::from_real(best_x);
  StateVector state = neighborhood_state(theta);
  return MleResult{std::move(theta), std::move(state), best_ll, best_start, std::move(histories)};
}

StateVector estimate_state(std::span<const double> counts, const Povm& povm, const MleConfig& cfg) {
  return estimate_state_detailed(counts, povm, cfg).state;
}

StateVector estimate_state(std::span<const std::int64_t> counts, const Povm& povm, const MleConfig& cfg) {
  const std::vector<double> c = to_double(counts);
  return estimate_state(std::span<const double>(c), povm, cfg);
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw_invalid("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw_invalid("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BootstrapResult bootstrap_infidelity(std::span<const std::int64_t> counts, const Povm& povm,
                                     const DensityMatrix& reference, int n_boot, std::mt19937_64& rng,
                                     const MleConfig& cfg) {
  if (n_boot < 10) throw_invalid("bootstrap needs at least 10 replicas");
  if (reference.dim() != povm.dim()) throw_invalid("bootstrap: reference dimension mismatch");
  const std::vector<double> c = to_double(counts);
  const MleResult point = estimate_state_detailed(c, povm, cfg);
  const int populated = static_cast<int>(std::count_if(c.begin(), c.end(), [](double x) { return x > 0.0; }));

  BootstrapResult out;
  out.replicas = n_boot;
  if (populated <= 1) {
    const double v = infidelity(point.state, reference);
    out.low = out.q25 = out.median = out.q75 = out.high = v;
    out.degenerate = true;
    return out;
  }

  double total = 0.0;
  for (double x : c) total += x;
  std::vector<double> freqs(c);
  for (double& x : freqs) x /= total;
  const auto n = static_cast<std::int64_t>(total);

  // Replicas start from the point estimate plus a reduced random set.
  MleConfig replica_cfg = cfg;
  replica_cfg.starts = std::min(cfg.starts, 2);
  std::vector<double> values;
  values.reserve(n_boot);
  for (int b = 0; b < n_boot; ++b) {
    const std::vector<std::int64_t> resampled = sample_counts(freqs, n, rng);
    const std::vector<double> rc = to_double(resampled);
    const MleResult r = estimate_state_detailed(rc, povm, replica_cfg, point.theta);
    values.push_back(infidelity(r.state, reference));
  }
  out.low = *std::min_element(values.begin(), values.end());
  out.high = *std::max_element(values.begin(), values.end());
  out.q25 = quantile(values, 0.25);
  out.median = quantile(values, 0.5);
  out.q75 = quantile(values, 0.75);
  return out;
}

FitResult fit_power_law(std::span<const PowerLawPoint> points) {
  FitResult out;
  std::vector<double> xs, ys;
  for (const PowerLawPoint& p : points) {
    if (!(p.n > 0.0) || !std::isfinite(p.n)) throw_invalid("power-law fit: ensemble sizes must be positive");
    if (!std::isfinite(p.infidelity) || p.infidelity < 0.0) {
      throw_invalid("power-law fit: infidelities must be finite and non-negative");
    }
    if (p.infidelity == 0.0) {
      ++out.excluded_zero_points;
      continue;
    }
    xs.push_back(std::log(p.n));
    ys.push_back(std::log(p.infidelity));
  }
  if (xs.size() < 2) throw_invalid("power-law fit needs at least two positive points");
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw_degenerate("power-law fit needs at least two distinct ensemble sizes");
  out.exponent = sxy / sxx;
  const double intercept = my - out.exponent * mx;
  out.coefficient = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + out.exponent * xs[i]);
    ss += r * r;
  }
  out.residual = std::sqrt(ss / k);
  return out;
}

}  // namespace ptomo
