#pragma once

// Local pure-state maximum likelihood over the theta chart, bootstrap
// spreads of the resulting infidelity, and log-log power-law fits.

#include <cstdint>
#include <optional>
#include <span>
#include <random>
#include <vector>

#include "ptomo/povm.hpp"
#include "ptomo/qstate.hpp"

namespace ptomo {

inline constexpr double kProbabilityFloor = 1e-12;
// Maxima whose per-shot log-likelihoods differ by less than this are ties.
inline constexpr double kLikelihoodTieTolerance = 1e-9;

struct MleConfig {
  int max_iterations = 500;
  double tolerance = 1e-10;  // on the per-shot log-likelihood change
  int starts = 8;            // random starts with |theta_j| <= start_radius, plus theta = 0
  double start_radius = 0.3;
  std::uint64_t seed = 0x6d6c65;
  // Maxima whose likelihood-ratio statistic 2 N (L_best - L) is below this
  // value are statistically tied; the one closest to theta = 0 is returned.
  double tie_statistic = 3.84;
};

struct MleResult {
  LocalParameters theta;
  StateVector state;
  double log_likelihood = 0.0;  // sum_w freq_w ln f_w, frequencies normalized
  int best_start = 0;
  std::vector<std::vector<double>> histories;  // one ascent trace per start
};

// Mean per-shot log-likelihood sum_w (n_w / N) ln max(f_w(theta), floor).
double log_likelihood(std::span<const double> frequencies, const Povm& povm,
                      const LocalParameters& theta);

// `counts` may be fractional (exact expected frequencies scaled by N); their
// total sets the resolution at which maxima are considered tied. Throws
// kInvalidInput if lengths mismatch or no count is positive. A warm start,
// when given, is tried in addition to the configured starts.
MleResult estimate_state_detailed(std::span<const double> counts, const Povm& povm,
                                  const MleConfig& cfg = {},
                                  const std::optional<LocalParameters>& warm_start = std::nullopt);
StateVector estimate_state(std::span<const double> counts, const Povm& povm,
                           const MleConfig& cfg = {});
StateVector estimate_state(std::span<const std::int64_t> counts, const Povm& povm,
                           const MleConfig& cfg = {});

struct BootstrapResult {
  double low = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double high = 0.0;
  int replicas = 0;
  // Single populated outcome: every replica equals the original counts.
  bool degenerate = false;
};

// Resamples counts multinomially from the empirical frequencies, re-estimates
// and scores each replica against `reference`. Requires n_boot >= 10.
BootstrapResult bootstrap_infidelity(std::span<const std::int64_t> counts, const Povm& povm,
                                     const DensityMatrix& reference, int n_boot, std::mt19937_64& rng,
                                     const MleConfig& cfg = {});

// Linear-interpolation quantile of unsorted values, q in [0, 1].
double quantile(std::vector<double> values, double q);

struct PowerLawPoint {
  double n = 0.0;
  double infidelity = 0.0;
};

struct FitResult {
  double coefficient = 0.0;  // c in c * N^p
  double exponent = 0.0;     // p
  double residual = 0.0;     // RMS of log residuals
  int excluded_zero_points = 0;
};

FitResult fit_power_law(std::span<const PowerLawPoint> points);

}  // namespace ptomo
