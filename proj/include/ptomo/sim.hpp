#pragma once

// Finite-ensemble measurement simulation and infidelity-vs-N sweeps.

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "ptomo/estimator.hpp"
#include "ptomo/povm.hpp"
#include "ptomo/qstate.hpp"

namespace ptomo {

struct NoiseConfig {
  double lambda = 1.0;              // depolarizing weight
  double systematic_epsilon = 0.0;  // strength of the effect misalignment
  std::uint64_t seed = 0;           // draws the misalignment generator
};

// Multinomial draw of n shots. Probabilities must be >= 0 and sum to 1
// within 1e-9.
std::vector<std::int64_t> sample_counts(std::span<const double> probs, std::int64_t n,
                                        std::mt19937_64& rng);

// Hermitian d x d generator with unit spectral norm, GUE-distributed before
// normalization.
CMat random_hermitian_generator(int dim, std::mt19937_64& rng);

// a^eta -> exp(i epsilon H) a^eta for all effects, then phases re-fixed.
Povm perturb_effects(const Povm& povm, double epsilon, const CMat& generator);
Povm perturb_effects(const Povm& povm, double epsilon, std::mt19937_64& rng);

struct TrialResult {
  std::int64_t n = 0;
  std::vector<std::int64_t> counts;
  StateVector estimate = StateVector::basis(2, 0);
  double infidelity = 0.0;
};

// Counts are sampled from `measured` while the estimator models `model`;
// these coincide unless a systematic misalignment is simulated.
TrialResult run_trial(const DensityMatrix& state, const Povm& measured, const Povm& model,
                      std::int64_t n, std::mt19937_64& rng, const MleConfig& mle = {});
TrialResult run_trial(const DensityMatrix& state, const Povm& povm, std::int64_t n,
                      std::mt19937_64& rng, const MleConfig& mle = {});

struct SweepConfig {
  double theta_scalar = 0.01;
  std::vector<std::int64_t> n_grid;
  int repetitions = 1;
  NoiseConfig noise;
  Povm povm = Povm::computational_basis(4);
  std::string povm_label;  // provenance, e.g. "u7:4567"
  int bootstrap_replicas = 0;  // 0 disables; otherwise >= 10
  MleConfig mle;
  std::uint64_t seed = 0;
  int workers = 0;  // 0 = hardware concurrency

  void validate() const;
  // Canonical text of every field that affects the results.
  std::string canonical_text() const;
};

struct SweepRow {
  std::int64_t n = 0;
  int trial = 0;
  double infidelity = 0.0;
  BootstrapResult boot;
};

struct SweepResult {
  std::vector<SweepRow> rows;  // sorted by (n, trial)
  std::string config_hash;
  std::uint64_t seed = 0;
  bool aborted = false;
  std::string abort_reason;
};

struct SweepSummary {
  std::int64_t n = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  int trials = 0;
};

// Trial (n, t) draws from derive_stream(seed, {n, t}), so results are
// identical for any worker count.
SweepResult run_sweep(const SweepConfig& cfg);

std::vector<SweepSummary> summarize(const SweepResult& result);

// 1 - fidelity of the estimate obtained from exact expected frequencies:
// the infidelity approached as N grows without bound.
double asymptotic_infidelity(const DensityMatrix& state, const Povm& measured, const Povm& model,
                             const MleConfig& mle = {});

}  // namespace ptomo
