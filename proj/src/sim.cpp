#include "ptomo/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <thread>

#include "ptomo/assets.hpp"
#include "ptomo/error.hpp"
#include "ptomo/matrix_io.hpp"
#include "ptomo/rng.hpp"

namespace ptomo {

namespace {
// Shot count attached to exact expected frequencies.
constexpr double kExactEnsemble = 1e15;
}  // namespace

std::vector<std::int64_t> sample_counts(std::span<const double> probs, std::int64_t n, std::mt19937_64& rng) {
  if (n < 0) throw_invalid("sample_counts: n must be non-negative");
  if (probs.empty()) throw_invalid("sample_counts: empty probability vector");
  double total = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p) || p < 0.0) throw_invalid("sample_counts: probabilities must be finite and non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw_invalid("sample_counts: probabilities must sum to 1");

  // Sequential conditional binomials.
  std::vector<std::int64_t> counts(probs.size(), 0);
  std::int64_t remaining = n;
  double mass = total;
  for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
    const double q = mass > 0.0 ? std::clamp(probs[i] / mass, 0.0, 1.0) : 0.0;
    std::binomial_distribution<std::int64_t> binom(remaining, q);
    counts[i] = q >= 1.0 ? remaining : binom(rng);
    remaining -= counts[i];
    mass -= probs[i];
  }
  counts.back() += remaining;
  return counts;
}

CMat random_hermitian_generator(int dim, std::mt19937_64& rng) {
  if (dim < 1) throw_invalid("generator dimension must be positive");
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat g(dim, dim);
  for (int c = 0; c < dim; ++c) {
    for (int r = 0; r < dim; ++r) g(r, c) = cplx(gauss(rng), gauss(rng));
  }
  CMat h = 0.5 * (g + g.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> eig(h, Eigen::EigenvaluesOnly);
  const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
  return h / scale;
}

Povm perturb_effects(const Povm& povm, double epsilon, const CMat& generator) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw_invalid("perturbation strength must be >= 0");
  if (generator.rows() != povm.dim() || generator.cols() != povm.dim()) {
    throw_invalid("perturbation generator dimension mismatch");
  }
  if (epsilon == 0.0) return povm;
  Eigen::SelfAdjointEigenSolver<CMat> eig(0.5 * (generator + generator.adjoint()));
  const CVector phases = (eig.eigenvalues() * epsilon).unaryExpr([](double x) { return std::polar(1.0, x); });
  const CMat v = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
  // a -> V a for each effect, i.e. rows A -> A V^T.
  return Povm(povm.coefficients() * v.transpose());
}

Povm perturb_effects(const Povm& povm, double epsilon, std::mt19937_64& rng) {
  return perturb_effects(povm, epsilon, random_hermitian_generator(povm.dim(), rng));
}

TrialResult run_trial(const DensityMatrix& state, const Povm& measured, const Povm& model, std::int64_t n,
                      std::mt19937_64& rng, const MleConfig& mle) {
  if (n < 0) throw_invalid("run_trial: ensemble size must be non-negative");
  if (state.dim() != measured.dim() || state.dim() != model.dim()) throw_invalid("run_trial: dimension mismatch");
  if (measured.outcomes() != model.outcomes()) throw_invalid("run_trial: outcome count mismatch");
  TrialResult out;
  out.n = n;
  if (n == 0) {
    out.counts.assign(measured.outcomes(), 0);
    out.estimate = StateVector::basis(state.dim(), 0);
  } else {
    const std::vector<double> p = born_probabilities(measured, state);
    out.counts = sample_counts(p, n, rng);
    out.estimate = estimate_state(std::span<const std::int64_t>(out.counts), model, mle);
  }
  out.infidelity = infidelity(out.estimate, state);
  return out;
}

TrialResult run_trial(const DensityMatrix& state, const Povm& povm, std::int64_t n, std::mt19937_64& rng,
                      const MleConfig& mle) {
  return run_trial(state, povm, povm, n, rng, mle);
}

void SweepConfig::validate() const {
  if (n_grid.empty()) throw_invalid("sweep needs at least one ensemble size");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw_invalid("ensemble sizes must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) throw_invalid("ensemble sizes must be strictly increasing");
  }
  if (repetitions < 1) throw_invalid("repetitions must be >= 1");
  if (!(noise.lambda >= 0.0 && noise.lambda <= 1.0)) throw_invalid("lambda must lie in [0, 1]");
  if (!(noise.systematic_epsilon >= 0.0)) throw_invalid("systematic epsilon must be >= 0");
  if (!(theta_scalar >= 0.0)) throw_invalid("theta must be >= 0");
  if (bootstrap_replicas != 0 && bootstrap_replicas < 10) throw_invalid("bootstrap replicas must be 0 or >= 10");
  if (workers < 0) throw_invalid("workers must be >= 0");
}

std::string SweepConfig::canonical_text() const {
  std::ostringstream os;
  char buf[64];
  auto num = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  os << "theta=" << num(theta_scalar) << '\n';
  os << "n_grid=";
  for (std::size_t i = 0; i < n_grid.size(); ++i) os << (i ? "," : "") << n_grid[i];
  os << "\nrepetitions=" << repetitions << '\n';
  os << "lambda=" << num(noise.lambda) << "\nepsilon=" << num(noise.systematic_epsilon)
     << "\nnoise_seed=" << noise.seed << '\n';
  os << "bootstrap=" << bootstrap_replicas << '\n';
  os << "mle=" << mle.max_iterations << ',' << num(mle.tolerance) << ',' << mle.starts << ','
     << num(mle.start_radius) << ',' << mle.seed << ',' << num(mle.tie_statistic) << '\n';
  os << "povm_label=" << povm_label << "\npovm=\n";
  write_matrix(os, povm.coefficients());
  return os.str();
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const int d = cfg.povm.dim();
  const DensityMatrix truth = depolarize(equal_shift_state(cfg.theta_scalar, d), cfg.noise.lambda);
  Povm measured = cfg.povm;
  if (cfg.noise.systematic_epsilon > 0.0) {
    std::mt19937_64 grng(cfg.noise.seed);
    measured = perturb_effects(cfg.povm, cfg.noise.systematic_epsilon, grng);
  }

  struct Item {
    std::int64_t n;
    int trial;
  };
  std::vector<Item> items;
  for (std::int64_t n : cfg.n_grid) {
    for (int t = 0; t < cfg.repetitions; ++t) items.push_back({n, t});
  }
  std::vector<SweepRow> rows(items.size());
  std::vector<char> done(items.size(), 0);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::mutex err_mu;
  std::size_t err_index = items.size();
  std::string err_msg;

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t i = next.fetch_add(1);
      if (i >= items.size()) return;
      const Item it = items[i];
      try {
        const auto un = static_cast<std::uint64_t>(it.n);
        const auto ut = static_cast<std::uint64_t>(it.trial);
        std::mt19937_64 rng = derive_stream(cfg.seed, {un, ut});
        const TrialResult tr = run_trial(truth, measured, cfg.povm, it.n, rng, cfg.mle);
        SweepRow row{it.n, it.trial, tr.infidelity, {}};
        if (cfg.bootstrap_replicas > 0) {
          std::mt19937_64 brng = derive_stream(cfg.seed, {un, ut, 0xb0075ULL});
          row.boot = bootstrap_infidelity(tr.counts, cfg.povm, truth, cfg.bootstrap_replicas, brng, cfg.mle);
        } else {
          row.boot.low = row.boot.q25 = row.boot.median = row.boot.q75 = row.boot.high = tr.infidelity;
        }
        rows[i] = row;
        done[i] = 1;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mu);
        if (i < err_index) {
          err_index = i;
          err_msg = "trial (N=" + std::to_string(it.n) + ", trial=" + std::to_string(it.trial) + "): " + e.what();
        }
        failed.store(true);
      }
    }
  };

  int nworkers = cfg.workers > 0 ? cfg.workers : static_cast<int>(std::thread::hardware_concurrency());
  nworkers = std::clamp(nworkers, 1, static_cast<int>(items.size()));
  if (nworkers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult out;
  out.seed = cfg.seed;
  out.config_hash = sha256_hex(cfg.canonical_text()).substr(0, 16);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (done[i]) out.rows.push_back(rows[i]);
  }
  if (failed.load()) {
    out.aborted = true;
    out.abort_reason = err_msg;
  }
  return out;
}

std::vector<SweepSummary> summarize(const SweepResult& result) {
  std::vector<SweepSummary> out;
  for (std::size_t i = 0; i < result.rows.size();) {
    std::size_t j = i;
    double sum = 0.0, sum_sq = 0.0;
    while (j < result.rows.size() && result.rows[j].n == result.rows[i].n) {
      sum += result.rows[j].infidelity;
      sum_sq += result.rows[j].infidelity * result.rows[j].infidelity;
      ++j;
    }
    SweepSummary s;
    s.n = result.rows[i].n;
    s.trials = static_cast<int>(j - i);
    s.mean = sum / s.trials;
    if (s.trials > 1) {
      const double var = std::max(0.0, (sum_sq - s.trials * s.mean * s.mean) / (s.trials - 1));
      s.standard_error = std::sqrt(var / s.trials);
    }
    out.push_back(s);
    i = j;
  }
  return out;
}

double asymptotic_infidelity(const DensityMatrix& state, const Povm& measured, const Povm& model,
                             const MleConfig& mle) {
  std::vector<double> p = born_probabilities(measured, state);
  for (double& x : p) x *= kExactEnsemble;
  const StateVector est = estimate_state(std::span<const double>(p), model, mle);
  return infidelity(est, state);
}

}  // namespace ptomo
