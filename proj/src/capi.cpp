// extern "C" wrapper over the C++ core. Every entry point converts
// exceptions into ptomo_status codes and records the message per thread.

#include "ptomo/ptomo.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "ptomo/assets.hpp"
#include "ptomo/design.hpp"
#include "ptomo/error.hpp"
#include "ptomo/estimator.hpp"
#include "ptomo/fisher.hpp"
#include "ptomo/matrix_io.hpp"
#include "ptomo/rng.hpp"
#include "ptomo/sim.hpp"

struct ptomo_device {
  ptomo::MbsDevice device;
};

struct ptomo_povm {
  ptomo::Povm povm;
};

struct ptomo_sweep {
  ptomo::SweepResult result;
  std::vector<ptomo::SweepSummary> stats;
};

namespace {

thread_local std::string g_last_error;

ptomo_status set_error(ptomo_status status, const char* message) {
  g_last_error = message ? message : "";
  return status;
}

ptomo_status status_for(ptomo::ErrorKind kind) {
  switch (kind) {
    case ptomo::ErrorKind::kInvalidInput: return PTOMO_ERR_INVALID_INPUT;
    case ptomo::ErrorKind::kDegenerateInput: return PTOMO_ERR_DEGENERATE_INPUT;
    case ptomo::ErrorKind::kNumerical: return PTOMO_ERR_NUMERICAL;
    case ptomo::ErrorKind::kInternalConsistency: return PTOMO_ERR_INTERNAL;
    case ptomo::ErrorKind::kIo: return PTOMO_ERR_IO;
  }
  return PTOMO_ERR_INTERNAL;
}

template <typename F>
ptomo_status guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return PTOMO_OK;
  } catch (const ptomo::Error& e) {
    return set_error(status_for(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(PTOMO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(PTOMO_ERR_INTERNAL, e.what());
  } catch (...) {
    return set_error(PTOMO_ERR_INTERNAL, "unknown exception");
  }
}

#define PTOMO_REQUIRE(ptr)                                                   \
  do {                                                                       \
    if ((ptr) == nullptr) return set_error(PTOMO_ERR_NULL_ARGUMENT, #ptr " is null"); \
  } while (0)

ptomo::CMat read_complex(const double* re_im, size_t rows, size_t cols) {
  ptomo::CMat m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < rows; ++r)
    for (size_t c = 0; c < cols; ++c) {
      size_t k = 2 * (r * cols + c);
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = {re_im[k], re_im[k + 1]};
    }
  return m;
}

void write_complex(const ptomo::CMat& m, double* re_im) {
  size_t cols = static_cast<size_t>(m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      size_t k = 2 * (static_cast<size_t>(r) * cols + static_cast<size_t>(c));
      re_im[k] = m(r, c).real();
      re_im[k + 1] = m(r, c).imag();
    }
}

ptomo::LocalParameters read_theta(const double* re_im, size_t count) {
  ptomo::CVector t(static_cast<Eigen::Index>(count));
  for (size_t j = 0; j < count; ++j) t(static_cast<Eigen::Index>(j)) = {re_im[2 * j], re_im[2 * j + 1]};
  return ptomo::LocalParameters(t);
}

std::vector<int> read_subset(const int* subset, size_t dim) { return std::vector<int>(subset, subset + dim); }

ptomo::MleConfig to_mle(const ptomo_mle_options* options) {
  ptomo::MleConfig cfg;
  if (options) {
    cfg.max_iterations = options->max_iterations;
    cfg.tolerance = options->tolerance;
    cfg.starts = options->starts;
    cfg.start_radius = options->start_radius;
    cfg.seed = options->seed;
    cfg.tie_statistic = options->tie_statistic;
  }
  return cfg;
}

ptomo::NormKind to_norm(ptomo_norm_kind kind) {
  switch (kind) {
    case PTOMO_NORM_SPECTRAL: return ptomo::NormKind::kSpectral;
    case PTOMO_NORM_FROBENIUS: return ptomo::NormKind::kFrobenius;
  }
  ptomo::throw_invalid("unknown norm kind");
}

void write_blocks(const ptomo::FisherBlocks& b, double* hermitian, double* symmetric) {
  if (hermitian) write_complex(b.hermitian, hermitian);
  if (symmetric) write_complex(b.symmetric, symmetric);
}

}  // namespace

extern "C" {

const char* ptomo_version(void) { return PTOMO_VERSION; }

const char* ptomo_last_error(void) { return g_last_error.c_str(); }

const char* ptomo_status_string(ptomo_status status) {
  switch (status) {
    case PTOMO_OK: return "ok";
    case PTOMO_ERR_INVALID_INPUT: return "invalid input";
    case PTOMO_ERR_DEGENERATE_INPUT: return "degenerate input";
    case PTOMO_ERR_NUMERICAL: return "numerical failure";
    case PTOMO_ERR_INTERNAL: return "internal consistency failure";
    case PTOMO_ERR_IO: return "i/o failure";
    case PTOMO_ERR_NULL_ARGUMENT: return "null argument";
    case PTOMO_ERR_BUFFER_TOO_SMALL: return "buffer too small";
  }
  return "unknown status";
}

// ---- devices ----------------------------------------------------------------

ptomo_status ptomo_device_from_matrix(const double* re_im, size_t ports, int reunitarize, ptomo_device** out) {
  PTOMO_REQUIRE(re_im);
  PTOMO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new ptomo_device{ptomo::load_mbs(read_complex(re_im, ports, ports), reunitarize != 0)};
  });
}

ptomo_status ptomo_device_load_file(const char* path, int reunitarize, ptomo_device** out) {
  PTOMO_REQUIRE(path);
  PTOMO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new ptomo_device{ptomo::load_mbs(ptomo::read_matrix_file(path), reunitarize != 0)}; });
}

ptomo_status ptomo_device_load_builtin(const char* name, int reunitarize, ptomo_device** out) {
  PTOMO_REQUIRE(name);
  PTOMO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    *out = new ptomo_device{ptomo::load_mbs(ptomo::builtin_device_matrix(name), reunitarize != 0)};
  });
}

void ptomo_device_free(ptomo_device* device) { delete device; }

size_t ptomo_device_ports(const ptomo_device* device) {
  return device ? static_cast<size_t>(device->device.ports()) : 0;
}

double ptomo_device_raw_unitarity_deviation(const ptomo_device* device) {
  return device ? device->device.raw_unitarity_deviation() : -1.0;
}

double ptomo_device_unitarity_deviation(const ptomo_device* device) {
  return device ? device->device.unitarity_deviation() : -1.0;
}

double ptomo_device_replacement_distance(const ptomo_device* device) {
  return device ? device->device.replacement_distance() : -1.0;
}

// ---- families and phase design ----------------------------------------------

ptomo_status ptomo_enumerate_families(size_t ports, size_t dim, int* out, size_t capacity, size_t* count) {
  PTOMO_REQUIRE(count);
  ptomo_status status = PTOMO_OK;
  ptomo_status rc = guarded([&] {
    auto families = ptomo::enumerate_families(static_cast<int>(ports), static_cast<int>(dim));
    *count = families.size();
    if (out == nullptr) return;
    size_t n = std::min(capacity, families.size());
    for (size_t i = 0; i < n; ++i) std::copy(families[i].begin(), families[i].end(), out + i * dim);
    if (n < families.size()) status = PTOMO_ERR_BUFFER_TOO_SMALL;
  });
  if (rc != PTOMO_OK) return rc;
  if (status != PTOMO_OK) return set_error(status, "family buffer holds fewer subsets than exist");
  return PTOMO_OK;
}

void ptomo_phase_options_default(ptomo_phase_options* options) {
  if (!options) return;
  ptomo::PhaseOptimizerConfig cfg;
  options->starts = cfg.starts;
  options->max_iterations = cfg.max_iterations;
  options->diameter_tolerance = cfg.diameter_tolerance;
  options->seed = cfg.seed;
  options->norm = PTOMO_NORM_SPECTRAL;
}

ptomo_status ptomo_optimize_phases(const ptomo_device* device, const int* subset, size_t dim,
                                   const ptomo_phase_options* options, double* phases_out, double* norm_out,
                                   double* zero_phase_norm_out) {
  PTOMO_REQUIRE(device);
  PTOMO_REQUIRE(subset);
  return guarded([&] {
    ptomo::PhaseOptimizerConfig cfg;
    if (options) {
      cfg.starts = options->starts;
      cfg.max_iterations = options->max_iterations;
      cfg.diameter_tolerance = options->diameter_tolerance;
      cfg.seed = options->seed;
      cfg.norm = to_norm(options->norm);
    }
    auto best = ptomo::optimize_phases(device->device, read_subset(subset, dim), cfg);
    if (phases_out) std::copy(best.family.phases.begin(), best.family.phases.end(), phases_out);
    if (norm_out) *norm_out = best.norm;
    if (zero_phase_norm_out) *zero_phase_norm_out = best.zero_phase_norm;
  });
}

ptomo_status ptomo_haar_mean_c_norm(size_t dim, size_t outcomes, size_t samples, uint64_t seed,
                                    ptomo_norm_kind norm, ptomo_haar_convention convention, double* mean,
                                    double* standard_error) {
  return guarded([&] {
    auto conv = convention == PTOMO_HAAR_RAW_COEFFICIENTS ? ptomo::HaarConvention::kRawCoefficients
                                                          : ptomo::HaarConvention::kPhaseFixed;
    auto est = ptomo::haar_mean_c_norm(static_cast<int>(dim), static_cast<int>(outcomes),
                                       static_cast<int>(samples), seed, to_norm(norm), conv);
    if (mean) *mean = est.mean;
    if (standard_error) *standard_error = est.standard_error;
  });
}

// ---- POVMs ------------------------------------------------------------------

ptomo_status ptomo_povm_from_family(const ptomo_device* device, const int* subset, size_t dim,
                                    const double* phases, ptomo_povm** out, int* completeness_warning) {
  PTOMO_REQUIRE(device);
  PTOMO_REQUIRE(subset);
  PTOMO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    ptomo::PovmFamily family = ptomo::PovmFamily::zero_phase(read_subset(subset, dim));
    if (phases) family.phases.assign(phases, phases + dim);
    auto fp = ptomo::effects_from_family(device->device, family);
    if (completeness_warning) *completeness_warning = fp.completeness_warning ? 1 : 0;
    *out = new ptomo_povm{std::move(fp.povm)};
  });
}

ptomo_status ptomo_povm_from_coefficients(const double* re_im, size_t outcomes, size_t dim, ptomo_povm** out) {
  PTOMO_REQUIRE(re_im);
  PTOMO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new ptomo_povm{ptomo::Povm(read_complex(re_im, outcomes, dim))}; });
}

ptomo_status ptomo_povm_basis(size_t dim, ptomo_povm** out) {
  PTOMO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] { *out = new ptomo_povm{ptomo::Povm::computational_basis(static_cast<int>(dim))}; });
}

ptomo_status ptomo_povm_haar(size_t dim, size_t outcomes, uint64_t seed, ptomo_povm** out) {
  PTOMO_REQUIRE(out);
  *out = nullptr;
  return guarded([&] {
    std::mt19937_64 rng(seed);
    *out = new ptomo_povm{ptomo::haar_random_povm(static_cast<int>(dim), static_cast<int>(outcomes), rng)};
  });
}

void ptomo_povm_free(ptomo_povm* povm) { delete povm; }

size_t ptomo_povm_dim(const ptomo_povm* povm) { return povm ? static_cast<size_t>(povm->povm.dim()) : 0; }

size_t ptomo_povm_outcomes(const ptomo_povm* povm) {
  return povm ? static_cast<size_t>(povm->povm.outcomes()) : 0;
}

double ptomo_povm_completeness_deviation(const ptomo_povm* povm) {
  return povm ? povm->povm.completeness_deviation() : -1.0;
}

ptomo_status ptomo_povm_coefficients(const ptomo_povm* povm, double* re_im, size_t capacity_doubles) {
  PTOMO_REQUIRE(povm);
  PTOMO_REQUIRE(re_im);
  size_t need = 2 * static_cast<size_t>(povm->povm.outcomes()) * static_cast<size_t>(povm->povm.dim());
  if (capacity_doubles < need) return set_error(PTOMO_ERR_BUFFER_TOO_SMALL, "coefficient buffer too small");
  return guarded([&] { write_complex(povm->povm.coefficients(), re_im); });
}

// ---- Fisher information -----------------------------------------------------

ptomo_status ptomo_c_matrix(const ptomo_povm* povm, double* re_im) {
  PTOMO_REQUIRE(povm);
  PTOMO_REQUIRE(re_im);
  return guarded([&] { write_complex(ptomo::c_matrix(povm->povm).mat, re_im); });
}

ptomo_status ptomo_c_norm(const ptomo_povm* povm, ptomo_norm_kind norm, double* out) {
  PTOMO_REQUIRE(povm);
  PTOMO_REQUIRE(out);
  return guarded([&] { *out = ptomo::c_norm(povm->povm, to_norm(norm)); });
}

ptomo_status ptomo_cfim_first_order(const ptomo_povm* povm, double* hermitian_block, double* symmetric_block) {
  PTOMO_REQUIRE(povm);
  return guarded([&] { write_blocks(ptomo::cfim_first_order(povm->povm), hermitian_block, symmetric_block); });
}

ptomo_status ptomo_cfim_numeric(const ptomo_povm* povm, const double* theta, double step, double* hermitian_block,
                                double* symmetric_block) {
  PTOMO_REQUIRE(povm);
  PTOMO_REQUIRE(theta);
  return guarded([&] {
    auto t = read_theta(theta, static_cast<size_t>(povm->povm.dim() - 1));
    write_blocks(ptomo::cfim_numeric(povm->povm, t, step), hermitian_block, symmetric_block);
  });
}

ptomo_status ptomo_qfim_pure(const double* theta, size_t dim, double* hermitian_block, double* symmetric_block) {
  PTOMO_REQUIRE(theta);
  return guarded([&] {
    if (dim < 2) ptomo::throw_invalid("dimension must be at least 2");
    write_blocks(ptomo::qfim_pure(read_theta(theta, dim - 1)), hermitian_block, symmetric_block);
  });
}

ptomo_status ptomo_gm_inequality_lhs(const ptomo_povm* povm, const double* theta, int numeric, double* out) {
  PTOMO_REQUIRE(povm);
  PTOMO_REQUIRE(out);
  return guarded([&] {
    int d = povm->povm.dim();
    auto t = theta ? read_theta(theta, static_cast<size_t>(d - 1)) : ptomo::LocalParameters::zero(d);
    if (!numeric && theta) ptomo::throw_invalid("the first-order CFIM is only defined at the fiducial state");
    auto cfim = numeric ? ptomo::cfim_numeric(povm->povm, t) : ptomo::cfim_first_order(povm->povm);
    *out = ptomo::gm_inequality_lhs(cfim, ptomo::qfim_pure(t));
  });
}

double ptomo_gill_massar_wmse(size_t dim, uint64_t n_exp) {
  try {
    return ptomo::gill_massar_wmse(static_cast<int>(dim), static_cast<long long>(n_exp));
  } catch (const std::exception& e) {
    set_error(PTOMO_ERR_INVALID_INPUT, e.what());
    return -1.0;
  }
}

// ---- states -----------------------------------------------------------------

ptomo_status ptomo_equal_shift_state(double theta, size_t dim, double* amps) {
  PTOMO_REQUIRE(amps);
  return guarded([&] {
    auto psi = ptomo::equal_shift_state(theta, static_cast<int>(dim));
    write_complex(psi.amps(), amps);
  });
}

// ---- estimation -------------------------------------------------------------

void ptomo_mle_options_default(ptomo_mle_options* options) {
  if (!options) return;
  ptomo::MleConfig cfg;
  options->max_iterations = cfg.max_iterations;
  options->tolerance = cfg.tolerance;
  options->starts = cfg.starts;
  options->start_radius = cfg.start_radius;
  options->seed = cfg.seed;
  options->tie_statistic = cfg.tie_statistic;
}

ptomo_status ptomo_estimate_state(const ptomo_povm* povm, const double* counts, size_t outcomes,
                                  const ptomo_mle_options* options, double* theta_out, double* state_out,
                                  double* log_likelihood_out) {
  PTOMO_REQUIRE(povm);
  PTOMO_REQUIRE(counts);
  return guarded([&] {
    auto res = ptomo::estimate_state_detailed(std::span<const double>(counts, outcomes), povm->povm, to_mle(options));
    if (theta_out) write_complex(res.theta.theta(), theta_out);
    if (state_out) write_complex(res.state.amps(), state_out);
    if (log_likelihood_out) *log_likelihood_out = res.log_likelihood;
  });
}

ptomo_status ptomo_bootstrap(const ptomo_povm* povm, const int64_t* counts, size_t outcomes, double theta,
                             double lambda, int n_boot, uint64_t seed, const ptomo_mle_options* options,
                             ptomo_bootstrap_summary* out) {
  PTOMO_REQUIRE(povm);
  PTOMO_REQUIRE(counts);
  PTOMO_REQUIRE(out);
  return guarded([&] {
    auto cfg = to_mle(options);
    std::span<const std::int64_t> c(reinterpret_cast<const std::int64_t*>(counts), outcomes);
    auto truth = ptomo::depolarize(ptomo::equal_shift_state(theta, povm->povm.dim()), lambda);
    auto est = ptomo::estimate_state(c, povm->povm, cfg);
    std::mt19937_64 rng(seed);
    auto boot = ptomo::bootstrap_infidelity(c, povm->povm, truth, n_boot, rng, cfg);
    out->point_infidelity = ptomo::infidelity(est, truth);
    out->low = boot.low;
    out->q25 = boot.q25;
    out->median = boot.median;
    out->q75 = boot.q75;
    out->high = boot.high;
    out->replicas = boot.replicas;
    out->degenerate = boot.degenerate ? 1 : 0;
  });
}

ptomo_status ptomo_fit_power_law(const double* n, const double* infidelity, size_t len, ptomo_fit* out) {
  PTOMO_REQUIRE(n);
  PTOMO_REQUIRE(infidelity);
  PTOMO_REQUIRE(out);
  return guarded([&] {
    std::vector<ptomo::PowerLawPoint> pts(len);
    for (size_t i = 0; i < len; ++i) pts[i] = {n[i], infidelity[i]};
    auto fit = ptomo::fit_power_law(pts);
    out->coefficient = fit.coefficient;
    out->exponent = fit.exponent;
    out->residual = fit.residual;
    out->excluded_zero_points = fit.excluded_zero_points;
  });
}

// ---- sweeps -----------------------------------------------------------------

void ptomo_sweep_config_default(ptomo_sweep_config* config) {
  if (!config) return;
  ptomo::SweepConfig cfg;
  std::memset(config, 0, sizeof(*config));
  config->theta = cfg.theta_scalar;
  config->repetitions = cfg.repetitions;
  config->lambda = cfg.noise.lambda;
  config->systematic_epsilon = cfg.noise.systematic_epsilon;
  config->noise_seed = cfg.noise.seed;
  config->bootstrap_replicas = cfg.bootstrap_replicas;
  config->seed = cfg.seed;
  config->workers = cfg.workers;
  ptomo_mle_options_default(&config->mle);
}

ptomo_status ptomo_run_sweep(const ptomo_povm* povm, const ptomo_sweep_config* config, ptomo_sweep** out) {
  PTOMO_REQUIRE(povm);
  PTOMO_REQUIRE(config);
  PTOMO_REQUIRE(out);
  *out = nullptr;
  ptomo_status rc = guarded([&] {
    ptomo::SweepConfig cfg;
    cfg.theta_scalar = config->theta;
    if (config->n_grid_len > 0 && config->n_grid == nullptr) ptomo::throw_invalid("n_grid is null");
    cfg.n_grid.assign(config->n_grid, config->n_grid + config->n_grid_len);
    cfg.repetitions = config->repetitions;
    cfg.noise.lambda = config->lambda;
    cfg.noise.systematic_epsilon = config->systematic_epsilon;
    cfg.noise.seed = config->noise_seed;
    cfg.povm = povm->povm;
    if (config->povm_label) cfg.povm_label = config->povm_label;
    cfg.bootstrap_replicas = config->bootstrap_replicas;
    cfg.mle = to_mle(&config->mle);
    cfg.seed = config->seed;
    cfg.workers = config->workers;
    auto sweep = std::make_unique<ptomo_sweep>();
    sweep->result = ptomo::run_sweep(cfg);
    sweep->stats = ptomo::summarize(sweep->result);
    *out = sweep.release();
  });
  if (rc != PTOMO_OK) return rc;
  if ((*out)->result.aborted) return set_error(PTOMO_ERR_NUMERICAL, (*out)->result.abort_reason.c_str());
  return PTOMO_OK;
}

void ptomo_sweep_free(ptomo_sweep* sweep) { delete sweep; }

size_t ptomo_sweep_row_count(const ptomo_sweep* sweep) { return sweep ? sweep->result.rows.size() : 0; }

ptomo_status ptomo_sweep_get_row(const ptomo_sweep* sweep, size_t index, ptomo_sweep_row* row) {
  PTOMO_REQUIRE(sweep);
  PTOMO_REQUIRE(row);
  if (index >= sweep->result.rows.size()) return set_error(PTOMO_ERR_INVALID_INPUT, "row index out of range");
  const auto& r = sweep->result.rows[index];
  row->n = r.n;
  row->trial = r.trial;
  row->infidelity = r.infidelity;
  row->boot_low = r.boot.low;
  row->boot_q25 = r.boot.q25;
  row->boot_median = r.boot.median;
  row->boot_q75 = r.boot.q75;
  row->boot_high = r.boot.high;
  row->boot_degenerate = r.boot.degenerate ? 1 : 0;
  return PTOMO_OK;
}

size_t ptomo_sweep_stats_count(const ptomo_sweep* sweep) { return sweep ? sweep->stats.size() : 0; }

ptomo_status ptomo_sweep_get_stats(const ptomo_sweep* sweep, size_t index, ptomo_sweep_stats* stats) {
  PTOMO_REQUIRE(sweep);
  PTOMO_REQUIRE(stats);
  if (index >= sweep->stats.size()) return set_error(PTOMO_ERR_INVALID_INPUT, "stats index out of range");
  const auto& s = sweep->stats[index];
  stats->n = s.n;
  stats->mean = s.mean;
  stats->standard_error = s.standard_error;
  stats->trials = s.trials;
  return PTOMO_OK;
}

int ptomo_sweep_aborted(const ptomo_sweep* sweep) { return sweep && sweep->result.aborted ? 1 : 0; }

const char* ptomo_sweep_config_hash(const ptomo_sweep* sweep) {
  return sweep ? sweep->result.config_hash.c_str() : "";
}

ptomo_status ptomo_asymptotic_infidelity(const ptomo_povm* povm, double theta, double lambda,
                                         const ptomo_mle_options* options, double* out) {
  PTOMO_REQUIRE(povm);
  PTOMO_REQUIRE(out);
  return guarded([&] {
    auto truth = ptomo::depolarize(ptomo::equal_shift_state(theta, povm->povm.dim()), lambda);
    *out = ptomo::asymptotic_infidelity(truth, povm->povm, povm->povm, to_mle(options));
  });
}

// ---- utilities --------------------------------------------------------------

ptomo_status ptomo_config_hash(const char* text, char* out) {
  PTOMO_REQUIRE(text);
  PTOMO_REQUIRE(out);
  return guarded([&] {
    auto h = ptomo::sha256_hex(text).substr(0, 16);
    std::memcpy(out, h.c_str(), h.size() + 1);
  });
}

ptomo_status ptomo_data_dir(char* out, size_t capacity) {
  PTOMO_REQUIRE(out);
  std::string dir;
  ptomo_status rc = guarded([&] { dir = ptomo::data_dir(); });
  if (rc != PTOMO_OK) return rc;
  if (dir.size() + 1 > capacity) return set_error(PTOMO_ERR_BUFFER_TOO_SMALL, "data directory buffer too small");
  std::memcpy(out, dir.c_str(), dir.size() + 1);
  return PTOMO_OK;
}

}  // extern "C"
