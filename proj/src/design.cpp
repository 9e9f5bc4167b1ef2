#include "ptomo/design.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ptomo/error.hpp"
#include "ptomo/optimize.hpp"
#include "ptomo/rng.hpp"

namespace ptomo {

namespace {

double unitarity_deviation_of(const CMat& u) {
  return spectral_norm(u.adjoint() * u - CMat::Identity(u.cols(), u.cols()));
}

double wrap_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(phi, two_pi);
  if (r < 0.0) r += two_pi;
  return r >= two_pi ? 0.0 : r;
}

void validate_subset(const std::vector<int>& subset, int ports) {
  if (subset.size() < 2) throw_invalid("family subset needs at least two inputs");
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (subset[i] < 1 || subset[i] > ports) {
      throw_invalid("family index " + std::to_string(subset[i]) + " outside 1.." + std::to_string(ports));
    }
    if (i > 0 && subset[i] <= subset[i - 1]) throw_invalid("family subset must be strictly increasing");
  }
}

}  // namespace

MbsDevice::MbsDevice(CMat transfer, bool reunitarize) : u_(std::move(transfer)) {
  if (u_.rows() != u_.cols()) throw_invalid("device matrix must be square");
  if (u_.rows() < 2) throw_invalid("device matrix must be at least 2x2");
  Eigen::JacobiSVD<CMat> svd(u_);
  if (svd.singularValues().minCoeff() < 1e-6) throw_degenerate("device matrix is rank deficient");
  raw_deviation_ = unitarity_deviation_of(u_);
  if (reunitarize) {
    CMat polar = polar_unitary(u_);
    replacement_distance_ = spectral_norm(u_ - polar);
    u_ = std::move(polar);
    reunitarized_ = true;
  }
  deviation_ = unitarity_deviation_of(u_);
}

MbsDevice load_mbs(const CMat& matrix, bool reunitarize) { return MbsDevice(matrix, reunitarize); }

PovmFamily PovmFamily::zero_phase(std::vector<int> subset) {
  PovmFamily f;
  f.phases.assign(subset.size(), 0.0);
  f.subset = std::move(subset);
  return f;
}

std::string subset_label(const std::vector<int>& subset) {
  const bool compact = std::all_of(subset.begin(), subset.end(), [](int k) { return k < 10; });
  std::ostringstream os;
  for (std::size_t i = 0; i < subset.size(); ++i) {
    if (!compact && i > 0) os << '-';
    os << subset[i];
  }
  return os.str();
}

std::vector<std::vector<int>> enumerate_families(int ports, int dim) {
  if (dim < 2) throw_invalid("family size must be at least 2");
  if (dim > ports) throw_invalid("family size exceeds the number of device ports");
  std::vector<std::vector<int>> out;
  std::vector<int> cur(dim);
  for (int i = 0; i < dim; ++i) cur[i] = i + 1;
  while (true) {
    out.push_back(cur);
    int i = dim - 1;
    while (i >= 0 && cur[i] == ports - dim + i + 1) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < dim; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

FamilyPovm effects_from_family(const MbsDevice& mbs, const PovmFamily& family) {
  validate_subset(family.subset, mbs.ports());
  if (family.phases.size() != family.subset.size()) throw_invalid("one phase per connected input is required");
  const int d = family.dim();
  const int n = mbs.ports();
  CMat a(n, d);
  for (int j = 0; j < d; ++j) {
    const cplx phase = std::polar(1.0, family.phases[j]);
    a.col(j) = (mbs.transfer().col(family.subset[j] - 1) * phase).conjugate();
  }
  Povm povm(std::move(a));
  const bool warn = !povm.is_complete(1e-6);
  return FamilyPovm{std::move(povm), warn};
}

PhaseOptimum optimize_phases(const MbsDevice& mbs, const std::vector<int>& subset,
                             const PhaseOptimizerConfig& cfg) {
  validate_subset(subset, mbs.ports());
  const int d = static_cast<int>(subset.size());
  auto family_at = [&](const RVector& x) {
    PovmFamily f = PovmFamily::zero_phase(subset);
    for (int j = 1; j < d; ++j) f.phases[j] = wrap_phase(x(j - 1));
    return f;
  };
  // Norm of C straight from the coefficients so raw (slightly non-unitary)
  // devices can be optimized as well.
  auto objective = [&](const RVector& x) {
    const FamilyPovm fp = effects_from_family(mbs, family_at(x));
    return matrix_norm(c_matrix_from_coefficients(fp.povm.coefficients()), cfg.norm);
  };

  const RVector zero = RVector::Zero(d - 1);
  PhaseOptimum best;
  best.zero_phase_norm = objective(zero);
  best.norm = best.zero_phase_norm;
  best.family = family_at(zero);

  NelderMeadOptions nm;
  nm.max_iterations = cfg.max_iterations;
  nm.diameter_tolerance = cfg.diameter_tolerance;
  std::uniform_real_distribution<double> uni(0.0, 2.0 * std::numbers::pi);
  for (int s = 0; s < cfg.starts; ++s) {
    std::mt19937_64 rng = derive_stream(cfg.seed, {static_cast<std::uint64_t>(s)});
    RVector x0(d - 1);
    for (int j = 0; j < d - 1; ++j) x0(j) = uni(rng);
    const NelderMeadResult r = nelder_mead(objective, x0, nm);
    if (r.value < best.norm - kPhaseImprovementTolerance) {
      best.norm = r.value;
      best.family = family_at(r.x);
    }
  }
  return best;
}

CMat haar_unitary(int n, std::mt19937_64& rng) {
  if (n < 1) throw_invalid("haar_unitary: size must be positive");
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  CMat z(n, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < n; ++r) z(r, c) = cplx(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<CMat> qr(z);
  CMat q = qr.householderQ();
  const CMat& r = qr.matrixQR();
  for (int i = 0; i < n; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0.0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

Povm haar_random_povm(int dim, int outcomes, std::mt19937_64& rng) {
  if (dim < 2) throw_invalid("haar_random_povm: dimension must be at least 2");
  if (outcomes < dim) throw_invalid("haar_random_povm: need at least as many outcomes as dimensions");
  return Povm(haar_unitary(outcomes, rng).leftCols(dim));
}

MeanEstimate haar_mean_c_norm(int dim, int outcomes, int samples, std::uint64_t seed, NormKind kind,
                              HaarConvention convention) {
  if (samples < 100) throw_invalid("haar_mean_c_norm needs at least 100 samples");
  if (dim < 2 || outcomes < dim) throw_invalid("haar_mean_c_norm: need 2 <= d <= n");
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < samples; ++i) {
    std::mt19937_64 rng = derive_stream(seed, {static_cast<std::uint64_t>(i)});
    CMat a = haar_unitary(outcomes, rng).leftCols(dim);
    if (convention == HaarConvention::kPhaseFixed) fix_outcome_phases(a);
    const double v = matrix_norm(c_matrix_from_coefficients(a), kind);
    sum += v;
    sum_sq += v * v;
  }
  MeanEstimate out;
  out.mean = sum / samples;
  const double var = std::max(0.0, (sum_sq - samples * out.mean * out.mean) / (samples - 1));
  out.standard_error = std::sqrt(var / samples);
  return out;
}

}  // namespace ptomo
