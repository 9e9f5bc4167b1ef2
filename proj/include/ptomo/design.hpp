#pragma once

// POVMs realized by feeding a qudit into d of the D inputs of a multiport
// beam splitter, and the search for the family closest to Fisher symmetry.

#include <cstdint>
#include <random>
#include <vector>

#include "ptomo/fisher.hpp"
#include "ptomo/povm.hpp"

namespace ptomo {

class MbsDevice {
 public:
  // Rejects non-square or D < 2 (kInvalidInput) and smallest singular
  // value < 1e-6 (kDegenerateInput). With `reunitarize` the matrix is
  // replaced by its polar factor.
  MbsDevice(CMat transfer, bool reunitarize);

  int ports() const noexcept { return static_cast<int>(u_.rows()); }
  const CMat& transfer() const noexcept { return u_; }
  bool reunitarized() const noexcept { return reunitarized_; }
  // Spectral ||U^H U - I|| of the matrix as given.
  double raw_unitarity_deviation() const noexcept { return raw_deviation_; }
  // Spectral ||U^H U - I|| of the stored matrix.
  double unitarity_deviation() const noexcept { return deviation_; }
  // Spectral ||U_raw - U_stored||, zero unless re-unitarized.
  double replacement_distance() const noexcept { return replacement_distance_; }

 private:
  CMat u_;
  bool reunitarized_ = false;
  double raw_deviation_ = 0.0;
  double deviation_ = 0.0;
  double replacement_distance_ = 0.0;
};

MbsDevice load_mbs(const CMat& matrix, bool reunitarize);

/// Connected inputs (1-based, strictly increasing) and the phase imprinted
/// on each before the device. phases[0] is the gauge and stays 0.
struct PovmFamily {
  std::vector<int> subset;
  std::vector<double> phases;

  static PovmFamily zero_phase(std::vector<int> subset);
  int dim() const { return static_cast<int>(subset.size()); }
};

std::string subset_label(const std::vector<int>& subset);

// All size-d subsets of {1..D} in lexicographic order.
std::vector<std::vector<int>> enumerate_families(int ports, int dim);

struct FamilyPovm {
  Povm povm;
  // Set when the device is not unitary enough for completeness within 1e-6.
  bool completeness_warning = false;
};

// a_j^eta = conj(U[eta, k_j] e^{i phi_j}) e^{i gamma_eta}; D outcomes.
FamilyPovm effects_from_family(const MbsDevice& mbs, const PovmFamily& family);

// A start replaces the incumbent phases only if it lowers the norm by more than
// this. The norm is flat in the phases for many families, and without the
// margin the returned phases (and hence the POVM) would be chosen by rounding.
inline constexpr double kPhaseImprovementTolerance = 1e-10;

struct PhaseOptimizerConfig {
  int starts = 32;
  int max_iterations = 2000;
  double diameter_tolerance = 1e-8;
  std::uint64_t seed = 0x5eed;
  NormKind norm = NormKind::kSpectral;
};

struct PhaseOptimum {
  PovmFamily family;
  double norm = 0.0;
  double zero_phase_norm = 0.0;
};

// Multi-start Nelder-Mead over phi_1..phi_{d-1}. The zero-phase point is
// always evaluated, so the result never exceeds zero_phase_norm.
PhaseOptimum optimize_phases(const MbsDevice& mbs, const std::vector<int>& subset,
                             const PhaseOptimizerConfig& cfg = {});

// Rows of the first d columns of an n x n Haar unitary (Ginibre + QR with
// the R-diagonal phase correction).
CMat haar_unitary(int n, std::mt19937_64& rng);
Povm haar_random_povm(int dim, int outcomes, std::mt19937_64& rng);

// How C is formed for a Haar draw. kPhaseFixed applies the a_0 >= 0
// convention first; kRawCoefficients uses the unitary's entries as drawn.
enum class HaarConvention { kPhaseFixed, kRawCoefficients };

struct MeanEstimate {
  double mean = 0.0;
  double standard_error = 0.0;
};

// Sample i uses a stream derived from (seed, i), so the estimate does not
// depend on evaluation order.
MeanEstimate haar_mean_c_norm(int dim, int outcomes, int samples, std::uint64_t seed,
                              NormKind kind = NormKind::kSpectral,
                              HaarConvention convention = HaarConvention::kPhaseFixed);

}  // namespace ptomo
