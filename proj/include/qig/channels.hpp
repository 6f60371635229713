// channels.hpp - CPTP maps in Kraus form and empirical metric monotonicity

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qig/manifold.hpp"
#include "qig/metrics.hpp"

namespace qig {

inline constexpr double kTracePreservationTolerance = 1e-10;

class CptpMap {
 public:
  // Throws InvalidParameter unless sum K^dagger K = 1 within tolerance.
  CptpMap(std::string kind, std::vector<ComplexMatrix> kraus);

  const std::string& kind() const { return kind_; }
  int dim() const { return static_cast<int>(kraus_.front().cols()); }
  std::size_t rank() const { return kraus_.size(); }
  const std::vector<ComplexMatrix>& kraus() const { return kraus_; }

  // || sum K^dagger K - 1 ||_max
  double trace_defect() const;

 private:
  std::string kind_;
  std::vector<ComplexMatrix> kraus_;
};

// Random isometry C^N -> C^(N r) from a QR-orthonormalized Gaussian matrix,
// sliced into r Kraus operators.
CptpMap random_cptp(int dim, int kraus_rank, std::uint64_t seed);
CptpMap identity_channel(int dim);
CptpMap unitary_channel(const ComplexMatrix& u);
// Diagonal projectors of the computational basis.
CptpMap pinching_map(int dim);
// (1 - p) rho + p I/N via Kraus {sqrt(1-p) 1, sqrt(p/N) E_ij}.
CptpMap depolarizing_map(int dim, double p);

HermitianMatrix apply_channel(const CptpMap& s, const HermitianMatrix& x);

struct ChannelOutput {
  DensityMatrix state;
  // Weight w of I/N mixed in to keep S(rho) above the eigenvalue floor; 0 if
  // no adjustment was needed.
  double nudge = 0.0;
};

// S(rho) used as a base point. If its smallest eigenvalue is below the floor
// it is mixed with I/N using the smallest weight that restores the floor.
ChannelOutput apply_channel_to_state(const CptpMap& s, const DensityMatrix& rho);

// g_{f,S(rho)}(S(A), S(A)) - g_{f,rho}(A, A) for a traceless A. Positive
// values are violations of monotonicity.
double monotonicity_check(const OperatorMonotoneFunction& f, const CptpMap& s,
                          const TangentVector& a);

// Same with the weight-space extension ghat on an arbitrary Hermitian A.
double extended_monotonicity_check(const OperatorMonotoneFunction& f, const CptpMap& s,
                                   const DensityMatrix& rho, const HermitianMatrix& a);

inline constexpr double kMonotoneSlack = 1e-9;
inline constexpr double kViolationBar = 1e-3;

struct MonotonicityWitness {
  std::size_t trial = 0;
  std::string channel;
  std::size_t kraus_rank = 0;
  double violation = 0.0;
};

struct MonotonicitySweepReport {
  std::string f;
  bool monotone_claim = true;
  int dim = 0;
  std::size_t trials = 0;
  double max_violation = 0.0;           // max of g_S - g over the sweep
  double max_extended_violation = 0.0;  // same for the extension ghat
  std::size_t violations_above_slack = 0;
  std::size_t nudged_states = 0;
  std::vector<MonotonicityWitness> witnesses;  // worst first, at most 5
  // monotone f: no violation above kMonotoneSlack; otherwise at least one
  // violation above kViolationBar
  bool pass = false;
};

nlohmann::json to_json(const MonotonicitySweepReport& report);

// Trial t uses seed ^ t. Trials cycle through four kinds: random CPTP maps
// (rank 1..N^2), pinching, depolarizing maps, and pinching of a state whose
// eigenbasis is unbiased to the computational basis along a diagonal
// tangent. States, spectra and tangents are random.
MonotonicitySweepReport monotonicity_sweep(const OperatorMonotoneFunction& f, int dim,
                                           std::size_t trials, std::uint64_t seed);

}  // namespace qig
