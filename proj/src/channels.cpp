#include "qig/channels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qig/parallel.hpp"
#include "qig/sampling.hpp"

namespace qig {

CptpMap::CptpMap(std::string kind, std::vector<ComplexMatrix> kraus)
    : kind_(std::move(kind)), kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw InvalidParameter("a channel needs at least one Kraus operator");
  const auto n = kraus_.front().cols();
  for (const auto& k : kraus_) {
    if (k.rows() != n || k.cols() != n) throw InvalidDimension("Kraus operators must be square and equal-sized");
  }
  const double defect = trace_defect();
  if (defect > kTracePreservationTolerance) {
    std::ostringstream os;
    os << "Kraus set is not trace preserving (defect " << defect << ")";
    throw InvalidParameter(os.str());
  }
}

double CptpMap::trace_defect() const {
  const auto n = kraus_.front().cols();
  ComplexMatrix acc = ComplexMatrix::Zero(n, n);
  for (const auto& k : kraus_) acc += k.adjoint() * k;
  return (acc - ComplexMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

CptpMap random_cptp(int dim, int kraus_rank, std::uint64_t seed) {
  if (dim < 1) throw InvalidDimension("channel dimension must be positive");
  if (kraus_rank < 1) throw InvalidParameter("Kraus rank must be at least 1");
  Rng rng(seed);
  const ComplexMatrix g = gaussian_complex(dim * kraus_rank, dim, rng);
  const Eigen::HouseholderQR<ComplexMatrix> qr(g);
  const ComplexMatrix v =
      qr.householderQ() * ComplexMatrix::Identity(dim * kraus_rank, dim);
  std::vector<ComplexMatrix> kraus;
  for (int r = 0; r < kraus_rank; ++r) kraus.push_back(v.block(r * dim, 0, dim, dim));
  return CptpMap(kraus_rank == 1 ? "random-unitary" : "random-cptp", std::move(kraus));
}

CptpMap identity_channel(int dim) {
  return CptpMap("identity", {ComplexMatrix::Identity(dim, dim)});
}

CptpMap unitary_channel(const ComplexMatrix& u) { return CptpMap("unitary", {u}); }

CptpMap pinching_map(int dim) {
  if (dim < 1) throw InvalidDimension("channel dimension must be positive");
  std::vector<ComplexMatrix> kraus;
  for (int a = 0; a < dim; ++a) {
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    p(a, a) = 1.0;
    kraus.push_back(std::move(p));
  }
  return CptpMap("pinching", std::move(kraus));
}

CptpMap depolarizing_map(int dim, double p) {
  if (dim < 1) throw InvalidDimension("channel dimension must be positive");
  if (!(p >= 0.0 && p <= 1.0)) {
    std::ostringstream os;
    os << "depolarizing parameter " << p << " outside [0, 1]";
    throw InvalidParameter(os.str());
  }
  std::vector<ComplexMatrix> kraus;
  kraus.push_back(std::sqrt(1.0 - p) * ComplexMatrix::Identity(dim, dim));
  const double w = std::sqrt(p / dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
      e(i, j) = w;
      kraus.push_back(std::move(e));
    }
  }
  return CptpMap("depolarizing", std::move(kraus));
}

HermitianMatrix apply_channel(const CptpMap& s, const HermitianMatrix& x) {
  if (x.dim() != s.dim()) throw InvalidDimension("channel and operand dimensions differ");
  ComplexMatrix acc = ComplexMatrix::Zero(x.dim(), x.dim());
  for (const auto& k : s.kraus()) acc += k * x.matrix() * k.adjoint();
  return HermitianMatrix(acc);
}

ChannelOutput apply_channel_to_state(const CptpMap& s, const DensityMatrix& rho) {
  HermitianMatrix out = apply_channel(s, rho.matrix());
  const int N = out.dim();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(out.matrix(), Eigen::EigenvaluesOnly);
  const double smallest = solver.eigenvalues().minCoeff();
  double w = 0.0;
  if (smallest < kEigenvalueFloor) {
    w = (kEigenvalueFloor - smallest) / (1.0 / N - smallest) * (1.0 + 1e-6);
    out = (1.0 - w) * out + (w / N) * HermitianMatrix::identity(N);
  }
  return {DensityMatrix(out), w};
}

double monotonicity_check(const OperatorMonotoneFunction& f, const CptpMap& s,
                          const TangentVector& a) {
  const TangentVector am = rep_convert(a, Rep::minus);
  const ChannelOutput out = apply_channel_to_state(s, a.base());
  const TangentVector sa(out.state, Rep::minus, apply_channel(s, am.payload()));
  return monotone_metric(f, sa, sa) - monotone_metric(f, am, am);
}

double extended_monotonicity_check(const OperatorMonotoneFunction& f, const CptpMap& s,
                                   const DensityMatrix& rho, const HermitianMatrix& a) {
  const ChannelOutput out = apply_channel_to_state(s, rho);
  const HermitianMatrix sa = apply_channel(s, a);
  return extend_metric(f, out.state, sa, sa) - extend_metric(f, rho, a, a);
}

nlohmann::json to_json(const MonotonicitySweepReport& report) {
  nlohmann::json witnesses = nlohmann::json::array();
  for (const auto& w : report.witnesses) {
    witnesses.push_back({{"trial", w.trial},
                         {"channel", w.channel},
                         {"kraus_rank", w.kraus_rank},
                         {"violation", w.violation}});
  }
  return {{"f", report.f},
          {"monotone_claim", report.monotone_claim},
          {"dim", report.dim},
          {"trials", report.trials},
          {"max_violation", report.max_violation},
          {"max_extended_violation", report.max_extended_violation},
          {"violations_above_slack", report.violations_above_slack},
          {"nudged_states", report.nudged_states},
          {"witnesses", std::move(witnesses)},
          {"pass", report.pass}};
}

namespace {

struct TrialResult {
  MonotonicityWitness witness;
  double extended = 0.0;
  bool nudged = false;
};

// Eigenbasis of the unbiased trial states: the discrete Fourier basis, so the
// pinching output is I/N whatever the spectrum.
ComplexMatrix fourier_basis(int dim) {
  ComplexMatrix f(dim, dim);
  const double pi = std::acos(-1.0);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) f(a, b) = std::polar(1.0 / std::sqrt(dim), 2.0 * pi * a * b / dim);
  return f;
}

TrialResult run_trial(const OperatorMonotoneFunction& f, int dim, std::size_t trial,
                      std::uint64_t seed) {
  Rng rng(seed ^ static_cast<std::uint64_t>(trial));
  const int kinds = 4;
  CptpMap channel = identity_channel(dim);
  bool unbiased = false;
  switch (trial % kinds) {
    case 0: {
      const int rank = 1 + static_cast<int>((trial / kinds) % static_cast<std::size_t>(dim * dim));
      channel = random_cptp(dim, rank, rng());
      break;
    }
    case 1:
      channel = pinching_map(dim);
      break;
    case 2: {
      std::uniform_real_distribution<double> uniform(0.0, 1.0);
      channel = depolarizing_map(dim, uniform(rng));
      break;
    }
    default:
      channel = pinching_map(dim);
      unbiased = true;
      break;
  }
  DensityMatrix rho = random_state(dim, rng);
  HermitianMatrix a = random_traceless(dim, rng);
  if (unbiased) {
    // Same spectrum, eigenbasis unbiased to the computational basis (random
    // phases on the Fourier basis); tangent restricted to the diagonal.
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::acos(-1.0));
    ComplexMatrix d = ComplexMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) d(k, k) = std::polar(1.0, phase(rng));
    rho = DensityMatrix::from_spectrum(rho.eigenvalues(), d * fourier_basis(dim));
    a = HermitianMatrix(ComplexMatrix(a.matrix().diagonal().asDiagonal()));
  }
  a *= 1.0 / a.norm();
  HermitianMatrix a_hat = random_hermitian(dim, rng);
  a_hat *= 1.0 / a_hat.norm();

  TrialResult r;
  r.witness.trial = trial;
  r.witness.channel = unbiased ? "pinching-unbiased" : channel.kind();
  r.witness.kraus_rank = channel.rank();
  r.witness.violation = monotonicity_check(f, channel, TangentVector(rho, Rep::minus, a));
  r.extended = extended_monotonicity_check(f, channel, rho, a_hat);
  r.nudged = apply_channel_to_state(channel, rho).nudge > 0.0;
  return r;
}

}  // namespace

MonotonicitySweepReport monotonicity_sweep(const OperatorMonotoneFunction& f, int dim,
                                           std::size_t trials, std::uint64_t seed) {
  if (trials < 1) throw InvalidParameter("monotonicity sweep needs at least one trial");
  if (dim < 2) throw InvalidDimension("monotonicity sweep needs dim >= 2");
  std::vector<TrialResult> results(trials);
  parallel_for(trials, [&](std::size_t t) { results[t] = run_trial(f, dim, t, seed); });

  MonotonicitySweepReport report;
  report.f = f.name;
  report.monotone_claim = f.monotone_claim;
  report.dim = dim;
  report.trials = trials;
  report.max_violation = results.front().witness.violation;
  report.max_extended_violation = results.front().extended;
  for (const auto& r : results) {
    report.max_violation = std::max(report.max_violation, r.witness.violation);
    report.max_extended_violation = std::max(report.max_extended_violation, r.extended);
    if (r.witness.violation > kMonotoneSlack || r.extended > kMonotoneSlack) ++report.violations_above_slack;
    if (r.nudged) ++report.nudged_states;
    report.witnesses.push_back(r.witness);
  }
  std::stable_sort(report.witnesses.begin(), report.witnesses.end(),
                   [](const auto& a, const auto& b) { return a.violation > b.violation; });
  if (report.witnesses.size() > 5) report.witnesses.resize(5);
  const double worst = std::max(report.max_violation, report.max_extended_violation);
  report.pass = f.monotone_claim ? worst <= kMonotoneSlack : report.max_violation > kViolationBar;
  return report;
}

}  // namespace qig
