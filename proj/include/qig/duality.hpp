// duality.hpp - duality diagnostics for the +/-1 connections
//
// Residuals of X g(Y, Z) = g(nabla^(1)_X Y, Z) + g(Y, nabla^(-1)_X Z) on
// coordinate fields, transport-pairing invariance, Legendre potentials and
// the fit of g = M g^BKM used to scan candidate metrics.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qig/manifold.hpp"
#include "qig/metrics.hpp"

namespace qig {

// Relative central-difference step: h = kDualityStep (1 + |x_i|).
inline constexpr double kDualityStep = 1e-4;

// All n^3 signed residuals d_i g_jk - g(nabla^(1)_i d_j, d_k) - g(d_j, nabla^(-1)_i d_k),
// stored at (i n + j) n + k.
std::vector<double> duality_residual_tensor(const OperatorMonotoneFunction& f, const Chart& chart,
                                            const RealVector& x);

// Absolute residual for one coordinate triple.
double duality_residual(const OperatorMonotoneFunction& f, const Chart& chart, const RealVector& x,
                        std::size_t i, std::size_t j, std::size_t k);

// |g_rho0(Y, Z) - g_rho1(tau^(1) Y, tau^(-1) Z)| with rho0 = Y.base().
double transport_pairing_residual(const OperatorMonotoneFunction& f, const DensityMatrix& rho1,
                                  const TangentVector& y, const TangentVector& z);

// log Tr exp(sum theta^i X_i), shifted by the largest eigenvalue.
double potential_psi(const ExpChart& chart, const RealVector& theta);

// eta_i = Tr(rho(theta) X_i).
RealVector dual_coords(const ExpChart& chart, const RealVector& theta);

struct PotentialPair {
  RealVector theta;
  RealVector eta;
  double psi = 0.0;
  double phi = 0.0;
  double pairing = 0.0;  // theta . eta
  double newton_residual = 0.0;
  int iterations = 0;

  // psi + phi - theta . eta
  double legendre_defect() const { return psi + phi - pairing; }
};

inline constexpr int kNewtonMaxIterations = 100;
inline constexpr double kNewtonTolerance = 1e-13;

// Solves grad Psi(theta) = eta by damped Newton from theta = 0 (Jacobian is
// the BKM metric matrix) and returns phi = theta . eta - psi. Throws
// InversionFailure with the final residual if it does not converge.
PotentialPair potential_phi(const ExpChart& chart, const RealVector& eta);

// Central-difference Hessian of Psi.
RealMatrix potential_hessian_fd(const ExpChart& chart, const RealVector& theta);

// max |FD Hessian of Psi - BKM metric matrix|.
double hessian_check(const ExpChart& chart, const RealVector& theta);

// Central-difference Jacobian d eta / d theta.
RealMatrix dual_jacobian_fd(const ExpChart& chart, const RealVector& theta);

// max |G_f (d theta / d eta) - I| with d theta / d eta the inverse of the FD
// Jacobian of eta(theta).
double biorthogonality_check(const OperatorMonotoneFunction& f, const ExpChart& chart,
                             const RealVector& theta);

struct AffineRelationFit {
  std::vector<RealMatrix> per_point;  // M(theta) = G_f (G_B)^-1
  RealMatrix mean;
  double constancy_score = 0.0;  // max ||M - mean||_F / ||mean||_F
  double off_diagonal_max = 0.0;  // max |mean_ij|, i != j
  double diagonal_mean = 0.0;
};

AffineRelationFit affine_relation_fit(const OperatorMonotoneFunction& f, const ExpChart& chart,
                                      const std::vector<RealVector>& points);

struct DualityWitness {
  std::size_t sample = 0;
  std::size_t i = 0, j = 0, k = 0;
  double residual = 0.0;
};

struct DualityReport {
  std::string f;
  std::size_t n_samples = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;  // mean over samples of the per-sample max
  std::vector<double> per_sample_max;
  double constancy_score = 0.0;
  AffineRelationFit fit;
  std::vector<DualityWitness> witnesses;  // worst triple per sample, worst first
};

nlohmann::json to_json(const DualityReport& report);

std::vector<RealVector> sample_exp_points(std::size_t n, std::size_t count, std::uint64_t seed);

// Reports sorted by ascending max residual (stable for ties).
std::vector<DualityReport> uniqueness_scan(const std::vector<OperatorMonotoneFunction>& family,
                                           const ExpChart& chart,
                                           const std::vector<RealVector>& samples);
std::vector<DualityReport> uniqueness_scan(const std::vector<OperatorMonotoneFunction>& family,
                                           const ExpChart& chart, std::size_t n_samples,
                                           std::uint64_t seed);

}  // namespace qig
