// manifold.hpp - invertible density matrices, tangent representations, charts
//
// Tangent vectors carry one of two representations:
//   Rep::plus  - derivative of log(rho) along a curve; a "score" with
//                Tr(rho A) = 0.
//   Rep::minus - derivative of rho itself; a traceless Hermitian matrix.
// Charts are built on an orthonormal traceless Hermitian basis X_1..X_n,
// n = N^2 - 1, with Tr(X_i X_j) = delta_ij.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "qig/errors.hpp"

namespace qig {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Smallest admissible eigenvalue of a point of the manifold.
inline constexpr double kEigenvalueFloor = 1e-8;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kTangentTolerance = 1e-10;

class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  // Symmetrizes (M + M^dagger) / 2. Throws InvalidDimension when not square.
  explicit HermitianMatrix(const ComplexMatrix& m);

  static HermitianMatrix zero(int dim);
  static HermitianMatrix identity(int dim);

  int dim() const { return static_cast<int>(m_.rows()); }
  const ComplexMatrix& matrix() const { return m_; }
  double trace() const { return m_.trace().real(); }
  double norm() const { return m_.norm(); }

  HermitianMatrix& operator+=(const HermitianMatrix& o);
  HermitianMatrix& operator-=(const HermitianMatrix& o);
  HermitianMatrix& operator*=(double s);

  friend HermitianMatrix operator+(HermitianMatrix a, const HermitianMatrix& b) { return a += b; }
  friend HermitianMatrix operator-(HermitianMatrix a, const HermitianMatrix& b) { return a -= b; }
  friend HermitianMatrix operator*(double s, HermitianMatrix a) { return a *= s; }
  friend HermitianMatrix operator*(HermitianMatrix a, double s) { return a *= s; }

 private:
  ComplexMatrix m_;
};

// Re Tr(A B); exact trace of the product for Hermitian A, B.
double trace_product(const HermitianMatrix& a, const HermitianMatrix& b);

// A strictly positive, unit-trace Hermitian matrix with its eigensystem.
class DensityMatrix {
 public:
  // Validates trace and eigenvalue floor; throws OutOfManifold naming the
  // offending quantity.
  explicit DensityMatrix(const HermitianMatrix& m);

  static DensityMatrix maximally_mixed(int dim);
  // Builds U diag(p) U^dagger, validating p.
  static DensityMatrix from_spectrum(const RealVector& p, const ComplexMatrix& U);

  int dim() const { return matrix_.dim(); }
  const HermitianMatrix& matrix() const { return matrix_; }
  // Ascending eigenvalues and matching eigenvector columns.
  const RealVector& eigenvalues() const { return p_; }
  const ComplexMatrix& eigenvectors() const { return U_; }

  ComplexMatrix to_eigenbasis(const ComplexMatrix& a) const { return U_.adjoint() * a * U_; }
  ComplexMatrix from_eigenbasis(const ComplexMatrix& a) const { return U_ * a * U_.adjoint(); }

  HermitianMatrix log() const;

 private:
  DensityMatrix(HermitianMatrix m, RealVector p, ComplexMatrix U);
  void validate() const;

  HermitianMatrix matrix_;
  RealVector p_;
  ComplexMatrix U_;
};

enum class Rep { plus, minus };

std::string to_string(Rep rep);

class TangentVector {
 public:
  // Throws InvalidTangent if the payload violates the invariant of `rep`,
  // InvalidDimension on shape mismatch.
  TangentVector(DensityMatrix base, Rep rep, HermitianMatrix payload);

  const DensityMatrix& base() const { return base_; }
  Rep rep() const { return rep_; }
  const HermitianMatrix& payload() const { return payload_; }

 private:
  DensityMatrix base_;
  Rep rep_;
  HermitianMatrix payload_;
};

// Multipliers (log p_a - log p_b) / (p_a - p_b) taking minus components to
// plus components in the eigenbasis of the base point.
RealMatrix rep_multipliers(const DensityMatrix& rho);

TangentVector rep_convert(const TangentVector& v, Rep target);

// Orthonormal traceless Hermitian basis (generalized Gell-Mann matrices).
class Basis {
 public:
  explicit Basis(std::vector<HermitianMatrix> elements);

  int dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const HermitianMatrix& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<HermitianMatrix>& elements() const { return elements_; }

  // sum_i c_i X_i
  HermitianMatrix combine(const RealVector& c) const;
  // c_i = Tr(A X_i)
  RealVector components(const HermitianMatrix& a) const;

 private:
  int dim_;
  std::vector<HermitianMatrix> elements_;
};

// Pairs (j < k) give symmetric then antisymmetric elements, followed by the
// N - 1 diagonal elements. For dim = 2 this is (sigma_x, sigma_y, sigma_z)/sqrt(2).
Basis make_basis(int dim);

struct ExpChart {
  Basis basis;
};

struct MixtureChart {
  Basis basis;
};

using Chart = std::variant<ExpChart, MixtureChart>;

const Basis& chart_basis(const Chart& chart);
std::string chart_name(const Chart& chart);

// rho = exp(sum theta^i X_i - Psi(theta) 1), evaluated spectrally with the
// largest exponent shifted out before exponentiating.
DensityMatrix state_from_exp_coords(const ExpChart& chart, const RealVector& theta);
RealVector exp_coords_from_state(const ExpChart& chart, const DensityMatrix& rho);

RealVector mixture_coords_from_state(const MixtureChart& chart, const DensityMatrix& rho);
// rho = 1/N + sum eta_i X_i; throws OutOfManifold if an eigenvalue drops
// below the floor.
DensityMatrix state_from_mixture_coords(const MixtureChart& chart, const RealVector& eta);

DensityMatrix chart_state(const Chart& chart, const RealVector& x);
RealVector chart_coords(const Chart& chart, const DensityMatrix& rho);

// Plus representation of d/dtheta^i at rho(theta): X_i - eta_i 1.
TangentVector coord_basis_vector(const ExpChart& chart, const RealVector& theta, std::size_t i);

// First and second coordinate derivatives of rho and log(rho) at a chart
// point. Second derivatives are stored for all (i, j) pairs.
class ChartJet {
 public:
  ChartJet(DensityMatrix state, std::vector<HermitianMatrix> d_rho,
           std::vector<HermitianMatrix> d_log, std::vector<HermitianMatrix> dd_rho,
           std::vector<HermitianMatrix> dd_log);

  const DensityMatrix& state() const { return state_; }
  std::size_t size() const { return d_rho_.size(); }

  const HermitianMatrix& d_rho(std::size_t i) const { return d_rho_[i]; }
  const HermitianMatrix& d_log(std::size_t i) const { return d_log_[i]; }
  const HermitianMatrix& dd_rho(std::size_t i, std::size_t j) const { return dd_rho_[i * size() + j]; }
  const HermitianMatrix& dd_log(std::size_t i, std::size_t j) const { return dd_log_[i * size() + j]; }

  // Coordinate vector d_i in either representation.
  TangentVector coordinate_vector(std::size_t i, Rep rep) const;

 private:
  DensityMatrix state_;
  std::vector<HermitianMatrix> d_rho_;
  std::vector<HermitianMatrix> d_log_;
  std::vector<HermitianMatrix> dd_rho_;
  std::vector<HermitianMatrix> dd_log_;
};

ChartJet chart_jet(const Chart& chart, const RealVector& x);

}  // namespace qig
