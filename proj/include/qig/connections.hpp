// connections.hpp - exponential (+1), mixture (-1) and alpha-mixed connections

#pragma once

#include <cstddef>
#include <vector>

#include "qig/manifold.hpp"
#include "qig/metrics.hpp"

namespace qig {

class Connection {
 public:
  // Throws InvalidParameter unless alpha lies in [-1, 1].
  explicit Connection(double alpha);

  static Connection exponential() { return Connection(1.0); }
  static Connection mixture() { return Connection(-1.0); }

  double alpha() const { return alpha_; }

 private:
  double alpha_;
};

// nabla_{d_i} d_j at the chart point x.
//   alpha = +1: plus payload d_i d_j log rho - Tr(rho d_i d_j log rho)
//   alpha = -1: minus payload d_i d_j rho
//   otherwise:  (1+alpha)/2 nabla^(1) + (1-alpha)/2 nabla^(-1), in minus rep
TangentVector covariant_derivative(const Connection& conn, const Chart& chart, const RealVector& x,
                                   std::size_t i, std::size_t j);
TangentVector covariant_derivative(const Connection& conn, const ChartJet& jet, std::size_t i,
                                   std::size_t j);

// Closed-form transports from v.base() to `to`:
//   alpha = +1: plus payload A -> A - Tr(to A) 1
//   alpha = -1: minus payload unchanged
// Throws UnsupportedTransport for interior alpha.
TangentVector parallel_transport(const Connection& conn, const DensityMatrix& to,
                                 const TangentVector& v);

class ChristoffelField {
 public:
  ChristoffelField(RealVector point, std::size_t n);

  const RealVector& point() const { return point_; }
  std::size_t size() const { return n_; }

  // Gamma^k_{ij}
  double& operator()(std::size_t k, std::size_t i, std::size_t j) { return entries_[(k * n_ + i) * n_ + j]; }
  double operator()(std::size_t k, std::size_t i, std::size_t j) const {
    return entries_[(k * n_ + i) * n_ + j];
  }

  double max_abs() const;
  // max |Gamma^k_ij - Gamma^k_ji|
  double asymmetry() const;

 private:
  RealVector point_;
  std::size_t n_;
  std::vector<double> entries_;
};

// Gamma^k_ij = sum_l (g^-1)^{kl} g_f(nabla_i d_j, d_l). Throws
// NumericalDegeneracy on a singular metric matrix.
ChristoffelField christoffels(const Connection& conn, const Chart& chart,
                              const OperatorMonotoneFunction& f, const RealVector& x);

// Central-difference step used for derivatives of the Christoffel symbols.
inline constexpr double kCurvatureStep = 1e-4;

// Max |R^l_kij| at one point, with
//   R^l_kij = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^l_im Gamma^m_jk - Gamma^l_jm Gamma^m_ik
double curvature_max(const Connection& conn, const Chart& chart, const RealVector& x,
                     const OperatorMonotoneFunction& f = bkm_function());

// Max of curvature_max over the grid. Grid points are evaluated
// concurrently (see parallel.hpp).
double flatness_residual(const Connection& conn, const Chart& chart,
                         const std::vector<RealVector>& grid,
                         const OperatorMonotoneFunction& f = bkm_function());

}  // namespace qig
