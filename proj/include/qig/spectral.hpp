// spectral.hpp - divided differences and Daleckii-Krein Frechet derivatives
//
// All derivatives of matrix functions in the library go through the
// eigenbasis of the base point: with H = U diag(x) U^dagger,
//
//   Df(H)[A]      = U (f[x_a, x_b] . A~_ab) U^dagger
//   D^2f(H)[A, B] = U (sum_c f[x_a, x_c, x_b] (A~_ac B~_cb + B~_ac A~_cb)) U^dagger
//
// where A~ = U^dagger A U. The divided differences are evaluated in forms
// that stay accurate when eigenvalues nearly coincide.

#pragma once

#include <Eigen/Dense>

namespace qig::spectral {

// Relative gap below which two eigenvalues are treated as coincident in
// first divided differences.
inline constexpr double kDegeneracyThreshold = 1e-10;

// Relative spread below which second divided differences switch to a Taylor
// expansion about the mean.
inline constexpr double kConfluentSpread = 1e-4;

// log[a, b] = (log a - log b) / (a - b), a, b > 0.
double log_dd1(double a, double b);

// log[a, b, c], second divided difference of log, a, b, c > 0.
double log_dd2(double a, double b, double c);

// exp[x, y] = (e^x - e^y) / (x - y).
double exp_dd1(double x, double y);

// exp[x, y, z].
double exp_dd2(double x, double y, double z);

// Matrix of first divided differences of log at positive eigenvalues p.
Eigen::MatrixXd log_dd1_matrix(const Eigen::VectorXd& p);

// Apply a first-order divided-difference kernel F (Hadamard product) to A
// expressed in the eigenbasis U.
Eigen::MatrixXcd hadamard_in_basis(const Eigen::MatrixXcd& U, const Eigen::MatrixXd& F,
                                   const Eigen::MatrixXcd& A);

// Second Frechet derivative kernel: given second divided differences
// F2(a, c, b) supplied as a callable, returns D^2f(H)[A, B] in the lab basis.
template <class SecondDD>
Eigen::MatrixXcd second_frechet(const Eigen::MatrixXcd& U, const Eigen::VectorXd& x,
                                SecondDD&& dd2, const Eigen::MatrixXcd& A,
                                const Eigen::MatrixXcd& B) {
  const Eigen::Index n = x.size();
  const Eigen::MatrixXcd At = U.adjoint() * A * U;
  const Eigen::MatrixXcd Bt = U.adjoint() * B * U;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      std::complex<double> acc = 0.0;
      for (Eigen::Index c = 0; c < n; ++c) {
        acc += dd2(x(a), x(c), x(b)) * (At(a, c) * Bt(c, b) + Bt(a, c) * At(c, b));
      }
      out(a, b) = acc;
    }
  }
  return U * out * U.adjoint();
}

}  // namespace qig::spectral
