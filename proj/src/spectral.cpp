#include "qig/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace qig::spectral {

namespace {

std::array<double, 3> sorted3(double a, double b, double c) {
  std::array<double, 3> v{a, b, c};
  std::sort(v.begin(), v.end());
  return v;
}

// Complete homogeneous symmetric polynomials h2, h3 of the deviations d.
std::pair<double, double> homogeneous_23(const std::array<double, 3>& d) {
  double h2 = 0.0;
  double h3 = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      h2 += d[i] * d[j];
      for (int k = j; k < 3; ++k) h3 += d[i] * d[j] * d[k];
    }
  }
  return {h2, h3};
}

std::array<double, 3> deviations(const std::array<double, 3>& v, double m) {
  return {v[0] - m, v[1] - m, v[2] - m};
}

}  // namespace

double log_dd1(double a, double b) {
  const double hi = std::max(a, b);
  const double diff = a - b;
  if (std::abs(diff) < kDegeneracyThreshold * hi) return 2.0 / (a + b);
  const double ratio = a / b;
  // log1p keeps the numerator accurate when a and b are close
  const double log_ratio = (ratio > 0.5 && ratio < 2.0) ? std::log1p(diff / b) : std::log(ratio);
  return log_ratio / diff;
}

double log_dd2(double a, double b, double c) {
  const auto v = sorted3(a, b, c);
  const double lo = v[0];
  const double mid = v[1];
  const double hi = v[2];
  const double spread = hi - lo;
  if (spread < kConfluentSpread * hi) {
    const double m = (lo + mid + hi) / 3.0;
    const auto [h2, h3] = homogeneous_23(deviations(v, m));
    const double m2 = m * m;
    // f''/2! + f''''/4! h2 + f^(5)/5! h3 with f = log; the h1 term vanishes
    return -1.0 / (2.0 * m2) - h2 / (4.0 * m2 * m2) + h3 / (5.0 * m2 * m2 * m);
  }
  return (log_dd1(hi, mid) - log_dd1(mid, lo)) / spread;
}

double exp_dd1(double x, double y) {
  if (x == y) return std::exp(x);
  const double lo = std::min(x, y);
  const double d = std::abs(x - y);
  return std::exp(lo) * std::expm1(d) / d;
}

double exp_dd2(double x, double y, double z) {
  const auto v = sorted3(x, y, z);
  const double spread = v[2] - v[0];
  if (spread < kConfluentSpread) {
    const double m = (v[0] + v[1] + v[2]) / 3.0;
    const auto [h2, h3] = homogeneous_23(deviations(v, m));
    return std::exp(m) * (0.5 + h2 / 24.0 + h3 / 120.0);
  }
  return (exp_dd1(v[2], v[1]) - exp_dd1(v[1], v[0])) / spread;
}

Eigen::MatrixXd log_dd1_matrix(const Eigen::VectorXd& p) {
  const Eigen::Index n = p.size();
  Eigen::MatrixXd F(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    F(a, a) = 1.0 / p(a);
    for (Eigen::Index b = a + 1; b < n; ++b) {
      F(a, b) = log_dd1(p(a), p(b));
      F(b, a) = F(a, b);
    }
  }
  return F;
}

Eigen::MatrixXcd hadamard_in_basis(const Eigen::MatrixXcd& U, const Eigen::MatrixXd& F,
                                   const Eigen::MatrixXcd& A) {
  const Eigen::MatrixXcd At = U.adjoint() * A * U;
  const Eigen::MatrixXcd scaled = At.cwiseProduct(F.cast<std::complex<double>>());
  return U * scaled * U.adjoint();
}

}  // namespace qig::spectral
