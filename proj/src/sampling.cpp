#include "qig/sampling.hpp"

namespace qig {

ComplexMatrix gaussian_complex(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

DensityMatrix random_state(int dim, Rng& rng) {
  const ComplexMatrix g = gaussian_complex(dim, dim, rng);
  ComplexMatrix w = g * g.adjoint();
  w /= w.trace().real();
  const ComplexMatrix mixed = (1.0 - kSampleMixing) * w +
                              (kSampleMixing / dim) * ComplexMatrix::Identity(dim, dim);
  return DensityMatrix(HermitianMatrix(mixed));
}

HermitianMatrix random_hermitian(int dim, Rng& rng) {
  return HermitianMatrix(gaussian_complex(dim, dim, rng));
}

HermitianMatrix random_traceless(int dim, Rng& rng) {
  HermitianMatrix a = random_hermitian(dim, rng);
  return a - (a.trace() / dim) * HermitianMatrix::identity(dim);
}

TangentVector random_tangent(const DensityMatrix& rho, Rep rep, Rng& rng) {
  const int N = rho.dim();
  HermitianMatrix a = random_hermitian(N, rng);
  if (rep == Rep::minus) {
    a -= (a.trace() / N) * HermitianMatrix::identity(N);
  } else {
    a -= trace_product(rho.matrix(), a) * HermitianMatrix::identity(N);
  }
  return TangentVector(rho, rep, std::move(a));
}

RealVector random_exp_coords(std::size_t n, Rng& rng, double radius) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  RealVector dir(static_cast<Eigen::Index>(n));
  for (auto& v : dir) v = normal(rng);
  const double r = radius * uniform(rng);
  return dir.normalized() * r;
}

}  // namespace qig
