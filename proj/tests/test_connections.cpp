#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "qig/connections.hpp"
#include "qig/sampling.hpp"

using namespace qig;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// Solve d_i d_j F = Gamma^k_ij d_k F (mod multiples of 1) from finite
// differences of F, using basis components as coordinates.
RealVector fd_christoffel_column(const Basis& basis, const std::function<ComplexMatrix(const RealVector&)>& F,
                                 const RealVector& x, std::size_t i, std::size_t j) {
  const auto n = static_cast<Eigen::Index>(basis.size());
  const double h = 1e-3;
  auto comps = [&](const ComplexMatrix& m) { return basis.components(HermitianMatrix(m)); };
  RealMatrix first(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    first.col(k) = comps(oracle::derivative(
        [&](double t) {
          RealVector y = x;
          y(k) += t;
          return F(y);
        },
        h));
  }
  const RealVector second = comps(oracle::mixed_derivative(
      [&](double a, double b) {
        RealVector y = x;
        y(static_cast<Eigen::Index>(i)) += a;
        y(static_cast<Eigen::Index>(j)) += b;
        return F(y);
      },
      h));
  return first.fullPivLu().solve(second);
}

}  // namespace

TEST_CASE("alpha must lie in [-1, 1]") {
  CHECK_THROWS_AS(Connection(1.5), InvalidParameter);
  CHECK_THROWS_AS(Connection(-1.0001), InvalidParameter);
  CHECK_THROWS_AS(Connection(std::nan("")), InvalidParameter);
  CHECK(Connection::exponential().alpha() == 1.0);
  CHECK(Connection::mixture().alpha() == -1.0);
}

TEST_CASE("affine coordinates make the matching connection vanish") {
  Rng rng(1);
  for (int dim : {2, 3}) {
    const Basis basis = make_basis(dim);
    const Chart e = ExpChart{basis};
    const Chart m = MixtureChart{basis};
    for (int s = 0; s < 5; ++s) {
      const RealVector theta = random_exp_coords(basis.size(), rng);
      const RealVector eta = chart_coords(m, chart_state(e, theta));
      CHECK(christoffels(Connection::exponential(), e, bkm_function(), theta).max_abs() < 1e-8);
      CHECK(christoffels(Connection::mixture(), m, bkm_function(), eta).max_abs() < 1e-8);
      for (std::size_t i = 0; i < basis.size(); ++i) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
          CHECK(covariant_derivative(Connection::exponential(), e, theta, i, j).payload().norm() < 1e-10);
          CHECK(covariant_derivative(Connection::mixture(), m, eta, i, j).payload().norm() == 0.0);
        }
      }
    }
  }
}

TEST_CASE("Christoffel symbols in the foreign chart match finite differences") {
  Rng rng(2);
  const Basis basis = make_basis(2);
  const ExpChart ec{basis};
  const MixtureChart mc{basis};
  const RealVector theta = random_exp_coords(3, rng);
  const RealVector eta = mixture_coords_from_state(mc, state_from_exp_coords(ec, theta));

  const ChristoffelField gm = christoffels(Connection::mixture(), Chart{ec}, bkm_function(), theta);
  const ChristoffelField ge = christoffels(Connection::exponential(), Chart{mc}, bkm_function(), eta);
  CHECK(gm.max_abs() > 1e-2);
  CHECK(ge.max_abs() > 1e-2);

  auto rho_of_theta = [&](const RealVector& t) { return oracle::expm(basis.combine(t).matrix()).eval(); };
  auto normalized = [&](const RealVector& t) {
    const ComplexMatrix e = rho_of_theta(t);
    return ComplexMatrix(e / e.trace().real());
  };
  auto log_of_eta = [&](const RealVector& y) {
    return oracle::logm(ComplexMatrix::Identity(2, 2) / 2.0 + basis.combine(y).matrix());
  };
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const RealVector col_m = fd_christoffel_column(basis, normalized, theta, i, j);
      const RealVector col_e = fd_christoffel_column(basis, log_of_eta, eta, i, j);
      for (std::size_t k = 0; k < 3; ++k) {
        CHECK(std::abs(gm(k, i, j) - col_m(static_cast<Eigen::Index>(k))) < 1e-5);
        CHECK(std::abs(ge(k, i, j) - col_e(static_cast<Eigen::Index>(k))) < 1e-5);
      }
    }
  }
}

TEST_CASE("Christoffel symbols are symmetric in the lower indices") {
  Rng rng(3);
  const Basis basis = make_basis(3);
  const RealVector theta = random_exp_coords(basis.size(), rng);
  for (double alpha : {-1.0, -0.3, 0.0, 0.5, 1.0}) {
    CAPTURE(alpha);
    CHECK(christoffels(Connection(alpha), Chart{ExpChart{basis}}, bkm_function(), theta).asymmetry() < 1e-10);
  }
}

TEST_CASE("interior alpha is the affine combination of the endpoints") {
  Rng rng(4);
  const Basis basis = make_basis(2);
  const Chart chart = ExpChart{basis};
  const RealVector theta = random_exp_coords(3, rng);
  const ChartJet jet = chart_jet(chart, theta);
  const double alpha = 0.4;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      const auto mid = covariant_derivative(Connection(alpha), jet, i, j);
      const auto e = rep_convert(covariant_derivative(Connection::exponential(), jet, i, j), Rep::minus);
      const auto m = covariant_derivative(Connection::mixture(), jet, i, j);
      const ComplexMatrix expected = 0.7 * e.payload().matrix() + 0.3 * m.payload().matrix();
      CHECK(mid.rep() == Rep::minus);
      CHECK(max_abs(mid.payload().matrix() - expected) < 1e-13);
    }
  }
  const auto g0 = christoffels(Connection(0.0), chart, bkm_function(), theta);
  const auto gp = christoffels(Connection::exponential(), chart, bkm_function(), theta);
  const auto gn = christoffels(Connection::mixture(), chart, bkm_function(), theta);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(g0(k, i, j) - 0.5 * (gp(k, i, j) + gn(k, i, j))) < 1e-12);
}

TEST_CASE("curvature of the flat connections in the foreign chart is small") {
  Rng rng(5);
  const Basis basis = make_basis(2);
  const ExpChart ec{basis};
  const MixtureChart mc{basis};
  std::vector<RealVector> theta_grid, eta_grid;
  for (int s = 0; s < 4; ++s) {
    theta_grid.push_back(random_exp_coords(3, rng));
    eta_grid.push_back(mixture_coords_from_state(mc, state_from_exp_coords(ec, theta_grid.back())));
  }
  CHECK(flatness_residual(Connection::mixture(), Chart{ec}, theta_grid) < 1e-4);
  CHECK(flatness_residual(Connection::exponential(), Chart{mc}, eta_grid) < 1e-4);
  // the mixed connection is not flat for the BKM metric
  CHECK(flatness_residual(Connection(0.0), Chart{ec}, theta_grid) > 1e-3);
}

TEST_CASE("closed-form parallel transport") {
  Rng rng(6);
  for (int dim : {2, 3}) {
    const DensityMatrix rho0 = random_state(dim, rng);
    const DensityMatrix rho1 = random_state(dim, rng);
    const TangentVector yp = random_tangent(rho0, Rep::plus, rng);
    const TangentVector zm = random_tangent(rho0, Rep::minus, rng);

    const TangentVector ty = parallel_transport(Connection::exponential(), rho1, yp);
    CHECK(ty.rep() == Rep::plus);
    CHECK(std::abs(trace_product(rho1.matrix(), ty.payload())) < 1e-12);
    // differs from the input only by a multiple of the identity
    const ComplexMatrix diff = ty.payload().matrix() - yp.payload().matrix();
    CHECK(max_abs(diff - diff(0, 0) * ComplexMatrix::Identity(dim, dim)) < 1e-14);

    const TangentVector tz = parallel_transport(Connection::mixture(), rho1, zm);
    CHECK(tz.rep() == Rep::minus);
    CHECK(max_abs(tz.payload().matrix() - zm.payload().matrix()) == 0.0);
    CHECK(&tz.base() != &zm.base());
    CHECK(max_abs(tz.base().matrix().matrix() - rho1.matrix().matrix()) == 0.0);

    // inputs in the other representation are converted first
    const TangentVector tz2 = parallel_transport(Connection::mixture(), rho1, rep_convert(zm, Rep::plus));
    CHECK(max_abs(tz2.payload().matrix() - zm.payload().matrix()) < 1e-10);

    // there and back again
    const TangentVector yback = parallel_transport(Connection::exponential(), rho0, ty);
    CHECK(max_abs(yback.payload().matrix() - yp.payload().matrix()) < 1e-12);
    const TangentVector zback = parallel_transport(Connection::mixture(), rho0, tz);
    CHECK(max_abs(zback.payload().matrix() - zm.payload().matrix()) == 0.0);

    CHECK_THROWS_AS(parallel_transport(Connection(0.0), rho1, yp), UnsupportedTransport);
  }
}
