#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "qig/duality.hpp"
#include "qig/sampling.hpp"

using namespace qig;

namespace {

const double kTheta3 = 0.776836199212093;  // log 3 / sqrt 2: rho = diag(0.75, 0.25)

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_CASE("duality residual vanishes for BKM and its multiples") {
  const ExpChart ec{make_basis(2)};
  const MixtureChart mc{make_basis(2)};
  for (const auto& point : sample_exp_points(3, 8, 123)) {
    for (const char* name : {"bkm", "2*bkm", "3*bkm"}) {
      CAPTURE(name);
      const auto f = find_function(name);
      CHECK(max_abs(duality_residual_tensor(f, Chart{ec}, point)) < 1e-6);
      const RealVector eta = mixture_coords_from_state(mc, state_from_exp_coords(ec, point));
      // metric entries are larger in the mixture chart; the bound tracks the FD truncation error
      CHECK(max_abs(duality_residual_tensor(f, Chart{mc}, eta)) < 1e-4);
    }
  }
}

TEST_CASE("duality residual tensor layout") {
  const ExpChart ec{make_basis(2)};
  const RealVector x = sample_exp_points(3, 1, 5).front();
  const auto sld = find_function("sld");
  const auto t = duality_residual_tensor(sld, Chart{ec}, x);
  REQUIRE(t.size() == 27);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k)
        CHECK(duality_residual(sld, Chart{ec}, x, i, j, k) == doctest::Approx(std::abs(t[(i * 3 + j) * 3 + k])));
}

TEST_CASE("non-BKM metrics break duality at diag(0.75, 0.25)") {
  const ExpChart ec{make_basis(2)};
  const RealVector theta{{0.0, 0.0, kTheta3}};
  for (const char* name : {"sld", "rld", "wy"}) {
    CAPTURE(name);
    CHECK(max_abs(duality_residual_tensor(find_function(name), Chart{ec}, theta)) > 1e-2);
  }
  CHECK(max_abs(duality_residual_tensor(bkm_function(), Chart{ec}, theta)) < 1e-7);
}

TEST_CASE("duality residual grows linearly along the BKM to SLD interpolation") {
  const ExpChart ec{make_basis(2)};
  const auto points = sample_exp_points(3, 4, 77);
  const auto bkm = bkm_function();
  const auto sld = find_function("sld");
  std::vector<double> residuals;
  for (double s : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    double worst = 0.0;
    for (const auto& p : points) worst = std::max(worst, max_abs(duality_residual_tensor(kernel_interpolation(bkm, sld, s), Chart{ec}, p)));
    residuals.push_back(worst);
  }
  CHECK(residuals.front() < 1e-6);
  for (std::size_t i = 1; i < residuals.size(); ++i) CHECK(residuals[i] > residuals[i - 1]);
  CHECK(residuals[2] == doctest::Approx(0.5 * residuals[4]).epsilon(1e-3));
}

TEST_CASE("transport pairing is preserved for BKM only") {
  Rng rng(8);
  const auto bkm = bkm_function();
  for (int dim : {2, 3}) {
    for (int s = 0; s < 10; ++s) {
      const DensityMatrix rho0 = random_state(dim, rng);
      const DensityMatrix rho1 = random_state(dim, rng);
      const TangentVector y = random_tangent(rho0, Rep::plus, rng);
      const TangentVector z = random_tangent(rho0, Rep::minus, rng);
      const double scale = std::max(1.0, std::abs(monotone_metric(bkm, y, z)));
      CHECK(transport_pairing_residual(bkm, rho1, y, z) < 1e-8 * scale);
    }
  }
  const DensityMatrix rho0(HermitianMatrix(oracle::diag2(0.75, 0.25)));
  const DensityMatrix rho1 = DensityMatrix::maximally_mixed(2);
  const TangentVector y(rho0, Rep::minus, HermitianMatrix(oracle::pauli_x()));
  CHECK(transport_pairing_residual(find_function("sld"), rho1, y, y) > 1e-2);
}

TEST_CASE("potentials at diag(0.75, 0.25)") {
  const ExpChart ec{make_basis(2)};
  const RealVector theta{{0.0, 0.0, kTheta3}};
  CHECK(potential_psi(ec, theta) == doctest::Approx(0.836988216785836).epsilon(1e-14));
  CHECK(potential_psi(ec, RealVector::Zero(3)) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  const RealVector eta = dual_coords(ec, theta);
  CHECK(std::abs(eta(0)) < 1e-15);
  CHECK(std::abs(eta(1)) < 1e-15);
  CHECK(eta(2) == doctest::Approx(0.353553390593274).epsilon(1e-14));

  const PotentialPair pp = potential_phi(ec, eta);
  CHECK((pp.theta - theta).norm() < 1e-10);
  CHECK(pp.phi == doctest::Approx(-0.562335144618808).epsilon(1e-12));
  // phi is the negative von Neumann entropy
  const double neg_entropy = 0.75 * std::log(0.75) + 0.25 * std::log(0.25);
  CHECK(pp.phi == doctest::Approx(neg_entropy).epsilon(1e-12));
  CHECK(std::abs(pp.legendre_defect()) < 1e-14);
  CHECK(pp.newton_residual <= 1e-10);
}

TEST_CASE("Legendre suite on random points") {
  for (int dim : {2, 3}) {
    const ExpChart ec{make_basis(dim)};
    const MixtureChart mc{ec.basis};
    for (const auto& theta : sample_exp_points(ec.basis.size(), 10, 40 + dim)) {
      const RealVector eta = dual_coords(ec, theta);
      const PotentialPair pp = potential_phi(ec, eta);
      CHECK(std::abs(pp.legendre_defect()) < 1e-8);
      CHECK((pp.theta - theta).norm() < 1e-8);
      // phi(eta) = Tr rho log rho, computed with an independent matrix log
      const ComplexMatrix rho = state_from_mixture_coords(mc, eta).matrix().matrix();
      CHECK(pp.phi == doctest::Approx(oracle::re_trace(rho * oracle::logm(rho))).epsilon(1e-9));
      // eta is the gradient of psi
      for (Eigen::Index i = 0; i < theta.size(); ++i) {
        const double h = 1e-4;
        RealVector tp = theta, tm = theta;
        tp(i) += h;
        tm(i) -= h;
        const double grad = (potential_psi(ec, tp) - potential_psi(ec, tm)) / (2 * h);
        CHECK(std::abs(grad - eta(i)) < 1e-6);
      }
      CHECK(hessian_check(ec, theta) < (dim == 2 ? 1e-5 : 1e-4));
      CHECK(biorthogonality_check(bkm_function(), ec, theta) < 1e-5);
    }
  }
}

TEST_CASE("potential_phi rejects inadmissible dual coordinates") {
  const ExpChart ec{make_basis(2)};
  CHECK_THROWS_AS(potential_phi(ec, RealVector{{0.0, 0.0, 0.8}}), OutOfManifold);
  const InversionFailure failure("no convergence", 3e-4);
  CHECK(failure.final_residual() == 3e-4);
}

TEST_CASE("affine relation fit") {
  const ExpChart ec{make_basis(2)};
  const auto points = sample_exp_points(3, 6, 9);
  const auto bkm_fit = affine_relation_fit(bkm_function(), ec, points);
  CHECK((bkm_fit.mean - RealMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(bkm_fit.constancy_score < 1e-12);
  CHECK(bkm_fit.diagonal_mean == doctest::Approx(1.0));

  const auto two = affine_relation_fit(find_function("2*bkm"), ec, points);
  CHECK(two.diagonal_mean == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(two.off_diagonal_max < 1e-8 * two.diagonal_mean);

  for (const char* name : {"sld", "rld", "wy"}) {
    CAPTURE(name);
    CHECK(affine_relation_fit(find_function(name), ec, points).constancy_score > 1e-2);
  }
  CHECK_THROWS_AS(affine_relation_fit(bkm_function(), ec, {points.front()}), InvalidParameter);
}

TEST_CASE("uniqueness scan ranks BKM multiples first and is reproducible") {
  const ExpChart ec{make_basis(2)};
  std::vector<OperatorMonotoneFunction> family;
  for (const char* name : {"sld", "bkm", "rld", "2*bkm", "wy"}) family.push_back(find_function(name));
  const auto reports = uniqueness_scan(family, ec, 10, 2024);
  REQUIRE(reports.size() == 5);
  for (std::size_t i = 1; i < reports.size(); ++i) CHECK(reports[i - 1].max_residual <= reports[i].max_residual);
  std::vector<std::string> top{reports[0].f, reports[1].f};
  std::sort(top.begin(), top.end());
  CHECK(top == std::vector<std::string>{"2*bkm", "bkm"});
  for (std::size_t i = 2; i < 5; ++i) {
    CHECK(reports[i].max_residual > 1e-2);
    CHECK(reports[i].constancy_score > 1e-2);
  }
  CHECK(reports[0].n_samples == 10);
  CHECK(reports[0].per_sample_max.size() == 10);
  CHECK(reports[4].witnesses.size() <= 5);

  const auto again = uniqueness_scan(family, ec, 10, 2024);
  for (std::size_t i = 0; i < 5; ++i) CHECK(to_json(reports[i]).dump() == to_json(again[i]).dump());
  const auto j = to_json(reports[0]);
  for (const char* key : {"f", "n_samples", "max_residual", "mean_residual", "constancy_score", "affine_scale",
                          "affine_off_diagonal_max", "witnesses"})
    CHECK(j.contains(key));
}
