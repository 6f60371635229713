#include "qig/duality.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qig/connections.hpp"
#include "qig/parallel.hpp"
#include "qig/sampling.hpp"

namespace qig {

namespace {

double step_for(double xi) { return kDualityStep * (1.0 + std::abs(xi)); }

RealVector shifted(const RealVector& x, std::size_t i, double h) {
  RealVector y = x;
  y(static_cast<Eigen::Index>(i)) += h;
  return y;
}

}  // namespace

std::vector<double> duality_residual_tensor(const OperatorMonotoneFunction& f, const Chart& chart,
                                            const RealVector& x) {
  const ChartJet jet = chart_jet(chart, x);
  const std::size_t n = jet.size();
  const MetricKernel kernel(f, jet.state());

  std::vector<HermitianMatrix> k_d;
  for (std::size_t k = 0; k < n; ++k) k_d.push_back(kernel.apply(jet.d_rho(k)));

  const Connection exponential = Connection::exponential();
  const Connection mixture = Connection::mixture();
  std::vector<HermitianMatrix> nabla_e(n * n);
  std::vector<HermitianMatrix> nabla_m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      nabla_e[i * n + j] = rep_convert(covariant_derivative(exponential, jet, i, j), Rep::minus).payload();
      nabla_m[i * n + j] = covariant_derivative(mixture, jet, i, j).payload();
    }
  }

  std::vector<double> out(n * n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double h = step_for(x(static_cast<Eigen::Index>(i)));
    const RealMatrix gp = metric_matrix(f, chart_jet(chart, shifted(x, i, h)));
    const RealMatrix gm = metric_matrix(f, chart_jet(chart, shifted(x, i, -h)));
    const RealMatrix dg = (gp - gm) / (2.0 * h);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        const double term_e = trace_product(nabla_e[i * n + j], k_d[k]);
        const double term_m = trace_product(nabla_m[i * n + k], k_d[j]);
        out[(i * n + j) * n + k] =
            dg(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) - term_e - term_m;
      }
    }
  }
  return out;
}

double duality_residual(const OperatorMonotoneFunction& f, const Chart& chart, const RealVector& x,
                        std::size_t i, std::size_t j, std::size_t k) {
  const std::size_t n = chart_basis(chart).size();
  if (i >= n || j >= n || k >= n) throw InvalidParameter("coordinate index out of range");
  return std::abs(duality_residual_tensor(f, chart, x)[(i * n + j) * n + k]);
}

double transport_pairing_residual(const OperatorMonotoneFunction& f, const DensityMatrix& rho1,
                                  const TangentVector& y, const TangentVector& z) {
  const double before = monotone_metric(f, y, z);
  const TangentVector ty = parallel_transport(Connection::exponential(), rho1, y);
  const TangentVector tz = parallel_transport(Connection::mixture(), rho1, z);
  return std::abs(before - monotone_metric(f, ty, tz));
}

// ---------------------------------------------------------------------------
// Potentials

double potential_psi(const ExpChart& chart, const RealVector& theta) {
  if (!theta.allFinite()) throw InvalidParameter("exponential coordinates must be finite");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(chart.basis.combine(theta).matrix(),
                                                      Eigen::EigenvaluesOnly);
  const RealVector& lambda = solver.eigenvalues();
  const double top = lambda.maxCoeff();
  return top + std::log((lambda.array() - top).exp().sum());
}

RealVector dual_coords(const ExpChart& chart, const RealVector& theta) {
  return chart.basis.components(state_from_exp_coords(chart, theta).matrix());
}

PotentialPair potential_phi(const ExpChart& chart, const RealVector& eta) {
  const MixtureChart mixture{chart.basis};
  // admissibility: throws OutOfManifold if eta has no preimage
  (void)state_from_mixture_coords(mixture, eta);

  const OperatorMonotoneFunction bkm = bkm_function();
  const Chart exp_chart = chart;
  RealVector theta = RealVector::Zero(eta.size());
  RealVector r = dual_coords(chart, theta) - eta;
  int it = 0;
  for (; it < kNewtonMaxIterations && r.norm() > kNewtonTolerance; ++it) {
    const RealMatrix jac = metric_matrix(bkm, chart_jet(exp_chart, theta));
    const RealVector step = jac.llt().solve(r);
    double t = 1.0;
    bool accepted = false;
    for (int halving = 0; halving < 60 && !accepted; ++halving, t *= 0.5) {
      const RealVector trial = theta - t * step;
      try {
        const RealVector r_trial = dual_coords(chart, trial) - eta;
        if (r_trial.norm() < r.norm()) {
          theta = trial;
          r = r_trial;
          accepted = true;
        }
      } catch (const OutOfManifold&) {
        // step left the manifold; keep halving
      }
    }
    if (!accepted) break;  // stalled at rounding level
  }
  const double residual = r.norm();
  if (residual > 1e-10) {
    std::ostringstream os;
    os << "Newton inversion of the dual coordinates failed after " << it
       << " iterations (residual " << residual << ")";
    throw InversionFailure(os.str(), residual);
  }
  PotentialPair out;
  out.theta = theta;
  out.eta = eta;
  out.psi = potential_psi(chart, theta);
  out.pairing = theta.dot(eta);
  out.phi = out.pairing - out.psi;
  out.newton_residual = residual;
  out.iterations = it;
  return out;
}

RealMatrix potential_hessian_fd(const ExpChart& chart, const RealVector& theta) {
  const std::size_t n = chart.basis.size();
  RealMatrix h(n, n);
  const double psi0 = potential_psi(chart, theta);
  for (std::size_t i = 0; i < n; ++i) {
    const double hi = step_for(theta(static_cast<Eigen::Index>(i)));
    const auto ii = static_cast<Eigen::Index>(i);
    h(ii, ii) = (potential_psi(chart, shifted(theta, i, hi)) - 2.0 * psi0 +
                 potential_psi(chart, shifted(theta, i, -hi))) /
                (hi * hi);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double hj = step_for(theta(static_cast<Eigen::Index>(j)));
      auto psi = [&](double si, double sj) {
        return potential_psi(chart, shifted(shifted(theta, i, si * hi), j, sj * hj));
      };
      const double v = (psi(1, 1) - psi(1, -1) - psi(-1, 1) + psi(-1, -1)) / (4.0 * hi * hj);
      h(ii, static_cast<Eigen::Index>(j)) = v;
      h(static_cast<Eigen::Index>(j), ii) = v;
    }
  }
  return h;
}

double hessian_check(const ExpChart& chart, const RealVector& theta) {
  const RealMatrix g = metric_matrix(bkm_function(), chart_jet(Chart{chart}, theta));
  return (potential_hessian_fd(chart, theta) - g).cwiseAbs().maxCoeff();
}

RealMatrix dual_jacobian_fd(const ExpChart& chart, const RealVector& theta) {
  const std::size_t n = chart.basis.size();
  RealMatrix jac(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double h = step_for(theta(static_cast<Eigen::Index>(j)));
    jac.col(static_cast<Eigen::Index>(j)) =
        (dual_coords(chart, shifted(theta, j, h)) - dual_coords(chart, shifted(theta, j, -h))) /
        (2.0 * h);
  }
  return jac;
}

double biorthogonality_check(const OperatorMonotoneFunction& f, const ExpChart& chart,
                             const RealVector& theta) {
  const RealMatrix g = metric_matrix(f, chart_jet(Chart{chart}, theta));
  const RealMatrix jac = dual_jacobian_fd(chart, theta);
  const Eigen::FullPivLU<RealMatrix> lu(jac);
  if (!lu.isInvertible()) throw NumericalDegeneracy("dual-coordinate Jacobian is singular");
  const RealMatrix b = g * lu.inverse();
  return (b - RealMatrix::Identity(b.rows(), b.cols())).cwiseAbs().maxCoeff();
}

// ---------------------------------------------------------------------------
// Affine relation and the uniqueness scan

AffineRelationFit affine_relation_fit(const OperatorMonotoneFunction& f, const ExpChart& chart,
                                      const std::vector<RealVector>& points) {
  if (points.size() < 2) throw InvalidParameter("affine relation fit needs at least 2 points");
  const OperatorMonotoneFunction bkm = bkm_function();
  AffineRelationFit fit;
  fit.per_point.resize(points.size());
  parallel_for(points.size(), [&](std::size_t p) {
    const ChartJet jet = chart_jet(Chart{chart}, points[p]);
    const RealMatrix gf = metric_matrix(f, jet);
    const RealMatrix gb = metric_matrix(bkm, jet);
    const Eigen::LLT<RealMatrix> llt(gb);
    if (llt.info() != Eigen::Success) throw NumericalDegeneracy("BKM metric matrix is singular");
    // M = G_f G_B^-1, G_B symmetric
    fit.per_point[p] = llt.solve(gf.transpose()).transpose();
  });
  const std::size_t n = chart.basis.size();
  fit.mean = RealMatrix::Zero(n, n);
  for (const auto& m : fit.per_point) fit.mean += m;
  fit.mean /= static_cast<double>(points.size());
  const double mean_norm = fit.mean.norm();
  for (const auto& m : fit.per_point) {
    fit.constancy_score = std::max(fit.constancy_score, (m - fit.mean).norm() / mean_norm);
  }
  fit.diagonal_mean = fit.mean.diagonal().mean();
  for (Eigen::Index i = 0; i < fit.mean.rows(); ++i) {
    for (Eigen::Index j = 0; j < fit.mean.cols(); ++j) {
      if (i != j) fit.off_diagonal_max = std::max(fit.off_diagonal_max, std::abs(fit.mean(i, j)));
    }
  }
  return fit;
}

nlohmann::json to_json(const DualityReport& report) {
  nlohmann::json witnesses = nlohmann::json::array();
  for (const auto& w : report.witnesses) {
    witnesses.push_back({{"sample", w.sample}, {"i", w.i}, {"j", w.j}, {"k", w.k}, {"residual", w.residual}});
  }
  return {{"f", report.f},
          {"n_samples", report.n_samples},
          {"max_residual", report.max_residual},
          {"mean_residual", report.mean_residual},
          {"constancy_score", report.constancy_score},
          {"affine_scale", report.fit.diagonal_mean},
          {"affine_off_diagonal_max", report.fit.off_diagonal_max},
          {"witnesses", std::move(witnesses)}};
}

std::vector<RealVector> sample_exp_points(std::size_t n, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<RealVector> out;
  out.reserve(count);
  for (std::size_t s = 0; s < count; ++s) out.push_back(random_exp_coords(n, rng));
  return out;
}

std::vector<DualityReport> uniqueness_scan(const std::vector<OperatorMonotoneFunction>& family,
                                           const ExpChart& chart,
                                           const std::vector<RealVector>& samples) {
  if (family.empty()) throw InvalidParameter("uniqueness scan needs a nonempty family");
  if (samples.empty()) throw InvalidParameter("uniqueness scan needs sample points");
  const std::size_t n = chart.basis.size();
  const std::size_t m = samples.size();
  std::vector<DualityWitness> worst(family.size() * m);
  parallel_for(family.size() * m, [&](std::size_t idx) {
    const std::size_t fi = idx / m;
    const std::size_t s = idx % m;
    const auto tensor = duality_residual_tensor(family[fi], Chart{chart}, samples[s]);
    DualityWitness w;
    w.sample = s;
    for (std::size_t t = 0; t < tensor.size(); ++t) {
      if (std::abs(tensor[t]) > w.residual) {
        w.residual = std::abs(tensor[t]);
        w.i = t / (n * n);
        w.j = (t / n) % n;
        w.k = t % n;
      }
    }
    worst[idx] = w;
  });

  std::vector<DualityReport> reports;
  for (std::size_t fi = 0; fi < family.size(); ++fi) {
    DualityReport r;
    r.f = family[fi].name;
    r.n_samples = m;
    for (std::size_t s = 0; s < m; ++s) {
      const DualityWitness& w = worst[fi * m + s];
      r.per_sample_max.push_back(w.residual);
      r.max_residual = std::max(r.max_residual, w.residual);
      r.witnesses.push_back(w);
    }
    r.mean_residual = std::accumulate(r.per_sample_max.begin(), r.per_sample_max.end(), 0.0) /
                      static_cast<double>(m);
    std::stable_sort(r.witnesses.begin(), r.witnesses.end(),
                     [](const auto& a, const auto& b) { return a.residual > b.residual; });
    if (r.witnesses.size() > 5) r.witnesses.resize(5);
    if (m >= 2) {
      r.fit = affine_relation_fit(family[fi], chart, samples);
      r.constancy_score = r.fit.constancy_score;
    }
    reports.push_back(std::move(r));
  }
  std::stable_sort(reports.begin(), reports.end(),
                   [](const auto& a, const auto& b) { return a.max_residual < b.max_residual; });
  return reports;
}

std::vector<DualityReport> uniqueness_scan(const std::vector<OperatorMonotoneFunction>& family,
                                           const ExpChart& chart, std::size_t n_samples,
                                           std::uint64_t seed) {
  return uniqueness_scan(family, chart, sample_exp_points(chart.basis.size(), n_samples, seed));
}

}  // namespace qig
