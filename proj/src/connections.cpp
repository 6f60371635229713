#include "qig/connections.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qig/parallel.hpp"

namespace qig {

Connection::Connection(double alpha) : alpha_(alpha) {
  if (!(alpha >= -1.0 && alpha <= 1.0)) {
    std::ostringstream os;
    os << "connection alpha " << alpha << " outside [-1, 1]";
    throw InvalidParameter(os.str());
  }
}

TangentVector covariant_derivative(const Connection& conn, const ChartJet& jet, std::size_t i,
                                   std::size_t j) {
  if (i >= jet.size() || j >= jet.size()) throw InvalidParameter("coordinate index out of range");
  const DensityMatrix& rho = jet.state();
  const int N = rho.dim();
  auto exponential = [&] {
    const HermitianMatrix& h = jet.dd_log(i, j);
    return TangentVector(rho, Rep::plus,
                         h - trace_product(rho.matrix(), h) * HermitianMatrix::identity(N));
  };
  auto mixture = [&] { return TangentVector(rho, Rep::minus, jet.dd_rho(i, j)); };

  const double alpha = conn.alpha();
  if (alpha == 1.0) return exponential();
  if (alpha == -1.0) return mixture();
  const HermitianMatrix e = rep_convert(exponential(), Rep::minus).payload();
  const HermitianMatrix m = mixture().payload();
  return TangentVector(rho, Rep::minus, 0.5 * (1.0 + alpha) * e + 0.5 * (1.0 - alpha) * m);
}

TangentVector covariant_derivative(const Connection& conn, const Chart& chart, const RealVector& x,
                                   std::size_t i, std::size_t j) {
  return covariant_derivative(conn, chart_jet(chart, x), i, j);
}

TangentVector parallel_transport(const Connection& conn, const DensityMatrix& to,
                                 const TangentVector& v) {
  if (to.dim() != v.base().dim()) throw InvalidDimension("transport between different dimensions");
  if (conn.alpha() == 1.0) {
    const HermitianMatrix a = rep_convert(v, Rep::plus).payload();
    return TangentVector(to, Rep::plus,
                         a - trace_product(to.matrix(), a) * HermitianMatrix::identity(to.dim()));
  }
  if (conn.alpha() == -1.0) {
    return TangentVector(to, Rep::minus, rep_convert(v, Rep::minus).payload());
  }
  std::ostringstream os;
  os << "no closed-form parallel transport for alpha = " << conn.alpha();
  throw UnsupportedTransport(os.str());
}

// ---------------------------------------------------------------------------

ChristoffelField::ChristoffelField(RealVector point, std::size_t n)
    : point_(std::move(point)), n_(n), entries_(n * n * n, 0.0) {}

double ChristoffelField::max_abs() const {
  double m = 0.0;
  for (double v : entries_) m = std::max(m, std::abs(v));
  return m;
}

double ChristoffelField::asymmetry() const {
  double m = 0.0;
  for (std::size_t k = 0; k < n_; ++k) {
    for (std::size_t i = 0; i < n_; ++i) {
      for (std::size_t j = i + 1; j < n_; ++j) {
        m = std::max(m, std::abs((*this)(k, i, j) - (*this)(k, j, i)));
      }
    }
  }
  return m;
}

ChristoffelField christoffels(const Connection& conn, const Chart& chart,
                              const OperatorMonotoneFunction& f, const RealVector& x) {
  const ChartJet jet = chart_jet(chart, x);
  const std::size_t n = jet.size();
  const RealMatrix g = metric_matrix(f, jet);
  const Eigen::LLT<RealMatrix> llt(g);
  if (llt.info() != Eigen::Success) throw NumericalDegeneracy("metric matrix is singular");
  const MetricKernel kernel(f, jet.state());

  ChristoffelField gamma(x, n);
  RealVector lowered(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const TangentVector d = rep_convert(covariant_derivative(conn, jet, i, j), Rep::minus);
      const HermitianMatrix kd = kernel.apply(d.payload());
      for (std::size_t l = 0; l < n; ++l) {
        lowered(static_cast<Eigen::Index>(l)) = trace_product(jet.d_rho(l), kd);
      }
      const RealVector raised = llt.solve(lowered);
      for (std::size_t k = 0; k < n; ++k) gamma(k, i, j) = raised(static_cast<Eigen::Index>(k));
    }
  }
  return gamma;
}

double curvature_max(const Connection& conn, const Chart& chart, const RealVector& x,
                     const OperatorMonotoneFunction& f) {
  const std::size_t n = chart_basis(chart).size();
  const ChristoffelField gamma = christoffels(conn, chart, f, x);
  // dgamma[m](l, j, k) = d_m Gamma^l_jk
  std::vector<ChristoffelField> dgamma;
  dgamma.reserve(n);
  for (std::size_t m = 0; m < n; ++m) {
    RealVector xp = x;
    RealVector xm = x;
    xp(static_cast<Eigen::Index>(m)) += kCurvatureStep;
    xm(static_cast<Eigen::Index>(m)) -= kCurvatureStep;
    const ChristoffelField gp = christoffels(conn, chart, f, xp);
    const ChristoffelField gm = christoffels(conn, chart, f, xm);
    ChristoffelField d(x, n);
    for (std::size_t l = 0; l < n; ++l) {
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = 0; k < n; ++k) {
          d(l, j, k) = (gp(l, j, k) - gm(l, j, k)) / (2.0 * kCurvatureStep);
        }
      }
    }
    dgamma.push_back(std::move(d));
  }

  double worst = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          double r = dgamma[i](l, j, k) - dgamma[j](l, i, k);
          for (std::size_t m = 0; m < n; ++m) {
            r += gamma(l, i, m) * gamma(m, j, k) - gamma(l, j, m) * gamma(m, i, k);
          }
          worst = std::max(worst, std::abs(r));
        }
      }
    }
  }
  return worst;
}

double flatness_residual(const Connection& conn, const Chart& chart,
                         const std::vector<RealVector>& grid, const OperatorMonotoneFunction& f) {
  std::vector<double> per_point(grid.size(), 0.0);
  parallel_for(grid.size(), [&](std::size_t p) { per_point[p] = curvature_max(conn, chart, grid[p], f); });
  double worst = 0.0;
  for (double v : per_point) worst = std::max(worst, v);
  return worst;
}

}  // namespace qig
