#include "qig/metrics.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "qig/spectral.hpp"

namespace qig {

namespace {

double bkm_eval(double t) {
  if (t == 1.0) return 1.0;
  const double x = t - 1.0;
  if (std::abs(x) < 0.5) return x / std::log1p(x);
  return x / std::log(t);
}

std::vector<OperatorMonotoneFunction> make_registry() {
  return {
      {"bkm", bkm_eval, true, 1.0},
      {"sld", [](double t) { return 0.5 * (1.0 + t); }, true, 1.0},
      {"rld", [](double t) { return 2.0 * t / (1.0 + t); }, true, 1.0},
      {"wy",
       [](double t) {
         const double h = 0.5 * (1.0 + std::sqrt(t));
         return h * h;
       },
       true, 1.0},
      // convex, not operator monotone
      {"bad", [](double t) { return (1.0 + t * t) / (1.0 + t); }, false, 1.0},
  };
}

void check_same_base(const TangentVector& a, const TangentVector& b) {
  const ComplexMatrix& ma = a.base().matrix().matrix();
  const ComplexMatrix& mb = b.base().matrix().matrix();
  if (ma.rows() != mb.rows() || (ma - mb).cwiseAbs().maxCoeff() > 1e-13) {
    throw BaseMismatch("tangent vectors are based at different points");
  }
}

}  // namespace

const std::vector<OperatorMonotoneFunction>& registered_functions() {
  static const std::vector<OperatorMonotoneFunction> registry = make_registry();
  return registry;
}

OperatorMonotoneFunction bkm_function() { return registered_functions().front(); }

OperatorMonotoneFunction scaled(const OperatorMonotoneFunction& f, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidParameter("metric scale must be positive");
  OperatorMonotoneFunction out = f;
  std::ostringstream os;
  os << c << "*" << f.name;
  out.name = os.str();
  out.scale = f.scale * c;
  return out;
}

OperatorMonotoneFunction find_function(std::string_view name) {
  double c = 1.0;
  if (const auto star = name.find('*'); star != std::string_view::npos) {
    const std::string_view factor = name.substr(0, star);
    const auto [ptr, ec] = std::from_chars(factor.data(), factor.data() + factor.size(), c);
    if (ec != std::errc() || ptr != factor.data() + factor.size()) {
      throw InvalidParameter("bad metric scale in \"" + std::string(name) + "\"");
    }
    name = name.substr(star + 1);
  }
  for (const auto& f : registered_functions()) {
    if (f.name == name) return c == 1.0 ? f : scaled(f, c);
  }
  throw InvalidParameter("unknown function \"" + std::string(name) + "\" (expected bkm|sld|rld|wy|bad)");
}

OperatorMonotoneFunction kernel_interpolation(const OperatorMonotoneFunction& f0,
                                              const OperatorMonotoneFunction& f1, double s) {
  if (!(s >= 0.0 && s <= 1.0)) throw InvalidParameter("interpolation weight must lie in [0, 1]");
  if (f0.scale != 1.0 || f1.scale != 1.0) throw InvalidParameter("interpolate unscaled functions");
  std::ostringstream os;
  os << "interp(" << f0.name << "," << f1.name << "," << s << ")";
  auto e0 = f0.eval;
  auto e1 = f1.eval;
  return {os.str(),
          [e0, e1, s](double t) { return 1.0 / ((1.0 - s) / e0(t) + s / e1(t)); },
          f0.monotone_claim && f1.monotone_claim, 1.0};
}

double symmetry_residual(const OperatorMonotoneFunction& f, int points) {
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    const double t = std::pow(10.0, -6.0 + 12.0 * k / (points - 1));
    const double ft = f(t);
    const double mirrored = t * f(1.0 / t);
    worst = std::max(worst, std::abs(ft - mirrored) / std::max(1.0, std::abs(ft)));
  }
  return worst;
}

// ---------------------------------------------------------------------------

MetricKernel::MetricKernel(const OperatorMonotoneFunction& f, const DensityMatrix& rho)
    : base_(rho) {
  const RealVector& p = rho.eigenvalues();
  const Eigen::Index n = p.size();
  multipliers_.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a; b < n; ++b) {
      const double m = f.scale / (p(b) * f(p(a) / p(b)));
      multipliers_(a, b) = m;
      multipliers_(b, a) = m;
    }
  }
}

HermitianMatrix MetricKernel::apply(const HermitianMatrix& a) const {
  return HermitianMatrix(
      spectral::hadamard_in_basis(base_.eigenvectors(), multipliers_, a.matrix()));
}

HermitianMatrix petz_kernel_apply(const OperatorMonotoneFunction& f, const DensityMatrix& rho,
                                  const HermitianMatrix& a) {
  return MetricKernel(f, rho).apply(a);
}

double monotone_metric(const OperatorMonotoneFunction& f, const TangentVector& a,
                       const TangentVector& b) {
  check_same_base(a, b);
  const TangentVector am = rep_convert(a, Rep::minus);
  const TangentVector bm = rep_convert(b, Rep::minus);
  return trace_product(am.payload(), petz_kernel_apply(f, a.base(), bm.payload()));
}

std::string to_string(BkmMethod method) {
  switch (method) {
    case BkmMethod::trace_pairing: return "trace-pairing";
    case BkmMethod::lambda_integral: return "lambda-integral";
    case BkmMethod::resolvent_integral: return "resolvent-integral";
  }
  return "unknown";
}

namespace {

// Re(A_ab B_ba) in the eigenbasis of rho.
RealMatrix pair_coefficients(const DensityMatrix& rho, const HermitianMatrix& a,
                             const HermitianMatrix& b) {
  const ComplexMatrix at = rho.to_eigenbasis(a.matrix());
  const ComplexMatrix bt = rho.to_eigenbasis(b.matrix());
  return at.cwiseProduct(bt.transpose()).real();
}

double lambda_integral(const DensityMatrix& rho, const HermitianMatrix& a,
                       const HermitianMatrix& b) {
  const RealMatrix c = pair_coefficients(rho, a, b);
  const RealVector& p = rho.eigenvalues();
  const RealVector log_p = p.array().log();
  const Eigen::Index n = p.size();
  auto integrand = [&](double lambda) {
    double acc = 0.0;
    for (Eigen::Index x = 0; x < n; ++x) {
      for (Eigen::Index y = 0; y < n; ++y) {
        acc += c(x, y) * std::exp(lambda * log_p(x) + (1.0 - lambda) * log_p(y));
      }
    }
    return acc;
  };
  return boost::math::quadrature::gauss<double, 64>::integrate(integrand, 0.0, 1.0);
}

}  // namespace

double bkm_resolvent_form(const DensityMatrix& rho, const HermitianMatrix& a,
                          const HermitianMatrix& b) {
  const RealMatrix c = pair_coefficients(rho, a, b);
  const RealVector& p = rho.eigenvalues();
  const Eigen::Index n = p.size();
  auto integrand = [&](double s) {
    double acc = 0.0;
    for (Eigen::Index x = 0; x < n; ++x) {
      const double dx = s + p(x) * (1.0 - s);
      for (Eigen::Index y = 0; y < n; ++y) {
        acc += c(x, y) / (dx * (s + p(y) * (1.0 - s)));
      }
    }
    return acc;
  };
  // The integrand varies on the scale of the smallest eigenvalue near s = 0,
  // so the rule is applied on decade panels [10^-(k+1), 10^-k].
  using rule = boost::math::quadrature::gauss<double, 128>;
  constexpr int kDecades = 14;
  double total = rule::integrate(integrand, 0.0, std::pow(10.0, -kDecades));
  for (int k = kDecades; k > 0; --k) {
    total += rule::integrate(integrand, std::pow(10.0, -k), std::pow(10.0, -k + 1));
  }
  return total;
}

double bkm_metric(const TangentVector& a, const TangentVector& b, BkmMethod method) {
  check_same_base(a, b);
  const DensityMatrix& rho = a.base();
  switch (method) {
    case BkmMethod::trace_pairing:
      return trace_product(rep_convert(a, Rep::minus).payload(), rep_convert(b, Rep::plus).payload());
    case BkmMethod::lambda_integral:
      return lambda_integral(rho, rep_convert(a, Rep::plus).payload(),
                             rep_convert(b, Rep::plus).payload());
    case BkmMethod::resolvent_integral:
      return bkm_resolvent_form(rho, rep_convert(a, Rep::minus).payload(),
                                rep_convert(b, Rep::minus).payload());
  }
  throw InvalidParameter("unknown BKM method");
}

RealMatrix metric_matrix(const OperatorMonotoneFunction& f, const ChartJet& jet) {
  const MetricKernel kernel(f, jet.state());
  const std::size_t n = jet.size();
  std::vector<HermitianMatrix> k_d;
  k_d.reserve(n);
  for (std::size_t j = 0; j < n; ++j) k_d.push_back(kernel.apply(jet.d_rho(j)));
  RealMatrix g(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double v = 0.5 * (trace_product(jet.d_rho(i), k_d[j]) + trace_product(jet.d_rho(j), k_d[i]));
      g(i, j) = v;
      g(j, i) = v;
    }
  }
  return g;
}

MetricMatrix metric_matrix_in_chart(const OperatorMonotoneFunction& f, const Chart& chart,
                                    const RealVector& x) {
  RealMatrix g = metric_matrix(f, chart_jet(chart, x));
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(g, Eigen::EigenvaluesOnly);
  const double smallest = solver.eigenvalues().minCoeff();
  if (!(smallest > 0.0)) {
    std::ostringstream os;
    os << "metric matrix not positive definite (smallest eigenvalue " << smallest
       << "); chart point too close to the boundary";
    throw NumericalDegeneracy(os.str());
  }
  return {x, std::move(g)};
}

double extend_metric(const OperatorMonotoneFunction& f, const DensityMatrix& rho,
                     const HermitianMatrix& a, const HermitianMatrix& b) {
  const double a0 = a.trace();
  const double b0 = b.trace();
  const HermitianMatrix am = a - a0 * rho.matrix();
  const HermitianMatrix bm = b - b0 * rho.matrix();
  return a0 * b0 + trace_product(am, petz_kernel_apply(f, rho, bm));
}

}  // namespace qig
