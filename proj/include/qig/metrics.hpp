// metrics.hpp - monotone Riemannian metrics generated by operator monotone
// functions
//
// For a symmetric function f with f(t) = t f(1/t), the metric at rho acts on
// minus-representation tangents through the kernel
//
//   K_rho(B)_ab = B_ab / (p_b f(p_a / p_b))        (rho eigenbasis)
//
// so that g_rho(A, B) = Tr(A K_rho(B)). Some references use the name K for
// the inverse map R^1/2 f(L R^-1) R^1/2.

#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "qig/manifold.hpp"

namespace qig {

struct OperatorMonotoneFunction {
  std::string name;
  std::function<double(double)> eval;
  // Whether f is claimed operator monotone (false for negative controls).
  bool monotone_claim = true;
  // The generated metric is scale * g_f. Keeps f(1) = 1 for scaled members.
  double scale = 1.0;

  double operator()(double t) const { return eval(t); }
};

// Registered members in this order: bkm, sld, rld, wy, bad.
const std::vector<OperatorMonotoneFunction>& registered_functions();

// Looks up a registered function by name. Accepts "<c>*<name>" for a scalar
// multiple of the metric, e.g. "2*bkm". Throws InvalidParameter.
OperatorMonotoneFunction find_function(std::string_view name);

OperatorMonotoneFunction bkm_function();
OperatorMonotoneFunction scaled(const OperatorMonotoneFunction& f, double c);

// Kernel interpolation: 1/f_s = (1 - s)/f0 + s/f1, i.e. the metric
// (1 - s) g_f0 + s g_f1. Symmetry and f(1) = 1 are inherited.
OperatorMonotoneFunction kernel_interpolation(const OperatorMonotoneFunction& f0,
                                              const OperatorMonotoneFunction& f1, double s);

// max |f(t) - t f(1/t)| / max(1, |f(t)|) over a log-spaced grid on [1e-6, 1e6].
double symmetry_residual(const OperatorMonotoneFunction& f, int points = 241);

class MetricKernel {
 public:
  MetricKernel(const OperatorMonotoneFunction& f, const DensityMatrix& rho);

  const DensityMatrix& base() const { return base_; }
  // scale / (p_b f(p_a / p_b)) in the eigenbasis of the base point.
  const RealMatrix& multipliers() const { return multipliers_; }

  HermitianMatrix apply(const HermitianMatrix& a) const;

 private:
  DensityMatrix base_;
  RealMatrix multipliers_;
};

HermitianMatrix petz_kernel_apply(const OperatorMonotoneFunction& f, const DensityMatrix& rho,
                                  const HermitianMatrix& a);

// Tr(A^- K_rho(B^-)). Throws BaseMismatch when the base points differ.
double monotone_metric(const OperatorMonotoneFunction& f, const TangentVector& a,
                       const TangentVector& b);

enum class BkmMethod { trace_pairing, lambda_integral, resolvent_integral };

std::string to_string(BkmMethod method);

// BKM metric via one of its three equivalent expressions:
//   trace_pairing       Tr(A^- B^+)
//   lambda_integral     int_0^1 Tr(rho^l A^+ rho^(1-l) B^+) dl   (64-node Gauss-Legendre)
//   resolvent_integral  int_0^inf Tr((t+rho)^-1 A^- (t+rho)^-1 B^-) dt
double bkm_metric(const TangentVector& a, const TangentVector& b, BkmMethod method);

// Resolvent integral applied to arbitrary Hermitian arguments. After
// t = s/(1-s) the integrand in the eigenbasis is
// A_ab B_ba / ((s + p_a (1-s)) (s + p_b (1-s))) on [0, 1].
double bkm_resolvent_form(const DensityMatrix& rho, const HermitianMatrix& a,
                          const HermitianMatrix& b);

struct MetricMatrix {
  RealVector point;
  RealMatrix entries;
};

// g_ij = g_f(d_i, d_j) over coordinate vectors. Throws NumericalDegeneracy if
// the result is not positive definite.
MetricMatrix metric_matrix_in_chart(const OperatorMonotoneFunction& f, const Chart& chart,
                                    const RealVector& x);

// Same, reusing an evaluated jet.
RealMatrix metric_matrix(const OperatorMonotoneFunction& f, const ChartJet& jet);

// A0 B0 + g_f(A^-, B^-) with A = A0 rho + A^-, A0 = Tr(A).
double extend_metric(const OperatorMonotoneFunction& f, const DensityMatrix& rho,
                     const HermitianMatrix& a, const HermitianMatrix& b);

}  // namespace qig
