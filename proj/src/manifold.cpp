#include "qig/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qig/spectral.hpp"

namespace qig {

namespace {

ComplexMatrix check_square(const ComplexMatrix& m) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    std::ostringstream os;
    os << "expected a non-empty square matrix, got " << m.rows() << "x" << m.cols();
    throw InvalidDimension(os.str());
  }
  return m;
}

struct Eigensystem {
  RealVector values;
  ComplexMatrix vectors;
};

Eigensystem eigensystem(const ComplexMatrix& h) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) throw NumericalDegeneracy("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexMatrix from_spectrum_matrix(const RealVector& d, const ComplexMatrix& U) {
  return U * d.cast<Complex>().asDiagonal() * U.adjoint();
}

RealMatrix reciprocal(const RealMatrix& m) { return m.cwiseInverse(); }

}  // namespace

// ---------------------------------------------------------------------------
// HermitianMatrix

HermitianMatrix::HermitianMatrix(const ComplexMatrix& m) {
  check_square(m);
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::zero(int dim) {
  return HermitianMatrix(ComplexMatrix::Zero(dim, dim));
}

HermitianMatrix HermitianMatrix::identity(int dim) {
  return HermitianMatrix(ComplexMatrix::Identity(dim, dim));
}

HermitianMatrix& HermitianMatrix::operator+=(const HermitianMatrix& o) {
  m_ += o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator-=(const HermitianMatrix& o) {
  m_ -= o.m_;
  return *this;
}

HermitianMatrix& HermitianMatrix::operator*=(double s) {
  m_ *= s;
  return *this;
}

double trace_product(const HermitianMatrix& a, const HermitianMatrix& b) {
  // Tr(AB) = sum_ij A_ij B_ji = sum_ij A_ij conj(B_ij) for Hermitian B
  return (a.matrix().array() * b.matrix().conjugate().array()).sum().real();
}

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(HermitianMatrix m, RealVector p, ComplexMatrix U)
    : matrix_(std::move(m)), p_(std::move(p)), U_(std::move(U)) {
  validate();
}

DensityMatrix::DensityMatrix(const HermitianMatrix& m) : matrix_(m) {
  auto es = eigensystem(m.matrix());
  p_ = std::move(es.values);
  U_ = std::move(es.vectors);
  validate();
}

DensityMatrix DensityMatrix::maximally_mixed(int dim) {
  if (dim < 1) throw InvalidDimension("dimension must be positive");
  return from_spectrum(RealVector::Constant(dim, 1.0 / dim), ComplexMatrix::Identity(dim, dim));
}

DensityMatrix DensityMatrix::from_spectrum(const RealVector& p, const ComplexMatrix& U) {
  return DensityMatrix(HermitianMatrix(from_spectrum_matrix(p, U)), p, U);
}

void DensityMatrix::validate() const {
  const double tr = matrix_.trace();
  if (std::abs(tr - 1.0) > kTraceTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "density matrix trace " << tr << " differs from 1";
    throw OutOfManifold(os.str());
  }
  const double smallest = p_.minCoeff();
  if (!(smallest >= kEigenvalueFloor)) {
    std::ostringstream os;
    os << "eigenvalue " << smallest << " below the floor " << kEigenvalueFloor;
    throw OutOfManifold(os.str());
  }
}

HermitianMatrix DensityMatrix::log() const {
  return HermitianMatrix(from_spectrum_matrix(p_.array().log().matrix(), U_));
}

// ---------------------------------------------------------------------------
// TangentVector

std::string to_string(Rep rep) { return rep == Rep::plus ? "plus" : "minus"; }

TangentVector::TangentVector(DensityMatrix base, Rep rep, HermitianMatrix payload)
    : base_(std::move(base)), rep_(rep), payload_(std::move(payload)) {
  if (payload_.dim() != base_.dim()) throw InvalidDimension("tangent payload dimension mismatch");
  const double scale = std::max(1.0, payload_.norm());
  const double defect = rep_ == Rep::minus ? payload_.trace()
                                           : trace_product(base_.matrix(), payload_);
  if (std::abs(defect) > kTangentTolerance * scale) {
    std::ostringstream os;
    os << (rep_ == Rep::minus ? "minus payload trace " : "plus payload Tr(rho A) ") << defect
       << " is not zero";
    throw InvalidTangent(os.str());
  }
}

RealMatrix rep_multipliers(const DensityMatrix& rho) {
  return spectral::log_dd1_matrix(rho.eigenvalues());
}

TangentVector rep_convert(const TangentVector& v, Rep target) {
  if (v.rep() == target) return v;
  const DensityMatrix& rho = v.base();
  RealMatrix F = rep_multipliers(rho);
  if (target == Rep::minus) F = reciprocal(F);
  const ComplexMatrix out = spectral::hadamard_in_basis(rho.eigenvectors(), F, v.payload().matrix());
  return TangentVector(rho, target, HermitianMatrix(out));
}

// ---------------------------------------------------------------------------
// Basis

Basis::Basis(std::vector<HermitianMatrix> elements) : elements_(std::move(elements)) {
  if (elements_.empty()) throw InvalidDimension("basis must be non-empty");
  dim_ = elements_.front().dim();
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (elements_[i].dim() != dim_) throw InvalidDimension("basis elements differ in dimension");
    if (std::abs(elements_[i].trace()) > 1e-12) throw InvalidParameter("basis element not traceless");
    for (std::size_t j = 0; j <= i; ++j) {
      const double expected = i == j ? 1.0 : 0.0;
      if (std::abs(trace_product(elements_[i], elements_[j]) - expected) > 1e-12) {
        throw InvalidParameter("basis is not orthonormal");
      }
    }
  }
}

HermitianMatrix Basis::combine(const RealVector& c) const {
  if (static_cast<std::size_t>(c.size()) != size()) throw InvalidDimension("coefficient count mismatch");
  ComplexMatrix acc = ComplexMatrix::Zero(dim_, dim_);
  for (std::size_t i = 0; i < size(); ++i) acc += c(static_cast<Eigen::Index>(i)) * elements_[i].matrix();
  return HermitianMatrix(acc);
}

RealVector Basis::components(const HermitianMatrix& a) const {
  RealVector c(static_cast<Eigen::Index>(size()));
  for (std::size_t i = 0; i < size(); ++i) c(static_cast<Eigen::Index>(i)) = trace_product(a, elements_[i]);
  return c;
}

Basis make_basis(int dim) {
  if (dim < 2) {
    std::ostringstream os;
    os << "basis dimension must be at least 2, got " << dim;
    throw InvalidDimension(os.str());
  }
  const double r2 = std::sqrt(0.5);
  const Complex I(0.0, 1.0);
  std::vector<HermitianMatrix> out;
  out.reserve(static_cast<std::size_t>(dim * dim - 1));
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
      s(j, k) = r2;
      s(k, j) = r2;
      out.emplace_back(s);
      ComplexMatrix a = ComplexMatrix::Zero(dim, dim);
      a(j, k) = -I * r2;
      a(k, j) = I * r2;
      out.emplace_back(a);
    }
  }
  for (int l = 1; l < dim; ++l) {
    ComplexMatrix d = ComplexMatrix::Zero(dim, dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
    for (int j = 0; j < l; ++j) d(j, j) = norm;
    d(l, l) = -l * norm;
    out.emplace_back(d);
  }
  return Basis(std::move(out));
}

// ---------------------------------------------------------------------------
// Charts

const Basis& chart_basis(const Chart& chart) {
  return std::visit([](const auto& c) -> const Basis& { return c.basis; }, chart);
}

std::string chart_name(const Chart& chart) {
  return std::holds_alternative<ExpChart>(chart) ? "exp" : "mixture";
}

namespace {

struct ExpPoint {
  RealVector log_p;  // lambda - Psi
  ComplexMatrix U;
  double psi;
};

ExpPoint exp_point(const Basis& basis, const RealVector& theta) {
  if (!theta.allFinite()) throw InvalidParameter("exponential coordinates must be finite");
  const auto es = eigensystem(basis.combine(theta).matrix());
  const double top = es.values.maxCoeff();
  const double psi = top + std::log((es.values.array() - top).exp().sum());
  return {(es.values.array() - psi).matrix(), es.vectors, psi};
}

}  // namespace

DensityMatrix state_from_exp_coords(const ExpChart& chart, const RealVector& theta) {
  const ExpPoint pt = exp_point(chart.basis, theta);
  RealVector p = pt.log_p.array().exp();
  p /= p.sum();
  return DensityMatrix::from_spectrum(p, pt.U);
}

RealVector exp_coords_from_state(const ExpChart& chart, const DensityMatrix& rho) {
  if (rho.dim() != chart.basis.dim()) throw InvalidDimension("state and chart dimensions differ");
  return chart.basis.components(rho.log());
}

RealVector mixture_coords_from_state(const MixtureChart& chart, const DensityMatrix& rho) {
  if (rho.dim() != chart.basis.dim()) throw InvalidDimension("state and chart dimensions differ");
  return chart.basis.components(rho.matrix());
}

DensityMatrix state_from_mixture_coords(const MixtureChart& chart, const RealVector& eta) {
  const int N = chart.basis.dim();
  HermitianMatrix m = chart.basis.combine(eta) + (1.0 / N) * HermitianMatrix::identity(N);
  return DensityMatrix(m);
}

DensityMatrix chart_state(const Chart& chart, const RealVector& x) {
  if (const auto* e = std::get_if<ExpChart>(&chart)) return state_from_exp_coords(*e, x);
  return state_from_mixture_coords(std::get<MixtureChart>(chart), x);
}

RealVector chart_coords(const Chart& chart, const DensityMatrix& rho) {
  if (const auto* e = std::get_if<ExpChart>(&chart)) return exp_coords_from_state(*e, rho);
  return mixture_coords_from_state(std::get<MixtureChart>(chart), rho);
}

TangentVector coord_basis_vector(const ExpChart& chart, const RealVector& theta, std::size_t i) {
  if (i >= chart.basis.size()) throw InvalidParameter("coordinate index out of range");
  DensityMatrix rho = state_from_exp_coords(chart, theta);
  const int N = rho.dim();
  const double eta = trace_product(rho.matrix(), chart.basis[i]);
  HermitianMatrix payload = chart.basis[i] - eta * HermitianMatrix::identity(N);
  return TangentVector(std::move(rho), Rep::plus, std::move(payload));
}

// ---------------------------------------------------------------------------
// Chart jets

ChartJet::ChartJet(DensityMatrix state, std::vector<HermitianMatrix> d_rho,
                   std::vector<HermitianMatrix> d_log, std::vector<HermitianMatrix> dd_rho,
                   std::vector<HermitianMatrix> dd_log)
    : state_(std::move(state)),
      d_rho_(std::move(d_rho)),
      d_log_(std::move(d_log)),
      dd_rho_(std::move(dd_rho)),
      dd_log_(std::move(dd_log)) {}

TangentVector ChartJet::coordinate_vector(std::size_t i, Rep rep) const {
  return TangentVector(state_, rep, rep == Rep::plus ? d_log_[i] : d_rho_[i]);
}

namespace {

ChartJet exp_jet(const ExpChart& chart, const RealVector& theta) {
  const Basis& basis = chart.basis;
  const std::size_t n = basis.size();
  const int N = basis.dim();
  const ExpPoint pt = exp_point(basis, theta);
  RealVector p = pt.log_p.array().exp();
  p /= p.sum();
  DensityMatrix rho = DensityMatrix::from_spectrum(p, pt.U);
  const RealVector log_p = p.array().log();

  const RealMatrix exp_dd = reciprocal(spectral::log_dd1_matrix(p));
  const HermitianMatrix one = HermitianMatrix::identity(N);

  std::vector<HermitianMatrix> d_log;
  std::vector<HermitianMatrix> d_rho;
  for (std::size_t i = 0; i < n; ++i) {
    const double eta = trace_product(rho.matrix(), basis[i]);
    d_log.push_back(basis[i] - eta * one);
    d_rho.emplace_back(spectral::hadamard_in_basis(pt.U, exp_dd, d_log.back().matrix()));
  }

  // d_i d_j log rho = -d_i d_j Psi 1, and d_i d_j Psi is the BKM Gram matrix
  std::vector<HermitianMatrix> dd_rho(n * n);
  std::vector<HermitianMatrix> dd_log(n * n);
  auto dd2 = [](double x, double z, double y) { return spectral::exp_dd2(x, z, y); };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double g = 0.5 * (trace_product(d_rho[i], d_log[j]) + trace_product(d_rho[j], d_log[i]));
      const ComplexMatrix second =
          spectral::second_frechet(pt.U, log_p, dd2, d_log[i].matrix(), d_log[j].matrix());
      HermitianMatrix rho_ij = HermitianMatrix(second) - g * rho.matrix();
      HermitianMatrix log_ij = -g * one;
      dd_rho[i * n + j] = rho_ij;
      dd_rho[j * n + i] = rho_ij;
      dd_log[i * n + j] = log_ij;
      dd_log[j * n + i] = log_ij;
    }
  }
  return ChartJet(std::move(rho), std::move(d_rho), std::move(d_log), std::move(dd_rho),
                  std::move(dd_log));
}

ChartJet mixture_jet(const MixtureChart& chart, const RealVector& eta) {
  const Basis& basis = chart.basis;
  const std::size_t n = basis.size();
  const int N = basis.dim();
  DensityMatrix rho = state_from_mixture_coords(chart, eta);
  const RealVector& p = rho.eigenvalues();
  const ComplexMatrix& U = rho.eigenvectors();
  const RealMatrix log_dd = spectral::log_dd1_matrix(p);

  std::vector<HermitianMatrix> d_rho = basis.elements();
  std::vector<HermitianMatrix> d_log;
  for (std::size_t i = 0; i < n; ++i) {
    d_log.emplace_back(spectral::hadamard_in_basis(U, log_dd, basis[i].matrix()));
  }
  std::vector<HermitianMatrix> dd_rho(n * n, HermitianMatrix::zero(N));
  std::vector<HermitianMatrix> dd_log(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      HermitianMatrix log_ij(spectral::second_frechet(U, p, spectral::log_dd2, basis[i].matrix(),
                                                      basis[j].matrix()));
      dd_log[i * n + j] = log_ij;
      dd_log[j * n + i] = log_ij;
    }
  }
  return ChartJet(std::move(rho), std::move(d_rho), std::move(d_log), std::move(dd_rho),
                  std::move(dd_log));
}

}  // namespace

ChartJet chart_jet(const Chart& chart, const RealVector& x) {
  if (static_cast<std::size_t>(x.size()) != chart_basis(chart).size()) {
    throw InvalidDimension("chart point has the wrong number of coordinates");
  }
  if (const auto* e = std::get_if<ExpChart>(&chart)) return exp_jet(*e, x);
  return mixture_jet(std::get<MixtureChart>(chart), x);
}

}  // namespace qig
