// sampling.hpp - seeded random states, tangents and chart points

#pragma once

#include <cstdint>
#include <random>

#include "qig/manifold.hpp"

namespace qig {

using Rng = std::mt19937_64;

// Weight of I/N mixed into sampled states so they clear the eigenvalue floor.
inline constexpr double kSampleMixing = 1e-3;
// Radius bound for sampled exponential coordinates.
inline constexpr double kSampleRadius = 1.5;

ComplexMatrix gaussian_complex(int rows, int cols, Rng& rng);

// G G^dagger / Tr, then (1 - w) rho + w I/N with w = kSampleMixing.
DensityMatrix random_state(int dim, Rng& rng);

HermitianMatrix random_hermitian(int dim, Rng& rng);
HermitianMatrix random_traceless(int dim, Rng& rng);

// Random tangent at rho carried in the requested representation.
TangentVector random_tangent(const DensityMatrix& rho, Rep rep, Rng& rng);

// Uniform direction, radius uniform in [0, radius].
RealVector random_exp_coords(std::size_t n, Rng& rng, double radius = kSampleRadius);

}  // namespace qig
