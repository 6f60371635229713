// io.hpp - JSON file format for density matrices
//
//   {"dim": N, "re": [[...], ...], "im": [[...], ...]}
//
// The reader symmetrizes the matrix and validates manifold membership.

#pragma once

#include <filesystem>

#include <json.hpp>

#include "qig/manifold.hpp"

namespace qig {

nlohmann::json density_matrix_to_json(const DensityMatrix& rho);
DensityMatrix density_matrix_from_json(const nlohmann::json& j);

void write_density_matrix(const std::filesystem::path& path, const DensityMatrix& rho);
DensityMatrix read_density_matrix(const std::filesystem::path& path);

}  // namespace qig
