#include "qig/io.hpp"

#include <fstream>
#include <sstream>

namespace qig {

nlohmann::json density_matrix_to_json(const DensityMatrix& rho) {
  const ComplexMatrix& m = rho.matrix().matrix();
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json re_row = nlohmann::json::array();
    nlohmann::json im_row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) {
      re_row.push_back(m(i, k).real());
      im_row.push_back(m(i, k).imag());
    }
    re.push_back(std::move(re_row));
    im.push_back(std::move(im_row));
  }
  return {{"dim", rho.dim()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

DensityMatrix density_matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("re") || !j.contains("im")) {
    throw InvalidParameter("density matrix JSON needs \"dim\", \"re\" and \"im\"");
  }
  const int dim = j.at("dim").get<int>();
  if (dim < 1) throw InvalidDimension("density matrix dim must be positive");
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  auto check_rows = [dim](const nlohmann::json& rows, const char* name) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != dim) {
      throw InvalidDimension(std::string("\"") + name + "\" must have dim rows");
    }
    for (const auto& row : rows) {
      if (!row.is_array() || static_cast<int>(row.size()) != dim) {
        throw InvalidDimension(std::string("\"") + name + "\" rows must have dim entries");
      }
    }
  };
  check_rows(re, "re");
  check_rows(im, "im");
  ComplexMatrix m(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int k = 0; k < dim; ++k) m(i, k) = Complex(re[i][k].get<double>(), im[i][k].get<double>());
  }
  return DensityMatrix(HermitianMatrix(m));
}

void write_density_matrix(const std::filesystem::path& path, const DensityMatrix& rho) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << density_matrix_to_json(rho).dump(2) << '\n';
  if (!out) throw Error("failed writing " + path.string());
}

DensityMatrix read_density_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw InvalidParameter(path.string() + ": " + e.what());
  }
  return density_matrix_from_json(j);
}

}  // namespace qig
