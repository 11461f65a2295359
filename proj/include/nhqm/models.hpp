#pragma once

#include <filesystem>
#include <string>

#include "nhqm/linalg.hpp"

namespace nhqm {

struct HatanoNelsonSpec {
  Index sites = 20;
  double gamma = 0.0;  // hopping asymmetry
};

/// Open chain: zero diagonal, 1 + gamma on the superdiagonal, 1 - gamma on
/// the subdiagonal. Throws InvalidSize for fewer than two sites.
ComplexMatrix hatano_nelson(const HatanoNelsonSpec& spec);

/// Closed-form spectrum for |gamma| < 1, ascending:
/// 2 sqrt(1 - gamma^2) cos(n pi / (N + 1)).
Eigen::VectorXd hatano_nelson_spectrum(const HatanoNelsonSpec& spec);

// JSON matrix file: {"dim": n, "re": [[...]], "im": [[...]]}, row-major.
ComplexMatrix parse_matrix(const std::string& text);
std::string format_matrix(const ComplexMatrix& m);
ComplexMatrix load_matrix(const std::filesystem::path& path);
void save_matrix(const std::filesystem::path& path, const ComplexMatrix& m);

}  // namespace nhqm
