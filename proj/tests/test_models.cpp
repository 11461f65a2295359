#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <numbers>

#include "check_error.hpp"
#include "nhqm/models.hpp"
#include "test_support.hpp"

using namespace nhqm;
using namespace nhqm::testing;

namespace {

// Eigenvalues through the diagonal similarity S = diag(r^k),
// r = sqrt((1 - gamma) / (1 + gamma)), which turns the chain into a
// Hermitian tridiagonal matrix.
Eigen::VectorXd symmetrized_spectrum(Index n, double gamma) {
  const double r = std::sqrt((1.0 - gamma) / (1.0 + gamma));
  Eigen::VectorXd s(n);
  for (Index k = 0; k < n; ++k) s(k) = std::pow(r, double(k + 1));
  const ComplexMatrix h = hatano_nelson({n, gamma});
  const ComplexMatrix sym = s.cwiseInverse().cast<Complex>().asDiagonal() * h * s.cast<Complex>().asDiagonal();
  REQUIRE(max_abs(sym - sym.adjoint()) < 1e-14);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

Eigen::VectorXd closed_form(Index n, double gamma) {
  Eigen::VectorXd e(n);
  for (Index k = 1; k <= n; ++k) e(k - 1) = 2.0 * std::sqrt(1.0 - gamma * gamma) * std::cos(k * std::numbers::pi / (n + 1));
  std::sort(e.begin(), e.end());
  return e;
}

}  // namespace

TEST_CASE("hatano_nelson: two sites") {
  CHECK(hatano_nelson({2, 0.5}) == hn2::h());
}

TEST_CASE("hatano_nelson: structure") {
  const ComplexMatrix h = hatano_nelson({7, 0.25});
  for (Index i = 0; i < 7; ++i) {
    for (Index j = 0; j < 7; ++j) {
      const Complex expected = j == i + 1 ? 1.25 : (i == j + 1 ? 0.75 : 0.0);
      CHECK(h(i, j) == expected);
    }
  }
  const ComplexMatrix h0 = hatano_nelson({9, 0.0});
  CHECK(h0 == h0.transpose());
}

TEST_CASE("hatano_nelson: errors") {
  CHECK_ERROR_KIND(hatano_nelson({1, 0.0}), ErrorKind::InvalidSize);
  CHECK_ERROR_KIND(hatano_nelson({0, 0.0}), ErrorKind::InvalidSize);
  CHECK_ERROR_KIND(hatano_nelson({4, std::nan("")}), ErrorKind::NonFinite);
  CHECK_ERROR_KIND(hatano_nelson_spectrum({4, 1.0}), ErrorKind::ConfigError);
}

TEST_CASE("spectrum: closed form agrees with the symmetrized matrix") {
  for (Index n : {2, 3, 5, 8, 16, 33, 64}) {
    for (double gamma : {0.0, 0.3, 0.6, 0.9}) {
      const Eigen::VectorXd oracle = symmetrized_spectrum(n, gamma);
      CHECK((oracle - closed_form(n, gamma)).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((hatano_nelson_spectrum({n, gamma}) - oracle).cwiseAbs().maxCoeff() < 1e-12);
      const EigenSystem es = eigendecompose(hatano_nelson({n, gamma}));
      CHECK((es.eigenvalues().real() - oracle).cwiseAbs().maxCoeff() < 1e-9);
      CHECK(es.eigenvalues().imag().cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("parse_matrix") {
  const ComplexMatrix m = parse_matrix(R"({"dim": 2, "re": [[0, 1.5], [0.5, 0]], "im": [[0, 0], [0, -2]]})");
  CHECK(m(0, 1) == Complex(1.5, 0.0));
  CHECK(m(1, 0) == Complex(0.5, 0.0));
  CHECK(m(1, 1) == Complex(0.0, -2.0));

  CHECK_ERROR_KIND(parse_matrix(R"({"dim": 2, "re": [[0, 1], [1, 0]], "im": [[0, 0]]})"), ErrorKind::ParseError);
  CHECK_ERROR_KIND(parse_matrix(R"({"dim": 2, "re": [[0, 1], [1, 0]], "im": [[0, 0], [0]]})"), ErrorKind::ParseError);
  CHECK_ERROR_KIND(parse_matrix(R"({"dim": 2, "re": [[0, 1, 2], [1, 0, 2]], "im": [[0, 0, 0], [0, 0, 0]]})"),
                   ErrorKind::NonSquare);
  CHECK_ERROR_KIND(parse_matrix(R"({"dim": 3, "re": [[0, 1], [1, 0]], "im": [[0, 0], [0, 0]]})"), ErrorKind::ParseError);
  CHECK_ERROR_KIND(parse_matrix(R"({"re": [[0, 1], [1, 0]], "im": [[0, 0], [0, 0]]})"), ErrorKind::ParseError);
  CHECK_ERROR_KIND(parse_matrix(R"({"dim": 2, "re": [[0, "x"], [1, 0]], "im": [[0, 0], [0, 0]]})"), ErrorKind::ParseError);
  CHECK_ERROR_KIND(parse_matrix("not json"), ErrorKind::ParseError);
  CHECK_ERROR_KIND(parse_matrix("[1, 2]"), ErrorKind::ParseError);
}

TEST_CASE("property: matrix files round-trip exactly") {
  std::mt19937_64 rng(51);
  const auto dir = std::filesystem::temp_directory_path() / "nhqm_test_models";
  std::filesystem::create_directories(dir);
  for (int trial = 0; trial < 10; ++trial) {
    const ComplexMatrix m = random_matrix(rng, 1 + trial);
    CHECK(parse_matrix(format_matrix(m)) == m);
    const auto path = dir / ("m" + std::to_string(trial) + ".json");
    save_matrix(path, m);
    CHECK(load_matrix(path) == m);
  }
  CHECK_ERROR_KIND(load_matrix(dir / "missing.json"), ErrorKind::ParseError);
  std::filesystem::remove_all(dir);
}
