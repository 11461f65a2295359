#pragma once

#include <optional>
#include <span>
#include <vector>

#include "nhqm/biortho.hpp"
#include "nhqm/linalg.hpp"

namespace nhqm {

// Hermitian positive-definite matrix G defining (u, v)_G = <u|G|v>.
//
// Metrics built from an eigensystem have the form G = sum_n g_n |L_n><L_n|
// with all g_n > 0 and keep both the coefficients and the eigensystem they
// refer to. The coefficients only have meaning together with that
// eigensystem's scaling of the L_n.
class GramMetric {
 public:
  /// Wraps an arbitrary matrix; throws NonPositiveCoefficient unless it is
  /// Hermitian (to 1e-10 relative) and positive definite.
  static GramMetric from_matrix(const ComplexMatrix& g);

  /// sum_n coefficients[n] |L_n><L_n|; coefficients must be positive.
  static GramMetric from_eigensystem(const EigenSystem& es, std::vector<double> coefficients);

  Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const std::optional<std::vector<double>>& coefficients() const { return coefficients_; }
  const std::optional<EigenSystem>& source() const { return source_; }

  /// G^-1 x via a linear solve; G^-1 is never formed.
  ComplexMatrix solve(const ComplexMatrix& x) const;

  double min_eigenvalue() const;

 private:
  GramMetric(ComplexMatrix g, std::optional<std::vector<double>> coefficients,
             std::optional<EigenSystem> source);

  ComplexMatrix matrix_;
  std::optional<std::vector<double>> coefficients_;
  std::optional<EigenSystem> source_;
};

/// g_n = <R_n|R_n> / |<L_n|R_n>|^2, invariant under rescaling of either family.
std::vector<double> canonical_coefficients(const EigenSystem& es);

/// G = sum_n g_n |L_n><L_n| with the canonical g_n; equivalently
/// sum_n P_n^dagger P_n. Independent of how the eigenvectors are scaled.
GramMetric build_metric_canonical(const EigenSystem& es);

GramMetric build_metric_general(const EigenSystem& es, std::span<const double> g);

/// P_n = |R_n><L_n| / <L_n|R_n>.
std::vector<ComplexMatrix> projectors(const EigenSystem& es);

Complex metric_inner(const GramMetric& g, const StateVector& u, const StateVector& v);

/// <v|G Q|v> / <v|G|v>
Complex metric_expectation(const GramMetric& g, const ComplexMatrix& q, const StateVector& v);

/// sum_n c_n |R_n> / sqrt(<R_n|R_n>); requires sum |c_n|^2 = 1 to 1e-10.
StateVector represent_state(const EigenSystem& es, const ComplexVector& c);

/// c_n = (R_n, v)_G / sqrt((R_n, R_n)_G) with the canonical G of `es`.
ComplexVector amplitudes(const EigenSystem& es, const StateVector& v);

/// Q* = G^-1 Q^dagger G.
ComplexMatrix adjoint(const GramMetric& g, const ComplexMatrix& q);

inline constexpr double kSelfAdjointTol = 1e-8;

/// ||Q - G^-1 Q^dagger G|| <= tol ||Q||
bool is_self_adjoint(const GramMetric& g, const ComplexMatrix& q, double tol = kSelfAdjointTol);

/// G v
StateVector associated_vector_metric(const GramMetric& g, const StateVector& v);

}  // namespace nhqm
