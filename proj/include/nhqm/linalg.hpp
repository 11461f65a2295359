#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

namespace nhqm {

using Complex = std::complex<double>;
using Index = Eigen::Index;

// Square, finite-valued by contract; every public entry point validates.
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Tolerances for the eigensolver. `eig`, `bio` and `deg` are relative to
/// the Frobenius norm of the decomposed operator; `bio` is also used as the
/// (dimensionless) threshold of the non-defectiveness test.
struct ToleranceSet {
  double eig = 1e-10;
  double bio = 1e-10;
  double deg = 1e-8;
  double solve = 1e-12;
};

// Right and left eigenvectors of a non-defective operator, stored as columns
// and paired index by index: <L_m|R_n> = 0 for m != n, <L_n|R_n> != 0.
// The relative scale of each pair is free; see `rescaled`.
class EigenSystem {
 public:
  EigenSystem(ComplexVector eigenvalues, ComplexMatrix right, ComplexMatrix left,
              double pairing_tol = 1e-8);

  Index dim() const { return eigenvalues_.size(); }
  const ComplexVector& eigenvalues() const { return eigenvalues_; }
  Complex eigenvalue(Index n) const { return eigenvalues_(n); }
  const ComplexMatrix& right() const { return right_; }
  const ComplexMatrix& left() const { return left_; }
  auto right(Index n) const { return right_.col(n); }
  auto left(Index n) const { return left_.col(n); }

  /// <L_n|R_n>
  Complex overlap(Index n) const { return left_.col(n).dot(right_.col(n)); }

  /// max_{m != n} |<L_m|R_n>| / sqrt(|<L_m|R_m>| |<L_n|R_n>|); scale invariant.
  double pairing_residual() const { return pairing_residual_; }

  /// R_n -> right_scale[n] R_n and L_n -> left_scale[n] L_n.
  EigenSystem rescaled(std::span<const Complex> right_scale,
                       std::span<const Complex> left_scale) const;

  /// Eigensystem of S H S^-1 given this one of H: R -> S R, L -> S^-dagger L.
  EigenSystem transformed(const ComplexMatrix& similarity) const;

 private:
  ComplexVector eigenvalues_;
  ComplexMatrix right_;
  ComplexMatrix left_;
  double pairing_residual_ = 0.0;
};

/// Eigendecomposition of a non-defective, non-degenerate operator.
///
/// Eigenvalues come out sorted by (real, imaginary) ascending. Right vectors
/// have unit norm with their largest-magnitude component real positive; left
/// vectors are the rows of R^-1, so <L_m|R_n> = delta_mn. The solve runs on
/// a diagonally balanced copy of `h` so strongly non-normal operators keep
/// accurate spectra.
///
/// Throws Error with NonSquare, NonFinite, DefectiveOperator,
/// DegenerateSpectrum or NoConvergence.
EigenSystem eigendecompose(const ComplexMatrix& h, const ToleranceSet& tol = {});

/// Solves A x = b. Throws SingularMatrix when A is rank deficient or the
/// residual ||Ax - b|| exceeds tol_solve * ||b||.
ComplexVector solve_linear(const ComplexMatrix& a, const ComplexVector& b,
                           double tol_solve = ToleranceSet{}.solve);
ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b,
                           double tol_solve = ToleranceSet{}.solve);

/// 2-norm condition number; +infinity for exactly singular input.
double condition_estimate(const ComplexMatrix& a);

/// Diagonal D (powers of two) for which D^-1 A D has near-minimal Frobenius
/// norm. Returns the diagonal of D.
Eigen::VectorXd balancing_scale(const ComplexMatrix& a);

void require_square(const ComplexMatrix& a, const char* what);
void require_finite(const ComplexMatrix& a, const char* what);
void require_dim(Index expected, Index actual, const char* what);

bool is_finite(const ComplexMatrix& a);

}  // namespace nhqm
