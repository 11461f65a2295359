#include "nhqm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <string>
#include <vector>

#include "nhqm/error.hpp"

namespace nhqm {

namespace {

// Pairing residual: off-diagonal overlaps relative to the geometric mean of
// the diagonal ones, so the value does not move under rescaling of pairs.
double pairing_residual_of(const ComplexMatrix& right, const ComplexMatrix& left) {
  const ComplexMatrix overlaps = left.adjoint() * right;
  double worst = 0.0;
  for (Index m = 0; m < overlaps.rows(); ++m) {
    for (Index n = 0; n < overlaps.cols(); ++n) {
      if (m == n) continue;
      const double denom = std::sqrt(std::abs(overlaps(m, m)) * std::abs(overlaps(n, n)));
      worst = std::max(worst, std::abs(overlaps(m, n)) / denom);
    }
  }
  return worst;
}

}  // namespace

bool is_finite(const ComplexMatrix& a) { return a.allFinite(); }

void require_square(const ComplexMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw Error(ErrorKind::NonSquare, std::string(what) + " must be square with dim >= 1, got " +
                                          std::to_string(a.rows()) + "x" +
                                          std::to_string(a.cols()));
  }
}

void require_finite(const ComplexMatrix& a, const char* what) {
  if (!a.allFinite()) throw Error(ErrorKind::NonFinite, std::string(what) + " has NaN/Inf entries");
}

void require_dim(Index expected, Index actual, const char* what) {
  if (expected != actual) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": expected dimension " +
                                                  std::to_string(expected) + ", got " +
                                                  std::to_string(actual));
  }
}

EigenSystem::EigenSystem(ComplexVector eigenvalues, ComplexMatrix right, ComplexMatrix left,
                         double pairing_tol)
    : eigenvalues_(std::move(eigenvalues)), right_(std::move(right)), left_(std::move(left)) {
  const Index n = eigenvalues_.size();
  if (n < 1) throw Error(ErrorKind::InvalidSize, "eigensystem must have dim >= 1");
  require_dim(n, right_.rows(), "right eigenvector rows");
  require_dim(n, right_.cols(), "right eigenvector columns");
  require_dim(n, left_.rows(), "left eigenvector rows");
  require_dim(n, left_.cols(), "left eigenvector columns");
  if (!eigenvalues_.allFinite() || !right_.allFinite() || !left_.allFinite()) {
    throw Error(ErrorKind::NonFinite, "eigensystem has NaN/Inf entries");
  }
  for (Index k = 0; k < n; ++k) {
    const double ratio = std::abs(overlap(k)) / (left_.col(k).norm() * right_.col(k).norm());
    if (!(ratio > 0.0)) {
      throw Error(ErrorKind::DefectiveOperator,
                  "<L_n|R_n> vanishes for n = " + std::to_string(k));
    }
  }
  pairing_residual_ = pairing_residual_of(right_, left_);
  if (pairing_residual_ > pairing_tol) {
    throw Error(ErrorKind::DefectiveOperator,
                "left/right vectors are not biorthogonal (residual " +
                    std::to_string(pairing_residual_) + ")");
  }
}

EigenSystem EigenSystem::rescaled(std::span<const Complex> right_scale,
                                  std::span<const Complex> left_scale) const {
  require_dim(dim(), static_cast<Index>(right_scale.size()), "right scale");
  require_dim(dim(), static_cast<Index>(left_scale.size()), "left scale");
  ComplexMatrix r = right_;
  ComplexMatrix l = left_;
  for (Index n = 0; n < dim(); ++n) {
    if (right_scale[n] == 0.0 || left_scale[n] == 0.0) {
      throw Error(ErrorKind::ZeroScale, "scale factor for n = " + std::to_string(n) + " is zero");
    }
    r.col(n) *= right_scale[n];
    l.col(n) *= left_scale[n];
  }
  return EigenSystem(eigenvalues_, std::move(r), std::move(l), 1e-6);
}

EigenSystem EigenSystem::transformed(const ComplexMatrix& similarity) const {
  require_square(similarity, "similarity");
  require_dim(dim(), similarity.rows(), "similarity");
  const ComplexMatrix r = similarity * right_;
  // S^-dagger L = (S^dagger)^-1 L
  const ComplexMatrix l = solve_linear(similarity.adjoint(), left_, 1e-9);
  return EigenSystem(eigenvalues_, r, l, 1e-6);
}

Eigen::VectorXd balancing_scale(const ComplexMatrix& a) {
  // Minimizes F(x) = sum_{i != j} |a_ij|^2 exp(2 (x_j - x_i)), the squared
  // Frobenius norm of D^-1 A D with D = diag(exp(x)). F is convex in x, its
  // Hessian is a weighted graph Laplacian. Coordinate-wise balancing stalls
  // on long chains with asymmetric hopping (row and column sums already agree
  // in the interior), so take damped Newton steps on the whole vector.
  const Index n = a.rows();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  if (n < 2) return Eigen::VectorXd::Ones(n);
  Eigen::MatrixXd w = a.cwiseAbs2();
  w.diagonal().setZero();
  const double w_max = w.maxCoeff();
  if (w_max == 0.0) return Eigen::VectorXd::Ones(n);
  w /= w_max;

  constexpr double max_range = 200.0;  // keeps exp(x_j - x_i) far from overflow
  const auto scaled = [&](const Eigen::VectorXd& v) {
    Eigen::MatrixXd b(n, n);
    for (Index j = 0; j < n; ++j) {
      for (Index i = 0; i < n; ++i) b(i, j) = w(i, j) == 0.0 ? 0.0 : w(i, j) * std::exp(2.0 * (v(j) - v(i)));
    }
    return b;
  };

  Eigen::MatrixXd b = scaled(x);
  double f = b.sum();
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::VectorXd col = b.colwise().sum().transpose();
    const Eigen::VectorXd row = b.rowwise().sum();
    const Eigen::VectorXd grad = 2.0 * (col - row);
    Eigen::MatrixXd hess = -4.0 * (b + b.transpose());
    hess.diagonal() = 4.0 * (col + row);
    // Damping lifts the constant null vector and any disconnected directions.
    hess.diagonal().array() += 1e-12 * hess.diagonal().maxCoeff() + 1e-300;
    const Eigen::VectorXd step = -hess.ldlt().solve(grad);
    const double decrement = -grad.dot(step);
    if (!(decrement > 1e-14 * f)) break;

    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      Eigen::VectorXd trial = x + t * step;
      trial.array() -= trial.mean();
      if (trial.maxCoeff() - trial.minCoeff() > max_range) continue;
      Eigen::MatrixXd b_trial = scaled(trial);
      const double f_trial = b_trial.sum();
      if (f_trial <= f - 0.25 * t * decrement) {
        x = std::move(trial);
        b = std::move(b_trial);
        f = f_trial;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }

  // Powers of two keep the similarity exact in floating point.
  Eigen::VectorXd d(n);
  for (Index i = 0; i < n; ++i) d(i) = std::exp2(std::round(x(i) / std::numbers::ln2));
  return d;
}

EigenSystem eigendecompose(const ComplexMatrix& h, const ToleranceSet& tol) {
  require_square(h, "operator");
  require_finite(h, "operator");
  const Index n = h.rows();
  const double h_norm = h.norm();
  const double scale = h_norm > 0.0 ? h_norm : 1.0;

  const Eigen::VectorXd d = balancing_scale(h);
  const ComplexMatrix balanced = d.cwiseInverse().asDiagonal() * h * d.asDiagonal();

  Eigen::ComplexEigenSolver<ComplexMatrix> solver(balanced, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "complex eigensolver did not converge");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const ComplexVector& raw_values = solver.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Index x, Index y) {
    const Complex ex = raw_values(x);
    const Complex ey = raw_values(y);
    if (ex.real() != ey.real()) return ex.real() < ey.real();
    return ex.imag() < ey.imag();
  });

  ComplexVector values(n);
  ComplexMatrix right_bal(n, n);
  for (Index k = 0; k < n; ++k) {
    values(k) = raw_values(order[static_cast<std::size_t>(k)]);
    right_bal.col(k) = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    right_bal.col(k).normalize();
  }

  // Left vectors are the rows of R^-1, computed in balanced coordinates where
  // the columns of R are unit vectors.
  Eigen::FullPivLU<ComplexMatrix> lu(right_bal);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::DefectiveOperator, "eigenvectors do not span the space");
  }
  const ComplexMatrix left_bal = lu.inverse().adjoint();
  if (!left_bal.allFinite()) {
    throw Error(ErrorKind::DefectiveOperator, "eigenvectors do not span the space");
  }
  for (Index k = 0; k < n; ++k) {
    const double ratio = 1.0 / left_bal.col(k).norm();
    if (!(ratio >= tol.bio)) {
      throw Error(ErrorKind::DefectiveOperator,
                  "|<L_n|R_n>|/(|L_n||R_n|) = " + std::to_string(ratio) + " for n = " +
                      std::to_string(k));
    }
  }

  // Back to the original coordinates: unit-norm R_n with the largest component
  // real positive, L_n rescaled to keep <L_n|R_n> = 1.
  ComplexMatrix right = d.asDiagonal() * right_bal;
  ComplexMatrix left = d.cwiseInverse().asDiagonal() * left_bal;
  for (Index k = 0; k < n; ++k) {
    Index top = 0;
    right.col(k).cwiseAbs().maxCoeff(&top);
    const Complex alpha = std::conj(right(top, k)) / (std::abs(right(top, k)) * right.col(k).norm());
    right.col(k) *= alpha;
    left.col(k) /= std::conj(alpha);
  }

  const ComplexMatrix h_adj = h.adjoint();
  for (Index k = 0; k < n; ++k) {
    const double right_res = (h * right.col(k) - values(k) * right.col(k)).norm() / right.col(k).norm();
    const double left_res =
        (h_adj * left.col(k) - std::conj(values(k)) * left.col(k)).norm() / left.col(k).norm();
    if (!(right_res <= tol.eig * scale) || !(left_res <= tol.eig * scale)) {
      throw Error(ErrorKind::DefectiveOperator,
                  "eigenpair residual too large for n = " + std::to_string(k) + " (right " +
                      std::to_string(right_res) + ", left " + std::to_string(left_res) + ")");
    }
  }

  double min_gap = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) min_gap = std::min(min_gap, std::abs(values(i) - values(j)));
  }
  if (min_gap < tol.deg * scale) {
    throw Error(ErrorKind::DegenerateSpectrum,
                "eigenvalues closer than " + std::to_string(tol.deg * scale) + " (gap " +
                    std::to_string(min_gap) + ")");
  }

  EigenSystem es(values, right, left, 1.0);
  if (es.pairing_residual() > tol.bio) {
    throw Error(ErrorKind::DefectiveOperator,
                "biorthogonality residual " + std::to_string(es.pairing_residual()));
  }
  return es;
}

ComplexMatrix solve_linear(const ComplexMatrix& a, const ComplexMatrix& b, double tol_solve) {
  require_square(a, "system matrix");
  require_finite(a, "system matrix");
  require_dim(a.rows(), b.rows(), "right-hand side");
  if (!b.allFinite()) throw Error(ErrorKind::NonFinite, "right-hand side has NaN/Inf entries");
  Eigen::FullPivLU<ComplexMatrix> lu(a);
  if (!lu.isInvertible()) throw Error(ErrorKind::SingularMatrix, "matrix is rank deficient");
  ComplexMatrix x = lu.solve(b);
  x += lu.solve(b - a * x);  // one step of refinement
  const double b_norm = b.norm();
  const double residual = (a * x - b).norm();
  if (!x.allFinite() || residual > tol_solve * b_norm) {
    throw Error(ErrorKind::SingularMatrix, "residual " + std::to_string(residual) +
                                               " exceeds tolerance; matrix is numerically singular");
  }
  return x;
}

ComplexVector solve_linear(const ComplexMatrix& a, const ComplexVector& b, double tol_solve) {
  return solve_linear(a, ComplexMatrix(b), tol_solve).col(0);
}

double condition_estimate(const ComplexMatrix& a) {
  require_square(a, "matrix");
  require_finite(a, "matrix");
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return smax / smin;
}

}  // namespace nhqm
