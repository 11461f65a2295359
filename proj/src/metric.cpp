#include "nhqm/metric.hpp"

#include <cmath>
#include <string>

#include "nhqm/error.hpp"

namespace nhqm {

namespace {

void require_state(Index dim, const StateVector& v, const char* what) {
  require_dim(dim, v.size(), what);
  if (!v.allFinite()) throw Error(ErrorKind::NonFinite, std::string(what) + " has NaN/Inf entries");
}

void require_operator(Index dim, const ComplexMatrix& q) {
  require_square(q, "operator");
  require_dim(dim, q.rows(), "operator");
  require_finite(q, "operator");
}

}  // namespace

GramMetric::GramMetric(ComplexMatrix g, std::optional<std::vector<double>> coefficients,
                       std::optional<EigenSystem> source)
    : matrix_(std::move(g)), coefficients_(std::move(coefficients)), source_(std::move(source)) {}

GramMetric GramMetric::from_matrix(const ComplexMatrix& g) {
  require_square(g, "metric");
  require_finite(g, "metric");
  if ((g - g.adjoint()).norm() > 1e-10 * g.norm()) {
    throw Error(ErrorKind::NonPositiveCoefficient, "metric is not Hermitian");
  }
  ComplexMatrix herm = 0.5 * (g + g.adjoint());
  Eigen::LLT<ComplexMatrix> llt(herm);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::NonPositiveCoefficient, "metric is not positive definite");
  }
  return GramMetric(std::move(herm), std::nullopt, std::nullopt);
}

GramMetric GramMetric::from_eigensystem(const EigenSystem& es, std::vector<double> coefficients) {
  require_dim(es.dim(), static_cast<Index>(coefficients.size()), "metric coefficients");
  for (std::size_t n = 0; n < coefficients.size(); ++n) {
    if (!(coefficients[n] > 0.0) || !std::isfinite(coefficients[n])) {
      throw Error(ErrorKind::NonPositiveCoefficient,
                  "g_" + std::to_string(n) + " = " + std::to_string(coefficients[n]));
    }
  }
  const Eigen::Map<const Eigen::VectorXd> g(coefficients.data(),
                                            static_cast<Index>(coefficients.size()));
  const ComplexMatrix weighted = es.left() * g.cwiseSqrt().asDiagonal();
  ComplexMatrix matrix = weighted * weighted.adjoint();
  matrix = 0.5 * (matrix + matrix.adjoint()).eval();
  return GramMetric(std::move(matrix), std::move(coefficients), es);
}

ComplexMatrix GramMetric::solve(const ComplexMatrix& x) const {
  // Symmetric diagonal equilibration: metrics of strongly non-normal
  // operators span many orders of magnitude along the diagonal.
  const Eigen::VectorXd d = matrix_.diagonal().real().cwiseSqrt().cwiseInverse();
  const ComplexMatrix scaled = d.asDiagonal() * matrix_ * d.asDiagonal();
  const ComplexMatrix y = solve_linear(scaled, ComplexMatrix(d.asDiagonal() * x), 1e-10);
  return d.asDiagonal() * y;
}

double GramMetric::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(matrix_, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

std::vector<double> canonical_coefficients(const EigenSystem& es) {
  std::vector<double> g(static_cast<std::size_t>(es.dim()));
  for (Index n = 0; n < es.dim(); ++n) g[n] = es.right(n).squaredNorm() / std::norm(es.overlap(n));
  return g;
}

GramMetric build_metric_canonical(const EigenSystem& es) {
  return GramMetric::from_eigensystem(es, canonical_coefficients(es));
}

GramMetric build_metric_general(const EigenSystem& es, std::span<const double> g) {
  return GramMetric::from_eigensystem(es, std::vector<double>(g.begin(), g.end()));
}

std::vector<ComplexMatrix> projectors(const EigenSystem& es) {
  std::vector<ComplexMatrix> out;
  out.reserve(static_cast<std::size_t>(es.dim()));
  for (Index n = 0; n < es.dim(); ++n) {
    out.push_back(es.right(n) * es.left(n).adjoint() / es.overlap(n));
  }
  return out;
}

Complex metric_inner(const GramMetric& g, const StateVector& u, const StateVector& v) {
  require_state(g.dim(), u, "left argument");
  require_state(g.dim(), v, "right argument");
  return u.dot(g.matrix() * v);
}

Complex metric_expectation(const GramMetric& g, const ComplexMatrix& q, const StateVector& v) {
  require_operator(g.dim(), q);
  require_state(g.dim(), v, "state");
  if (v.norm() == 0.0) throw Error(ErrorKind::ZeroVector, "state is the zero vector");
  const StateVector gv = g.matrix() * v;
  return gv.dot(q * v) / gv.dot(v);
}

StateVector represent_state(const EigenSystem& es, const ComplexVector& c) {
  require_state(es.dim(), c, "amplitudes");
  const double total = c.squaredNorm();
  if (std::abs(total - 1.0) > 1e-10) {
    throw Error(ErrorKind::NotNormalized, "sum |c_n|^2 = " + std::to_string(total));
  }
  StateVector v = StateVector::Zero(es.dim());
  for (Index n = 0; n < es.dim(); ++n) v += c(n) * es.right(n) / es.right(n).norm();
  return v;
}

ComplexVector amplitudes(const EigenSystem& es, const StateVector& v) {
  require_state(es.dim(), v, "state");
  if (v.norm() == 0.0) throw Error(ErrorKind::ZeroVector, "state is the zero vector");
  const GramMetric g = build_metric_canonical(es);
  ComplexVector c(es.dim());
  for (Index n = 0; n < es.dim(); ++n) {
    const StateVector rn = es.right(n);
    c(n) = metric_inner(g, rn, v) / std::sqrt(metric_inner(g, rn, rn).real());
  }
  return c;
}

ComplexMatrix adjoint(const GramMetric& g, const ComplexMatrix& q) {
  require_operator(g.dim(), q);
  return g.solve(q.adjoint() * g.matrix());
}

bool is_self_adjoint(const GramMetric& g, const ComplexMatrix& q, double tol) {
  return (q - adjoint(g, q)).norm() <= tol * q.norm();
}

StateVector associated_vector_metric(const GramMetric& g, const StateVector& v) {
  require_state(g.dim(), v, "state");
  return g.matrix() * v;
}

}  // namespace nhqm
