#include "nhqm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nhqm/error.hpp"

namespace nhqm {

namespace {

// sum_n g_n |L_n><L_n| without a positivity requirement on g.
ComplexMatrix weighted_left_sum(const EigenSystem& es, std::span<const double> g) {
  require_dim(es.dim(), static_cast<Index>(g.size()), "metric coefficients");
  ComplexMatrix out = ComplexMatrix::Zero(es.dim(), es.dim());
  for (Index n = 0; n < es.dim(); ++n) out += g[n] * es.left(n) * es.left(n).adjoint();
  return out;
}

// Squared magnitudes |c_kn <L_n|R_n>|^2 of the computational basis expansion.
Eigen::MatrixXd basis_weights(const EigenSystem& es) {
  const Index dim = es.dim();
  Eigen::MatrixXd w(dim, dim);
  for (Index n = 0; n < dim; ++n) {
    const Complex kappa = es.overlap(n);
    for (Index k = 0; k < dim; ++k) {
      // c_kn = <L_n|e_k> / <L_n|R_n>
      const Complex c_kn = std::conj(es.left()(k, n)) / kappa;
      w(k, n) = std::norm(c_kn * kappa);
    }
  }
  return w;
}

}  // namespace

Representation canonical_representation(const EigenSystem& es) {
  return Representation{es, build_metric_canonical(es)};
}

HilbertMap::HilbertMap(ComplexMatrix forward, ComplexMatrix inverse, EigenSystem source,
                       EigenSystem target, GramMetric source_metric, GramMetric target_metric,
                       double mismatch)
    : forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      source_(std::move(source)),
      target_(std::move(target)),
      source_metric_(std::move(source_metric)),
      target_metric_(std::move(target_metric)),
      spectrum_mismatch_(mismatch) {
  const Index dim = forward_.rows();
  residuals_.inverse = (forward_ * inverse_ - ComplexMatrix::Identity(dim, dim)).norm();
  for (Index n = 0; n < dim; ++n) {
    residuals_.eigenvectors = std::max(
        residuals_.eigenvectors, (forward_ * source_.right(n) - target_.right(n)).norm());
  }
  const ComplexMatrix& g1 = source_metric_.matrix();
  residuals_.metric =
      (g1 - forward_.adjoint() * target_metric_.matrix() * forward_).norm() / g1.norm();
}

HilbertMap build_map(const Representation& src, const Representation& dst, const ToleranceSet& tol) {
  const Index dim = src.es.dim();
  require_dim(dim, dst.es.dim(), "target eigensystem");
  require_dim(dim, src.metric.dim(), "source metric");
  require_dim(dim, dst.metric.dim(), "target metric");

  const double e_scale = std::max(1.0, src.es.eigenvalues().cwiseAbs().maxCoeff());
  const double threshold = tol.deg * e_scale;
  std::vector<Index> pairing(static_cast<std::size_t>(dim));
  std::vector<bool> used(static_cast<std::size_t>(dim), false);
  double mismatch = 0.0;
  for (Index n = 0; n < dim; ++n) {
    Index best = -1;
    double best_dist = std::numeric_limits<double>::infinity();
    for (Index m = 0; m < dim; ++m) {
      if (used[m]) continue;
      const double dist = std::abs(src.es.eigenvalue(n) - dst.es.eigenvalue(m));
      if (dist < best_dist) {
        best_dist = dist;
        best = m;
      }
    }
    if (best_dist > threshold) {
      throw Error(ErrorKind::SpectraMismatch,
                  "no target eigenvalue within " + std::to_string(threshold) + " of E_" +
                      std::to_string(n) + " (closest gap " + std::to_string(best_dist) + ")");
    }
    used[best] = true;
    pairing[n] = best;
    mismatch = std::max(mismatch, best_dist);
  }

  const ComplexMatrix& g1 = src.metric.matrix();
  const ComplexMatrix& g2 = dst.metric.matrix();
  ComplexMatrix r1(dim, dim), l1(dim, dim), r2(dim, dim), l2(dim, dim);
  ComplexVector values(dim);
  for (Index n = 0; n < dim; ++n) {
    const Index m = pairing[n];
    values(n) = src.es.eigenvalue(n);
    // Unit G-norm right vectors; L1 compensates so <L1_n|R1_n> is unchanged.
    const double s1 = std::sqrt(src.es.right(n).dot(g1 * src.es.right(n)).real());
    const double s2 = std::sqrt(dst.es.right(m).dot(g2 * dst.es.right(m)).real());
    r1.col(n) = src.es.right(n) / s1;
    l1.col(n) = src.es.left(n) * s1;
    r2.col(n) = dst.es.right(m) / s2;
    const Complex kappa1 = l1.col(n).dot(r1.col(n));
    const Complex kappa2 = dst.es.left(m).dot(r2.col(n));
    l2.col(n) = dst.es.left(m) * std::conj(kappa1 / kappa2);
  }
  EigenSystem source(values, r1, l1, 1e-6);
  EigenSystem target(values, r2, l2, 1e-6);

  // Biorthogonality gives the inverses: R^-1 = diag(1/kappa) L^dagger.
  ComplexVector inv_kappa(dim);
  for (Index n = 0; n < dim; ++n) inv_kappa(n) = 1.0 / source.overlap(n);
  ComplexMatrix forward = r2 * inv_kappa.asDiagonal() * l1.adjoint();
  ComplexMatrix inverse = r1 * inv_kappa.asDiagonal() * l2.adjoint();

  return HilbertMap(std::move(forward), std::move(inverse), std::move(source), std::move(target),
                    src.metric, dst.metric, mismatch);
}

StateVector transport_state(const HilbertMap& map, const StateVector& v) {
  require_dim(map.forward().rows(), v.size(), "state");
  return map.forward() * v;
}

ComplexMatrix transport_operator(const HilbertMap& map, const ComplexMatrix& q) {
  require_square(q, "operator");
  require_dim(map.forward().rows(), q.rows(), "operator");
  return map.forward() * q * map.inverse();
}

NormMatchResult solve_norm_matching(const EigenSystem& src, std::span<const double> g1,
                                    const EigenSystem& dst) {
  const Index dim = src.dim();
  require_dim(dim, dst.dim(), "target eigensystem");
  require_dim(dim, static_cast<Index>(g1.size()), "source coefficients");

  const Eigen::Map<const Eigen::VectorXd> g1_vec(g1.data(), dim);
  const Eigen::VectorXd target_norms = basis_weights(src) * g1_vec;
  const Eigen::MatrixXd system = basis_weights(dst);

  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::SingularSystem, "norm-matching system has rank " +
                                               std::to_string(lu.rank()) + " < " +
                                               std::to_string(dim));
  }
  Eigen::VectorXd g2 = lu.solve(target_norms);
  g2 += lu.solve(target_norms - system * g2);

  NormMatchResult result;
  result.g.assign(g2.data(), g2.data() + dim);
  for (Index n = 0; n < dim; ++n) {
    if (!(g2(n) > 0.0)) result.nonpositive.push_back(n);
  }
  result.feasible = result.nonpositive.empty();
  result.norm_residual =
      (system * g2 - target_norms).cwiseAbs().maxCoeff() / target_norms.cwiseAbs().maxCoeff();
  if (!std::isfinite(result.norm_residual)) {
    throw Error(ErrorKind::SingularSystem, "norm-matching solution is not finite");
  }
  return result;
}

double overlap_residual(const EigenSystem& src, std::span<const double> g1,
                        const EigenSystem& dst, std::span<const double> g2) {
  require_dim(src.dim(), dst.dim(), "target eigensystem");
  const ComplexMatrix diff = weighted_left_sum(src, g1) - weighted_left_sum(dst, g2);
  double worst = 0.0;
  for (Index k = 0; k < diff.rows(); ++k) {
    for (Index l = 0; l < diff.cols(); ++l) {
      if (k != l) worst = std::max(worst, std::abs(diff(k, l)));
    }
  }
  return worst;
}

}  // namespace nhqm
