#include "nhqm/biortho.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nhqm/error.hpp"

namespace nhqm {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

// Scale factor that brings v to unit norm with its largest-magnitude
// component real positive.
Complex unit_phase_factor(const Eigen::Ref<const ComplexVector>& v) {
  Index k = 0;
  v.cwiseAbs().maxCoeff(&k);
  return std::conj(v(k)) / (std::abs(v(k)) * v.norm());
}

void require_state(const BiorthogonalBasis& basis, const StateVector& v, const char* what) {
  require_dim(basis.dim(), v.size(), what);
  if (!v.allFinite()) throw Error(ErrorKind::NonFinite, std::string(what) + " has NaN/Inf entries");
}

void require_nonzero(const StateVector& v, const char* what) {
  if (v.norm() == 0.0) throw Error(ErrorKind::ZeroVector, std::string(what) + " is the zero vector");
}

void require_operator(const BiorthogonalBasis& basis, const ComplexMatrix& q) {
  require_square(q, "operator");
  require_dim(basis.dim(), q.rows(), "operator");
  require_finite(q, "operator");
}

// Scales L so that <L_n|R_n> = 1 while leaving R untouched.
EigenSystem biorthonormalized(const EigenSystem& es) {
  std::vector<Complex> right(static_cast<std::size_t>(es.dim()), 1.0);
  std::vector<Complex> left(static_cast<std::size_t>(es.dim()));
  for (Index n = 0; n < es.dim(); ++n) left[n] = 1.0 / std::conj(es.overlap(n));
  return es.rescaled(right, left);
}

EigenSystem right_unit(const EigenSystem& es) {
  std::vector<Complex> right(static_cast<std::size_t>(es.dim()));
  std::vector<Complex> left(right.size());
  for (Index n = 0; n < es.dim(); ++n) {
    const Complex alpha = unit_phase_factor(es.right(n));
    right[n] = alpha;
    left[n] = 1.0 / std::conj(alpha * es.overlap(n));
  }
  return es.rescaled(right, left);
}

EigenSystem left_unit(const EigenSystem& es) {
  std::vector<Complex> right(static_cast<std::size_t>(es.dim()));
  std::vector<Complex> left(right.size());
  for (Index n = 0; n < es.dim(); ++n) {
    const Complex beta = unit_phase_factor(es.left(n));
    left[n] = beta;
    right[n] = 1.0 / (std::conj(beta) * es.overlap(n));
  }
  return es.rescaled(right, left);
}

}  // namespace

std::string gauge_label(const GaugeChoice& g) {
  return std::visit(overloaded{
                        [](const gauge::RightUnit&) -> std::string { return "right_unit"; },
                        [](const gauge::LeftUnit&) -> std::string { return "left_unit"; },
                        [](const gauge::RandomScale& r) -> std::string {
                          return "random_scale:" + std::to_string(r.seed);
                        },
                        [](const gauge::ExplicitScale&) -> std::string { return "explicit_scale"; },
                    },
                    g);
}

std::vector<double> random_scale_norms(std::uint64_t seed, Index dim) {
  std::mt19937_64 engine(seed);
  std::vector<double> out(static_cast<std::size_t>(dim));
  // 53 random mantissa bits mapped onto (0, 1]; zero is unreachable.
  for (auto& u : out) u = static_cast<double>((engine() >> 11) + 1) * 0x1.0p-53;
  return out;
}

BiorthogonalBasis::BiorthogonalBasis(EigenSystem es, GaugeChoice gauge)
    : es_(std::move(es)), gauge_(std::move(gauge)) {
  const ComplexMatrix overlaps = es_.left().adjoint() * es_.right();
  const double err = (overlaps - ComplexMatrix::Identity(dim(), dim())).cwiseAbs().maxCoeff();
  if (err > 1e-8) {
    throw Error(ErrorKind::DefectiveOperator,
                "basis violates <L_m|R_n> = delta_mn (max deviation " + std::to_string(err) + ")");
  }
}

BiorthogonalBasis apply_gauge(const EigenSystem& es, const GaugeChoice& gauge) {
  return std::visit(
      overloaded{
          [&](const gauge::RightUnit& g) { return BiorthogonalBasis(right_unit(es), g); },
          [&](const gauge::LeftUnit& g) { return BiorthogonalBasis(left_unit(es), g); },
          [&](const gauge::RandomScale& g) {
            const EigenSystem base = right_unit(es);
            const auto norms = random_scale_norms(g.seed, es.dim());
            std::vector<Complex> right(norms.size());
            std::vector<Complex> left(norms.size());
            for (std::size_t n = 0; n < norms.size(); ++n) {
              right[n] = std::sqrt(norms[n]);
              left[n] = 1.0 / std::sqrt(norms[n]);
            }
            return BiorthogonalBasis(base.rescaled(right, left), g);
          },
          [&](const gauge::ExplicitScale& g) {
            require_dim(es.dim(), static_cast<Index>(g.c.size()), "explicit gauge scales");
            std::vector<Complex> left(g.c.size());
            for (std::size_t n = 0; n < g.c.size(); ++n) {
              if (g.c[n] == 0.0) {
                throw Error(ErrorKind::ZeroScale, "c_" + std::to_string(n) + " is zero");
              }
              left[n] = 1.0 / std::conj(g.c[n]);
            }
            return BiorthogonalBasis(biorthonormalized(es).rescaled(g.c, left), g);
          },
      },
      gauge);
}

ComplexVector expand(const BiorthogonalBasis& basis, const StateVector& v) {
  require_state(basis, v, "state");
  return basis.eigensystem().left().adjoint() * v;
}

Complex biortho_inner(const BiorthogonalBasis& basis, const StateVector& u, const StateVector& v) {
  require_state(basis, u, "left argument");
  require_state(basis, v, "right argument");
  return expand(basis, u).dot(expand(basis, v));
}

StateVector associated_vector(const BiorthogonalBasis& basis, const StateVector& v) {
  return basis.eigensystem().left() * expand(basis, v);
}

double transition_probability(const BiorthogonalBasis& basis, const StateVector& u,
                              const StateVector& v) {
  require_state(basis, u, "left argument");
  require_state(basis, v, "right argument");
  require_nonzero(u, "left argument");
  require_nonzero(v, "right argument");
  const ComplexVector a = expand(basis, u);
  const ComplexVector b = expand(basis, v);
  const double p = std::norm(a.dot(b)) / (a.squaredNorm() * b.squaredNorm());
  return std::clamp(p, 0.0, 1.0);
}

Eigen::VectorXd energy_probabilities(const BiorthogonalBasis& basis, const StateVector& v) {
  require_state(basis, v, "state");
  require_nonzero(v, "state");
  const Eigen::VectorXd weights = expand(basis, v).cwiseAbs2();
  return weights / weights.sum();
}

Complex biortho_expectation(const BiorthogonalBasis& basis, const ComplexMatrix& q,
                            const StateVector& v) {
  require_operator(basis, q);
  require_state(basis, v, "state");
  require_nonzero(v, "state");
  const StateVector assoc = associated_vector(basis, v);
  return assoc.dot(q * v) / assoc.dot(v);
}

ComplexMatrix decompose_operator(const BiorthogonalBasis& basis, const ComplexMatrix& q) {
  require_operator(basis, q);
  const EigenSystem& es = basis.eigensystem();
  return es.left().adjoint() * q * es.right();
}

ComplexMatrix compose_operator(const BiorthogonalBasis& basis, const ComplexMatrix& coefficients) {
  require_operator(basis, coefficients);
  const EigenSystem& es = basis.eigensystem();
  return es.right() * coefficients * es.left().adjoint();
}

bool is_biortho_hermitian(const BiorthogonalBasis& basis, const ComplexMatrix& q, double tol) {
  const ComplexMatrix coeffs = decompose_operator(basis, q);
  return (coeffs - coeffs.adjoint()).norm() <= tol * coeffs.norm();
}

Complex projector_expectation(const BiorthogonalBasis& basis, Index site, Index n) {
  const Index dim = basis.dim();
  if (site < 0 || site >= dim || n < 0 || n >= dim) {
    throw Error(ErrorKind::IndexOutOfRange, "site " + std::to_string(site) + ", eigenstate " +
                                                std::to_string(n) + " outside dim " +
                                                std::to_string(dim));
  }
  const EigenSystem& es = basis.eigensystem();
  return std::conj(es.left()(site, n)) * es.right()(site, n) / es.overlap(n);
}

}  // namespace nhqm
