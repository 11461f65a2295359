#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "nhqm/linalg.hpp"

namespace nhqm {

// Components in the fixed computational basis {|e_k>}.
using StateVector = ComplexVector;

namespace gauge {
/// <R_n|R_n> = 1, <L_n|R_n> = 1.
struct RightUnit {};
/// <L_n|L_n> = 1, <L_n|R_n> = 1.
struct LeftUnit {};
/// <R_n|R_n> drawn uniformly from (0, 1] per n, <L_n|R_n> = 1.
struct RandomScale {
  std::uint64_t seed = 0;
};
/// R_n -> c_n R_n, L_n -> L_n / conj(c_n) on top of the incoming scaling.
struct ExplicitScale {
  std::vector<Complex> c;
};
}  // namespace gauge

using GaugeChoice =
    std::variant<gauge::RightUnit, gauge::LeftUnit, gauge::RandomScale, gauge::ExplicitScale>;

std::string gauge_label(const GaugeChoice& g);

/// The (0, 1] draws a RandomScale gauge uses for <R_n|R_n>, n = 0..dim-1.
std::vector<double> random_scale_norms(std::uint64_t seed, Index dim);

// An eigensystem rescaled so that <L_m|R_n> = delta_mn, together with the
// gauge that produced it.
class BiorthogonalBasis {
 public:
  BiorthogonalBasis(EigenSystem es, GaugeChoice gauge);

  Index dim() const { return es_.dim(); }
  const EigenSystem& eigensystem() const { return es_; }
  const GaugeChoice& gauge() const { return gauge_; }

 private:
  EigenSystem es_;
  GaugeChoice gauge_;
};

BiorthogonalBasis apply_gauge(const EigenSystem& es, const GaugeChoice& gauge);

/// Coefficients a_n = <L_n|v> of v = sum_n a_n |R_n>.
ComplexVector expand(const BiorthogonalBasis& basis, const StateVector& v);

/// (u, v)_B = sum_n conj(a_n) b_n.
Complex biortho_inner(const BiorthogonalBasis& basis, const StateVector& u, const StateVector& v);

/// sum_n a_n |L_n> for a = expand(basis, v).
StateVector associated_vector(const BiorthogonalBasis& basis, const StateVector& v);

double transition_probability(const BiorthogonalBasis& basis, const StateVector& u,
                              const StateVector& v);

/// p_n = |a_n|^2 / sum_m |a_m|^2.
Eigen::VectorXd energy_probabilities(const BiorthogonalBasis& basis, const StateVector& v);

/// <v~|Q|v> / <v~|v>. Returned as is, also when Q is not biorthogonally
/// Hermitian.
Complex biortho_expectation(const BiorthogonalBasis& basis, const ComplexMatrix& q,
                            const StateVector& v);

/// q_mn = <L_m|Q|R_n>, so that Q = sum_mn q_mn |R_m><L_n|.
ComplexMatrix decompose_operator(const BiorthogonalBasis& basis, const ComplexMatrix& q);

/// sum_mn q_mn |R_m><L_n|
ComplexMatrix compose_operator(const BiorthogonalBasis& basis, const ComplexMatrix& coefficients);

bool is_biortho_hermitian(const BiorthogonalBasis& basis, const ComplexMatrix& q, double tol);

/// <L_n|e_k><e_k|R_n> / <L_n|R_n>; gauge invariant. Real for operators
/// with a real spectrum and real entries, complex in general.
Complex projector_expectation(const BiorthogonalBasis& basis, Index site, Index n);

}  // namespace nhqm
