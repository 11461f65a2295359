#pragma once

#include <span>
#include <vector>

#include "nhqm/linalg.hpp"
#include "nhqm/metric.hpp"

namespace nhqm {

// One Hilbert-space representation of a Hamiltonian: its eigensystem and the
// metric defining the inner product.
struct Representation {
  EigenSystem es;
  GramMetric metric;
};

Representation canonical_representation(const EigenSystem& es);

struct MapResiduals {
  double inverse = 0.0;      // ||T T^-1 - 1||
  double eigenvectors = 0.0;  // max_n ||T R1_n - R2_n|| (normalized vectors)
  double metric = 0.0;        // ||G1 - T^dagger G2 T|| / ||G1||
};

// Linear map T with T|R1_n> = |R2_n> between two representations sharing a
// spectrum, where both right families carry unit G-norm and the left families
// are scaled so that <L1_n|R1_n> = <L2_n|R2_n>.
class HilbertMap {
 public:
  const ComplexMatrix& forward() const { return forward_; }
  const ComplexMatrix& inverse() const { return inverse_; }
  /// Source/target eigensystems after normalization; target is reordered to
  /// pair with the source eigenvalue by eigenvalue.
  const EigenSystem& source() const { return source_; }
  const EigenSystem& target() const { return target_; }
  const GramMetric& source_metric() const { return source_metric_; }
  const GramMetric& target_metric() const { return target_metric_; }
  /// max_n |E1_n - E2_n| after pairing.
  double spectrum_mismatch() const { return spectrum_mismatch_; }
  const MapResiduals& residuals() const { return residuals_; }

 private:
  friend HilbertMap build_map(const Representation&, const Representation&, const ToleranceSet&);
  HilbertMap(ComplexMatrix forward, ComplexMatrix inverse, EigenSystem source, EigenSystem target,
             GramMetric source_metric, GramMetric target_metric, double mismatch);

  ComplexMatrix forward_;
  ComplexMatrix inverse_;
  EigenSystem source_;
  EigenSystem target_;
  GramMetric source_metric_;
  GramMetric target_metric_;
  double spectrum_mismatch_;
  MapResiduals residuals_;
};

/// Throws DimensionMismatch, or SpectraMismatch when greedy nearest-neighbour
/// pairing of the eigenvalues leaves a gap above tol.deg * max(1, max|E|).
HilbertMap build_map(const Representation& src, const Representation& dst,
                     const ToleranceSet& tol = {});

/// T v
StateVector transport_state(const HilbertMap& map, const StateVector& v);

/// T Q T^-1
ComplexMatrix transport_operator(const HilbertMap& map, const ComplexMatrix& q);

struct NormMatchResult {
  /// Solution of the N x N system; may contain non-positive entries.
  std::vector<double> g;
  /// True when every g_n > 0, i.e. the solution defines an inner product.
  bool feasible = false;
  std::vector<Index> nonpositive;
  /// max_k |<e_k|G1|e_k> - <e_k|G2|e_k>| relative to max_k <e_k|G1|e_k>.
  double norm_residual = 0.0;
};

/// Chooses g2 so that every computational basis vector keeps its norm:
///   sum_n g2_n |c2_kn <L2_n|R2_n>|^2 = sum_n g1_n |c1_kn <L1_n|R1_n>|^2
/// where |e_k> = sum_n c_kn |R_n>. Throws SingularSystem when the system is
/// rank deficient.
NormMatchResult solve_norm_matching(const EigenSystem& src, std::span<const double> g1,
                                    const EigenSystem& dst);

/// max_{k != l} |<e_k|G1|e_l> - <e_k|G2|e_l>| with G = sum_n g_n |L_n><L_n|.
/// Coefficients need not be positive.
double overlap_residual(const EigenSystem& src, std::span<const double> g1,
                        const EigenSystem& dst, std::span<const double> g2);

}  // namespace nhqm
