#include "nhqm/error.hpp"
#include "nhqm/experiments.hpp"
#include "nhqm/transport.hpp"

namespace nhqm::experiments {

using json = nlohmann::json;

namespace {

json complex_list(const ComplexVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back({v(i).real(), v(i).imag()});
  return out;
}

json error_section(const Error& e) {
  return {{"status", "failed"}, {"error", std::string(nhqm::to_string(e.kind()))}, {"message", e.what()}};
}

ComplexMatrix build_transport_model(const TransportConfig& cfg) {
  ComplexMatrix h = build_model(cfg.model, cfg.gamma);
  if (cfg.similarity) {
    require_square(*cfg.similarity, "similarity");
    require_dim(h.rows(), cfg.similarity->rows(), "similarity");
    h = *cfg.similarity * h * solve_linear(*cfg.similarity, ComplexMatrix::Identity(h.rows(), h.cols()).eval(), 1e-9);
  }
  return h;
}

json describe(const TransportConfig& cfg, Index dim) {
  json out = {{"N", dim}, {"gamma", cfg.gamma}, {"gauge", gauge_label(cfg.gauge)},
              {"similarity", cfg.similarity.has_value()}};
  if (const auto* f = std::get_if<MatrixFileModel>(&cfg.model)) {
    out["model"] = "matrix_file";
    out["path"] = f->path.string();
  } else {
    out["model"] = "hatano_nelson";
  }
  return out;
}

}  // namespace

json run_transport_report(const TransportConfig& a, const TransportConfig& b) {
  const Index dim_a = model_dim(a.model);
  const Index dim_b = model_dim(b.model);
  if (dim_a != dim_b) {
    throw Error(ErrorKind::ConfigError, "representations differ in dimension (" +
                                            std::to_string(dim_a) + " vs " + std::to_string(dim_b) + ")");
  }

  json report;
  report["source"] = describe(a, dim_a);
  report["target"] = describe(b, dim_b);

  std::optional<Representation> src;
  std::optional<Representation> dst;
  try {
    src = canonical_representation(apply_gauge(eigendecompose(build_transport_model(a)), a.gauge).eigensystem());
    dst = canonical_representation(apply_gauge(eigendecompose(build_transport_model(b)), b.gauge).eigensystem());
  } catch (const Error& e) {
    report["eigensystems"] = error_section(e);
    return report;
  }
  report["eigensystems"] = {{"status", "ok"},
                            {"source_eigenvalues", complex_list(src->es.eigenvalues())},
                            {"target_eigenvalues", complex_list(dst->es.eigenvalues())}};

  try {
    const HilbertMap map = build_map(*src, *dst);
    const auto& res = map.residuals();
    report["map"] = {{"status", "ok"},
                     {"metric_residual", res.metric},
                     {"inverse_residual", res.inverse},
                     {"eigenvector_residual", res.eigenvectors},
                     {"spectrum_match_error", map.spectrum_mismatch()}};
  } catch (const Error& e) {
    report["map"] = error_section(e);
  }

  const std::vector<double> g1 = canonical_coefficients(src->es);
  try {
    const NormMatchResult match = solve_norm_matching(src->es, g1, dst->es);
    report["norm_matching"] = {{"status", match.feasible ? "feasible" : "infeasible"},
                               {"g_source", g1},
                               {"g_target", match.g},
                               {"nonpositive_indices", match.nonpositive},
                               {"norm_residual", match.norm_residual}};
    report["overlap_residual"] = overlap_residual(src->es, g1, dst->es, match.g);
  } catch (const Error& e) {
    report["norm_matching"] = error_section(e);
  }
  return report;
}

}  // namespace nhqm::experiments
