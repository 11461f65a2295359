#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "nhqm/biortho.hpp"
#include "nhqm/models.hpp"

namespace nhqm::experiments {

struct MatrixFileModel {
  std::filesystem::path path;
};

using ModelSpec = std::variant<HatanoNelsonSpec, MatrixFileModel>;

/// e_{k1} + e_{k2} + ... with 1-based site labels.
struct SiteCombination {
  std::vector<Index> sites;
};
/// Probability amplitudes over the energy eigenbasis, represented per gamma.
struct EnergyAmplitudes {
  std::vector<Complex> c;
};
/// Explicit components in the computational basis.
struct ExplicitVector {
  std::vector<Complex> components;
};
using StateSpec = std::variant<SiteCombination, EnergyAmplitudes, ExplicitVector>;

enum class InnerProduct { Biorthogonal, CanonicalMetric };

struct ExperimentConfig {
  ModelSpec model;
  std::vector<double> gamma_grid;
  std::vector<GaugeChoice> gauges;
  StateSpec state;
  InnerProduct inner_product = InnerProduct::CanonicalMetric;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = ".";
};

/// Parses and validates a sweep config. Relative matrix paths resolve against
/// `base_dir`. Throws Error(ConfigError) on any schema violation.
ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir = ".");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// Hamiltonian of the model at one grid point; matrix files ignore gamma.
ComplexMatrix build_model(const ModelSpec& model, double gamma);
Index model_dim(const ModelSpec& model);

/// RandomScale gauges draw fresh norms at every grid point; the seed used at
/// `gamma_index` is derived from the configured one.
GaugeChoice gauge_at(const GaugeChoice& gauge, std::size_t gamma_index);

std::string to_string(InnerProduct ip);

struct SweepRow {
  double gamma = 0.0;
  std::string gauge;
  Complex value{0.0, 0.0};
  std::string status = "ok";
};

struct SweepTable {
  std::vector<std::string> metadata;  // written as '# key=value' lines
  std::vector<SweepRow> rows;
};

inline constexpr const char* kSweepHeader = "gamma,gauge,re_exp,im_exp,abs_exp,status";

/// One row per (gamma, gauge), ordered by gamma then by the configured gauge
/// order. Numerical failures at a grid point mark its rows failed.
SweepTable run_expectation_sweep(const ExperimentConfig& cfg);

void write_csv(const SweepTable& table, std::ostream& out);
SweepTable read_csv(std::istream& in);

struct TransportConfig {
  ModelSpec model;
  double gamma = 0.0;
  /// Optional S applied as S H S^-1.
  std::optional<ComplexMatrix> similarity;
  GaugeChoice gauge = gauge::RightUnit{};
  std::filesystem::path output_dir = ".";
};

TransportConfig parse_transport_config(const nlohmann::json& doc,
                                       const std::filesystem::path& base_dir = ".");
TransportConfig load_transport_config(const std::filesystem::path& path);

/// Map residuals, spectrum match, norm matching and overlap residual for two
/// representations. Numerical failures become report sections; a dimension
/// mismatch throws ConfigError before anything is computed.
nlohmann::json run_transport_report(const TransportConfig& a, const TransportConfig& b);

enum class PlotKind { Abs, Real, Imag };

PlotKind parse_plot_kind(const std::string& name);

/// One curve per gauge over gamma. The format follows the extension of
/// `output` (.svg or .ppm). Throws SchemaMismatch for an empty table.
void emit_plot(const SweepTable& table, PlotKind kind, const std::filesystem::path& output);

}  // namespace nhqm::experiments
