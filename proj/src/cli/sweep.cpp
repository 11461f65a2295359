#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "nhqm/error.hpp"
#include "nhqm/experiments.hpp"
#include "nhqm/metric.hpp"

namespace nhqm::experiments {

namespace {

std::string describe_model(const ModelSpec& model) {
  if (const auto* hn = std::get_if<HatanoNelsonSpec>(&model)) {
    return "model=hatano_nelson N=" + std::to_string(hn->sites);
  }
  const auto& file = std::get<MatrixFileModel>(model);
  return "model=matrix_file path=" + file.path.string() + " N=" + std::to_string(model_dim(model));
}

std::string describe_state(const StateSpec& state) {
  if (const auto* combo = std::get_if<SiteCombination>(&state)) {
    std::string out;
    for (Index k : combo->sites) out += (out.empty() ? "e" : "+e") + std::to_string(k);
    return out;
  }
  return std::holds_alternative<EnergyAmplitudes>(state) ? "energy_amplitudes" : "explicit_vector";
}

StateVector build_state(const StateSpec& spec, const EigenSystem& es) {
  const Index dim = es.dim();
  if (const auto* combo = std::get_if<SiteCombination>(&spec)) {
    StateVector v = StateVector::Zero(dim);
    for (Index k : combo->sites) {
      if (k < 1 || k > dim) throw Error(ErrorKind::IndexOutOfRange, "site " + std::to_string(k));
      v(k - 1) += 1.0;
    }
    return v;
  }
  if (const auto* amps = std::get_if<EnergyAmplitudes>(&spec)) {
    require_dim(dim, static_cast<Index>(amps->c.size()), "amplitudes");
    return represent_state(es, Eigen::Map<const ComplexVector>(amps->c.data(), dim));
  }
  const auto& explicit_v = std::get<ExplicitVector>(spec);
  require_dim(dim, static_cast<Index>(explicit_v.components.size()), "state vector");
  return Eigen::Map<const ComplexVector>(explicit_v.components.data(), dim);
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream out;
  out << std::setprecision(17) << x;
  return out.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error(ErrorKind::SchemaMismatch, "not a number: '" + s + "'");
  }
  if (used != s.size()) throw Error(ErrorKind::SchemaMismatch, "not a number: '" + s + "'");
  return x;
}

}  // namespace

SweepTable run_expectation_sweep(const ExperimentConfig& cfg) {
  if (cfg.gamma_grid.empty()) throw Error(ErrorKind::ConfigError, "gamma grid is empty");
  if (cfg.gauges.empty()) throw Error(ErrorKind::ConfigError, "no gauges configured");

  SweepTable table;
  table.metadata.push_back(describe_model(cfg.model));
  table.metadata.push_back("inner_product=" + to_string(cfg.inner_product));
  table.metadata.push_back("state=" + describe_state(cfg.state));
  table.metadata.push_back("seed=" + std::to_string(cfg.seed));

  for (std::size_t gi = 0; gi < cfg.gamma_grid.size(); ++gi) {
    const double gamma = cfg.gamma_grid[gi];
    std::vector<SweepRow> rows;
    try {
      const ComplexMatrix h = build_model(cfg.model, gamma);
      const EigenSystem es = eigendecompose(h);
      for (const auto& g : cfg.gauges) {
        const BiorthogonalBasis basis = apply_gauge(es, gauge_at(g, gi));
        const StateVector v = build_state(cfg.state, basis.eigensystem());
        SweepRow row{gamma, gauge_label(g), {}, "ok"};
        if (cfg.inner_product == InnerProduct::Biorthogonal) {
          row.value = biortho_expectation(basis, h, v);
        } else {
          row.value = metric_expectation(build_metric_canonical(basis.eigensystem()), h, v);
        }
        rows.push_back(std::move(row));
      }
    } catch (const Error& e) {
      rows.clear();
      const double nan = std::numeric_limits<double>::quiet_NaN();
      for (const auto& g : cfg.gauges) {
        rows.push_back({gamma, gauge_label(g), {nan, nan}, "failed:" + std::string(nhqm::to_string(e.kind()))});
      }
    }
    for (auto& r : rows) table.rows.push_back(std::move(r));
  }
  return table;
}

void write_csv(const SweepTable& table, std::ostream& out) {
  for (const auto& m : table.metadata) out << "# " << m << '\n';
  out << kSweepHeader << '\n';
  for (const auto& row : table.rows) {
    const bool ok = row.status == "ok";
    const double nan = std::numeric_limits<double>::quiet_NaN();
    out << format_double(row.gamma) << ',' << row.gauge << ','
        << format_double(ok ? row.value.real() : nan) << ','
        << format_double(ok ? row.value.imag() : nan) << ','
        << format_double(ok ? std::abs(row.value) : nan) << ',' << row.status << '\n';
  }
}

SweepTable read_csv(std::istream& in) {
  SweepTable table;
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.rfind("# ", 0) == 0) {
      if (!header_seen) table.metadata.push_back(line.substr(2));
      continue;
    }
    if (!header_seen) {
      if (line != kSweepHeader) {
        throw Error(ErrorKind::SchemaMismatch, "expected header '" + std::string(kSweepHeader) +
                                                   "', got '" + line + "'");
      }
      header_seen = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != 6) {
      throw Error(ErrorKind::SchemaMismatch, "row has " + std::to_string(cells.size()) + " columns");
    }
    SweepRow row;
    row.gamma = parse_double(cells[0]);
    row.gauge = cells[1];
    row.value = {parse_double(cells[2]), parse_double(cells[3])};
    row.status = cells[5];
    table.rows.push_back(std::move(row));
  }
  if (!header_seen) throw Error(ErrorKind::SchemaMismatch, "missing header row");
  return table;
}

}  // namespace nhqm::experiments
