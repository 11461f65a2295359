#include <cmath>
#include <fstream>

#include "nhqm/error.hpp"
#include "nhqm/experiments.hpp"

namespace nhqm::experiments {

using json = nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

const json& field(const json& doc, const char* key) {
  if (!doc.contains(key)) fail(std::string("missing field '") + key + "'");
  return doc.at(key);
}

Complex parse_complex(const json& x) {
  if (x.is_number()) return {x.get<double>(), 0.0};
  if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number()) {
    return {x[0].get<double>(), x[1].get<double>()};
  }
  fail("complex values are numbers or [re, im] pairs, got " + x.dump());
}

std::vector<Complex> parse_complex_list(const json& x, const char* what) {
  if (!x.is_array() || x.empty()) fail(std::string(what) + " must be a non-empty array");
  std::vector<Complex> out;
  for (const auto& e : x) out.push_back(parse_complex(e));
  return out;
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
  return p.is_absolute() ? p : base / p;
}

ModelSpec parse_model(const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) fail("'model' must be an object");
  const auto kind = field(doc, "kind").get<std::string>();
  if (kind == "hatano_nelson") {
    if (!doc.contains("sites")) return HatanoNelsonSpec{};
    const json& sites = doc["sites"];
    if (!sites.is_number_integer() || sites.get<long long>() < 2) {
      fail("'model.sites' must be an integer >= 2");
    }
    return HatanoNelsonSpec{static_cast<Index>(sites.get<long long>()), 0.0};
  }
  if (kind == "matrix_file") {
    return MatrixFileModel{resolve(field(doc, "path").get<std::string>(), base)};
  }
  fail("unknown model kind '" + kind + "'");
}

std::vector<double> parse_grid(const json& doc) {
  std::vector<double> grid;
  if (doc.is_array()) {
    for (const auto& g : doc) {
      if (!g.is_number()) fail("'gamma_grid' entries must be numbers");
      grid.push_back(g.get<double>());
    }
  } else if (doc.is_object()) {
    const double start = field(doc, "start").get<double>();
    const double stop = field(doc, "stop").get<double>();
    const double step = field(doc, "step").get<double>();
    if (!(step > 0.0) || stop < start) fail("'gamma_grid' needs step > 0 and stop >= start");
    const auto count = static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long long i = 0; i < count; ++i) grid.push_back(start + static_cast<double>(i) * step);
  } else {
    fail("'gamma_grid' must be an array or {start, stop, step}");
  }
  if (grid.empty()) fail("'gamma_grid' is empty");
  for (double g : grid) {
    if (!std::isfinite(g)) fail("'gamma_grid' has a non-finite entry");
  }
  return grid;
}

GaugeChoice parse_gauge(const json& doc, std::uint64_t seed, std::size_t index) {
  if (doc.is_string()) {
    const auto name = doc.get<std::string>();
    if (name == "right_unit") return gauge::RightUnit{};
    if (name == "left_unit") return gauge::LeftUnit{};
    if (name == "random_scale") return gauge::RandomScale{seed + index};
    fail("unknown gauge '" + name + "'");
  }
  if (doc.is_object() && doc.size() == 1) {
    if (doc.contains("random_scale")) {
      const json& s = doc["random_scale"];
      if (!s.is_number_unsigned() && !s.is_number_integer()) fail("'random_scale' seed must be an integer");
      return gauge::RandomScale{s.get<std::uint64_t>()};
    }
    if (doc.contains("explicit_scale")) {
      auto c = parse_complex_list(doc["explicit_scale"], "'explicit_scale'");
      for (const auto& x : c) {
        if (x == 0.0) fail("'explicit_scale' entries must be nonzero");
      }
      return gauge::ExplicitScale{std::move(c)};
    }
  }
  fail("unrecognized gauge " + doc.dump());
}

StateSpec parse_state(const json& doc, Index dim) {
  if (!doc.is_object() || doc.size() != 1) fail("'state' must be an object with one key");
  if (doc.contains("sites")) {
    SiteCombination combo;
    for (const auto& k : doc["sites"]) {
      if (!k.is_number_integer()) fail("'state.sites' entries must be integers");
      const auto site = static_cast<Index>(k.get<long long>());
      if (site < 1 || (dim > 0 && site > dim)) fail("site " + std::to_string(site) + " out of range");
      combo.sites.push_back(site);
    }
    if (combo.sites.empty()) fail("'state.sites' is empty");
    return combo;
  }
  if (doc.contains("amplitudes")) {
    auto c = parse_complex_list(doc["amplitudes"], "'state.amplitudes'");
    if (dim > 0 && static_cast<Index>(c.size()) != dim) fail("'state.amplitudes' length != model dimension");
    double total = 0.0;
    for (const auto& x : c) total += std::norm(x);
    if (std::abs(total - 1.0) > 1e-10) fail("'state.amplitudes' must satisfy sum |c|^2 = 1");
    return EnergyAmplitudes{std::move(c)};
  }
  if (doc.contains("vector")) {
    auto v = parse_complex_list(doc["vector"], "'state.vector'");
    if (dim > 0 && static_cast<Index>(v.size()) != dim) fail("'state.vector' length != model dimension");
    double total = 0.0;
    for (const auto& x : v) total += std::norm(x);
    if (total == 0.0) fail("'state.vector' is the zero vector");
    return ExplicitVector{std::move(v)};
  }
  fail("'state' needs one of 'sites', 'amplitudes', 'vector'");
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail(path.string() + ": " + e.what());
  }
}

}  // namespace

std::string to_string(InnerProduct ip) {
  return ip == InnerProduct::Biorthogonal ? "biorthogonal" : "canonical_metric";
}

ComplexMatrix build_model(const ModelSpec& model, double gamma) {
  if (const auto* hn = std::get_if<HatanoNelsonSpec>(&model)) {
    return hatano_nelson({hn->sites, gamma});
  }
  return load_matrix(std::get<MatrixFileModel>(model).path);
}

Index model_dim(const ModelSpec& model) {
  if (const auto* hn = std::get_if<HatanoNelsonSpec>(&model)) return hn->sites;
  return load_matrix(std::get<MatrixFileModel>(model).path).rows();
}

GaugeChoice gauge_at(const GaugeChoice& gauge, std::size_t gamma_index) {
  if (const auto* r = std::get_if<gauge::RandomScale>(&gauge)) {
    // splitmix64 finalizer over (seed, index)
    std::uint64_t z = r->seed + 0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(gamma_index) + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return gauge::RandomScale{z ^ (z >> 31)};
  }
  return gauge;
}

ExperimentConfig parse_experiment_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) fail("config must be a JSON object");
  try {
    ExperimentConfig cfg;
    cfg.model = parse_model(field(doc, "model"), base_dir);
    cfg.gamma_grid = parse_grid(field(doc, "gamma_grid"));
    if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
    const json& gauges = field(doc, "gauges");
    if (!gauges.is_array() || gauges.empty()) fail("'gauges' must be a non-empty array");
    for (std::size_t i = 0; i < gauges.size(); ++i) cfg.gauges.push_back(parse_gauge(gauges[i], cfg.seed, i));
    const Index dim = std::holds_alternative<HatanoNelsonSpec>(cfg.model) ? model_dim(cfg.model) : 0;
    cfg.state = parse_state(field(doc, "state"), dim);
    const auto ip = field(doc, "inner_product").get<std::string>();
    if (ip == "biorthogonal") {
      cfg.inner_product = InnerProduct::Biorthogonal;
    } else if (ip == "canonical_metric") {
      cfg.inner_product = InnerProduct::CanonicalMetric;
    } else {
      fail("'inner_product' must be 'biorthogonal' or 'canonical_metric'");
    }
    cfg.output_dir = doc.contains("output_dir") ? resolve(doc["output_dir"].get<std::string>(), base_dir) : base_dir;
    return cfg;
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_json(path), path.parent_path());
}

TransportConfig parse_transport_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) fail("config must be a JSON object");
  try {
    TransportConfig cfg;
    cfg.model = parse_model(field(doc, "model"), base_dir);
    if (doc.contains("gamma")) cfg.gamma = doc["gamma"].get<double>();
    if (doc.contains("gauge")) cfg.gauge = parse_gauge(doc["gauge"], 0, 0);
    if (doc.contains("similarity")) {
      const json& s = doc["similarity"];
      const auto kind = field(s, "kind").get<std::string>();
      if (kind == "diagonal_power") {
        // S = diag(r, r^2, ..., r^N)
        const double r = field(s, "ratio").get<double>();
        if (!(r > 0.0) || !std::isfinite(r)) fail("'similarity.ratio' must be positive");
        const Index dim = model_dim(cfg.model);
        ComplexMatrix sim = ComplexMatrix::Zero(dim, dim);
        for (Index k = 0; k < dim; ++k) sim(k, k) = std::pow(r, static_cast<double>(k + 1));
        cfg.similarity = std::move(sim);
      } else if (kind == "matrix_file") {
        cfg.similarity = load_matrix(resolve(field(s, "path").get<std::string>(), base_dir));
      } else {
        fail("unknown similarity kind '" + kind + "'");
      }
    }
    cfg.output_dir = doc.contains("output_dir") ? resolve(doc["output_dir"].get<std::string>(), base_dir) : base_dir;
    return cfg;
  } catch (const json::exception& e) {
    fail(e.what());
  }
}

TransportConfig load_transport_config(const std::filesystem::path& path) {
  return parse_transport_config(read_json(path), path.parent_path());
}

}  // namespace nhqm::experiments
