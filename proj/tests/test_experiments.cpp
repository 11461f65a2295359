#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "check_error.hpp"
#include "nhqm/experiments.hpp"
#include "nhqm/models.hpp"
#include "test_support.hpp"

using namespace nhqm;
using namespace nhqm::experiments;
using namespace nhqm::testing;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("nhqm_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

json sweep_doc(Index sites, json grid, json gauges, const std::string& ip) {
  return {{"model", {{"kind", "hatano_nelson"}, {"sites", sites}}},
          {"gamma_grid", std::move(grid)},
          {"gauges", std::move(gauges)},
          {"state", {{"sites", {1, 2}}}},
          {"inner_product", ip},
          {"seed", 2024}};
}

std::string csv_of(const SweepTable& t) {
  std::ostringstream out;
  write_csv(t, out);
  return out.str();
}

// max over gamma of the spread of |<H>| across gauges
std::map<double, double> spreads(const SweepTable& t) {
  std::map<double, std::pair<double, double>> range;
  for (const auto& row : t.rows) {
    auto [it, fresh] = range.try_emplace(row.gamma, 1e300, -1e300);
    it->second.first = std::min(it->second.first, std::abs(row.value));
    it->second.second = std::max(it->second.second, std::abs(row.value));
  }
  std::map<double, double> out;
  for (const auto& [g, r] : range) out[g] = r.second - r.first;
  return out;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(NHQM_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config: full document parses") {
  const json doc = sweep_doc(6, {{"start", 0.0}, {"stop", 0.9}, {"step", 0.05}},
                             {"right_unit", "left_unit", "random_scale", {{"random_scale", 99}},
                              {{"explicit_scale", {{1, 0}, {2, 0}, {1, 1}, {1, 0}, {1, 0}, {3, 0}}}}},
                             "biorthogonal");
  const ExperimentConfig cfg = parse_experiment_config(doc);
  CHECK(model_dim(cfg.model) == 6);
  REQUIRE(cfg.gamma_grid.size() == 19);
  CHECK(cfg.gamma_grid.front() == 0.0);
  CHECK(cfg.gamma_grid.back() == doctest::Approx(0.9).epsilon(1e-12));
  REQUIRE(cfg.gauges.size() == 5);
  CHECK(gauge_label(cfg.gauges[0]) == "right_unit");
  CHECK(std::holds_alternative<gauge::RandomScale>(cfg.gauges[2]));
  CHECK(std::get<gauge::RandomScale>(cfg.gauges[3]).seed == 99);
  CHECK(std::get<gauge::ExplicitScale>(cfg.gauges[4]).c[2] == Complex(1.0, 1.0));
  CHECK(cfg.inner_product == InnerProduct::Biorthogonal);
  CHECK(cfg.seed == 2024);
}

TEST_CASE("config: defaults and schema errors") {
  json doc = sweep_doc(4, {0.0, 0.5}, {"right_unit"}, "canonical_metric");
  doc["model"].erase("sites");
  CHECK(model_dim(parse_experiment_config(doc).model) == 20);

  auto broken = [](auto mutate) {
    json d = sweep_doc(4, {0.0, 0.5}, {"right_unit"}, "canonical_metric");
    mutate(d);
    return d;
  };
  CHECK_ERROR_KIND(parse_experiment_config(broken([](json& d) { d.erase("gamma_grid"); })), ErrorKind::ConfigError);
  CHECK_ERROR_KIND(parse_experiment_config(broken([](json& d) { d["gauges"] = {"sideways"}; })), ErrorKind::ConfigError);
  CHECK_ERROR_KIND(parse_experiment_config(broken([](json& d) { d["inner_product"] = "dot"; })), ErrorKind::ConfigError);
  CHECK_ERROR_KIND(parse_experiment_config(broken([](json& d) { d["state"] = {{"sites", {1, 9}}}; })),
                   ErrorKind::ConfigError);
  CHECK_ERROR_KIND(parse_experiment_config(broken([](json& d) { d["model"]["sites"] = 1; })), ErrorKind::ConfigError);
  CHECK_ERROR_KIND(parse_experiment_config(broken([](json& d) { d["model"]["kind"] = "ring"; })), ErrorKind::ConfigError);
  CHECK_ERROR_KIND(parse_experiment_config(broken([](json& d) { d["gamma_grid"] = {{"start", 0}, {"stop", 1}, {"step", 0}}; })),
                   ErrorKind::ConfigError);
  CHECK_ERROR_KIND(
      parse_experiment_config(broken([](json& d) { d["gauges"] = {{{"explicit_scale", {{1, 0}, {0, 0}, {1, 0}, {1, 0}}}}}; })),
      ErrorKind::ConfigError);
  CHECK_ERROR_KIND(parse_experiment_config(json::array()), ErrorKind::ConfigError);
}

TEST_CASE("sweep: Hermitian point agrees with the standard expectation") {
  // e1 + e2 on the symmetric chain: <v|H|v> / <v|v> = 1
  for (const char* ip : {"biorthogonal", "canonical_metric"}) {
    const auto t = run_expectation_sweep(parse_experiment_config(sweep_doc(5, {0.0}, {"right_unit", "left_unit"}, ip)));
    for (const auto& row : t.rows) {
      CHECK(row.status == "ok");
      CHECK(std::abs(row.value - 1.0) < 1e-12);
    }
  }
  const auto t = run_expectation_sweep(
      parse_experiment_config(sweep_doc(5, {0.0}, {"random_scale", "random_scale"}, "canonical_metric")));
  for (const auto& row : t.rows) CHECK(std::abs(row.value - 1.0) < 1e-12);
}

TEST_CASE("sweep: two-site values") {
  const auto canon = run_expectation_sweep(parse_experiment_config(
      sweep_doc(2, {0.5}, {"right_unit", "left_unit", "random_scale", {{"explicit_scale", {{1, 0}, {2, 0}}}}},
                "canonical_metric")));
  REQUIRE(canon.rows.size() == 4);
  for (const auto& row : canon.rows) CHECK(std::abs(std::abs(row.value) - 0.75) < 1e-10);

  const auto bio = run_expectation_sweep(
      parse_experiment_config(sweep_doc(2, {0.5}, {"right_unit", {{"explicit_scale", {{1, 0}, {2, 0}}}}}, "biorthogonal")));
  CHECK(std::abs(bio.rows[0].value - 0.75) < 1e-12);
  CHECK(std::abs(bio.rows[1].value.real() - 0.4796) < 1e-3);
}

TEST_CASE("sweep: gauge invariance under the metric, gauge dependence without it") {
  const json grid = {{"start", 0.0}, {"stop", 0.9}, {"step", 0.05}};
  const json gauges = {"right_unit", "left_unit", "random_scale"};
  const auto canon = run_expectation_sweep(parse_experiment_config(sweep_doc(20, grid, gauges, "canonical_metric")));
  const auto bio = run_expectation_sweep(parse_experiment_config(sweep_doc(20, grid, gauges, "biorthogonal")));
  REQUIRE(canon.rows.size() == 57);
  double worst = 0.0, best = 0.0;
  for (const auto& [g, s] : spreads(canon)) worst = std::max(worst, s);
  for (const auto& [g, s] : spreads(bio)) best = std::max(best, s);
  CHECK(worst < 1e-8);
  CHECK(best > 1e-3);
  // ordering: gamma ascending, gauges in configured order
  CHECK(canon.rows[0].gauge == "right_unit");
  CHECK(canon.rows[1].gauge == "left_unit");
  CHECK(canon.rows[3].gamma > canon.rows[0].gamma);
}

TEST_CASE("sweep: failures at a grid point are flagged, not fatal") {
  TempDir dir("sweep_fail");
  save_matrix(dir.path / "jordan.json", ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}});
  json doc = sweep_doc(2, {0.1, 0.2}, {"right_unit", "left_unit"}, "biorthogonal");
  doc["model"] = {{"kind", "matrix_file"}, {"path", "jordan.json"}};
  const auto t = run_expectation_sweep(parse_experiment_config(doc, dir.path));
  REQUIRE(t.rows.size() == 4);
  for (const auto& row : t.rows) {
    CHECK(row.status == "failed:DefectiveOperator");
    CHECK(std::isnan(row.value.real()));
  }
  const SweepTable back = [&] {
    std::istringstream in(csv_of(t));
    return read_csv(in);
  }();
  CHECK(back.rows[2].status == "failed:DefectiveOperator");
}

TEST_CASE("csv: determinism, metadata and round trip") {
  const json doc = sweep_doc(6, {0.0, 0.3, 0.6}, {"right_unit", "random_scale", {{"random_scale", 5}}}, "biorthogonal");
  const std::string a = csv_of(run_expectation_sweep(parse_experiment_config(doc)));
  const std::string b = csv_of(run_expectation_sweep(parse_experiment_config(doc)));
  CHECK(a == b);
  json other = doc;
  other["seed"] = 2025;
  CHECK(csv_of(run_expectation_sweep(parse_experiment_config(other))) != a);

  CHECK(a.find("N=6") != std::string::npos);
  CHECK(a.find(kSweepHeader) != std::string::npos);

  std::istringstream in(a);
  const SweepTable t = read_csv(in);
  CHECK(t.rows.size() == 9);
  CHECK(csv_of(t) == a);

  std::istringstream bad_header("gamma,gauge,value\n0,right_unit,1\n");
  CHECK_ERROR_KIND(read_csv(bad_header), ErrorKind::SchemaMismatch);
  std::istringstream bad_row(std::string(kSweepHeader) + "\n0,right_unit,1,0\n");
  CHECK_ERROR_KIND(read_csv(bad_row), ErrorKind::SchemaMismatch);
}

TEST_CASE("plot") {
  TempDir dir("plot");
  const json grid = {{"start", 0.0}, {"stop", 0.9}, {"step", 0.1}};
  const auto t = run_expectation_sweep(
      parse_experiment_config(sweep_doc(6, grid, {"right_unit", "left_unit", "random_scale"}, "biorthogonal")));
  emit_plot(t, PlotKind::Abs, dir.path / "a.svg");
  emit_plot(t, PlotKind::Abs, dir.path / "b.svg");
  emit_plot(t, PlotKind::Real, dir.path / "a.ppm");
  const std::string svg = read_file(dir.path / "a.svg");
  CHECK(svg == read_file(dir.path / "b.svg"));
  std::size_t curves = 0;
  for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) ++curves;
  CHECK(curves == 3);
  CHECK(svg.find("random_scale") != std::string::npos);
  const std::string ppm = read_file(dir.path / "a.ppm");
  CHECK(ppm.rfind("P6\n720 440\n255\n", 0) == 0);
  CHECK(ppm.size() == std::string("P6\n720 440\n255\n").size() + 720 * 440 * 3);

  CHECK_ERROR_KIND(emit_plot(SweepTable{}, PlotKind::Abs, dir.path / "empty.svg"), ErrorKind::SchemaMismatch);
  CHECK_ERROR_KIND(emit_plot(t, PlotKind::Abs, dir.path / "x.gif"), ErrorKind::ConfigError);
  CHECK(parse_plot_kind("im") == PlotKind::Imag);
  CHECK_ERROR_KIND(parse_plot_kind("phase"), ErrorKind::ConfigError);
}

TEST_CASE("transport report") {
  TempDir dir("transport");
  std::mt19937_64 rng(61);
  save_matrix(dir.path / "h.json", random_matrix(rng, 4));
  save_matrix(dir.path / "s.json", random_invertible(rng, 4));

  const json file_model = {{"model", {{"kind", "matrix_file"}, {"path", "h.json"}}}};
  const auto same = run_transport_report(parse_transport_config(file_model, dir.path),
                                         parse_transport_config(file_model, dir.path));
  CHECK(same["map"]["status"] == "ok");
  CHECK(same["map"]["metric_residual"].get<double>() <= 1e-9);
  CHECK(same["map"]["inverse_residual"].get<double>() <= 1e-9);
  CHECK(same["map"]["eigenvector_residual"].get<double>() <= 1e-9);
  CHECK(same["norm_matching"]["norm_residual"].get<double>() <= 1e-9);
  CHECK(same["overlap_residual"].get<double>() <= 1e-12);

  // chain and a dense similarity transform of it
  json chain = {{"model", {{"kind", "hatano_nelson"}, {"sites", 4}}}, {"gamma", 0.5}};
  json moved = chain;
  moved["similarity"] = {{"kind", "matrix_file"}, {"path", "s.json"}};
  const auto sim = run_transport_report(parse_transport_config(chain, dir.path), parse_transport_config(moved, dir.path));
  CHECK(sim["map"]["status"] == "ok");
  CHECK(sim["map"]["metric_residual"].get<double>() <= 1e-9);
  CHECK(sim["map"]["spectrum_match_error"].get<double>() <= 1e-9);
  const std::string status = sim["norm_matching"]["status"];
  CHECK((status == "feasible" || status == "infeasible"));
  CHECK(sim["norm_matching"]["norm_residual"].get<double>() <= 1e-9);
  CHECK(sim.contains("overlap_residual"));

  // a diagonal similarity keeps the chain's mirror symmetry: no norm matching
  json diag = chain;
  diag["similarity"] = {{"kind", "diagonal_power"}, {"ratio", 0.8}};
  const auto dr = run_transport_report(parse_transport_config(chain), parse_transport_config(diag));
  CHECK(dr["map"]["status"] == "ok");
  CHECK(dr["norm_matching"]["error"] == "SingularSystem");

  json bigger = chain;
  bigger["model"]["sites"] = 5;
  CHECK_ERROR_KIND(run_transport_report(parse_transport_config(chain), parse_transport_config(bigger)),
                   ErrorKind::ConfigError);
}

TEST_CASE("command line") {
  TempDir dir("cli");
  const fs::path log = dir.path / "log.txt";
  json doc = sweep_doc(8, {{"start", 0.0}, {"stop", 0.8}, {"step", 0.2}}, {"right_unit", "left_unit", "random_scale"},
                       "canonical_metric");
  doc["output_dir"] = "out";
  write_file(dir.path / "sweep.json", doc.dump());

  REQUIRE(run_cli("run sweep --config " + (dir.path / "sweep.json").string(), log) == 0);
  const std::string first = read_file(dir.path / "out" / "sweep.csv");
  REQUIRE(run_cli("run sweep --config " + (dir.path / "sweep.json").string() + " --output-name again.csv", log) == 0);
  CHECK(read_file(dir.path / "out" / "again.csv") == first);
  CHECK(first.find("inner_product=canonical_metric") != std::string::npos);

  CHECK(run_cli("plot --input " + (dir.path / "out" / "sweep.csv").string() + " --output " +
                    (dir.path / "out" / "sweep.svg").string() + " --kind re",
                log) == 0);
  CHECK(fs::file_size(dir.path / "out" / "sweep.svg") > 0);

  write_file(dir.path / "a.json", json{{"model", {{"kind", "hatano_nelson"}, {"sites", 3}}}, {"gamma", 0.2}}.dump());
  write_file(dir.path / "b.json", json{{"model", {{"kind", "hatano_nelson"}, {"sites", 4}}}, {"gamma", 0.2}}.dump());
  CHECK(run_cli("run transport --config-a " + (dir.path / "a.json").string() + " --config-b " +
                    (dir.path / "a.json").string(),
                log) == 0);
  CHECK(json::parse(read_file(dir.path / "transport_report.json"))["map"]["status"] == "ok");
  CHECK(run_cli("run transport --config-a " + (dir.path / "a.json").string() + " --config-b " +
                    (dir.path / "b.json").string(),
                log) == 2);
  CHECK(read_file(log).find("ConfigError") != std::string::npos);

  write_file(dir.path / "bad.json", "{\"model\": 3}");
  CHECK(run_cli("run sweep --config " + (dir.path / "bad.json").string(), log) == 2);
  CHECK(run_cli("run sweep", log) != 0);
}
