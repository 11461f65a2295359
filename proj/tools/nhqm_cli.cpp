// Experiment driver: expectation-value sweeps over the Hatano-Nelson family,
// transport/feasibility reports between two representations, and plotting.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "nhqm/error.hpp"
#include "nhqm/experiments.hpp"

namespace fs = std::filesystem;
namespace ex = nhqm::experiments;

namespace {

int run_sweep(const fs::path& config_path, const std::string& output_name) {
  const ex::ExperimentConfig cfg = ex::load_experiment_config(config_path);
  const ex::SweepTable table = ex::run_expectation_sweep(cfg);
  fs::create_directories(cfg.output_dir);
  const fs::path out_path = cfg.output_dir / output_name;
  std::ofstream out(out_path);
  if (!out) throw nhqm::Error(nhqm::ErrorKind::ConfigError, "cannot write " + out_path.string());
  ex::write_csv(table, out);
  std::size_t failed = 0;
  for (const auto& row : table.rows) failed += row.status != "ok";
  std::cout << "wrote " << table.rows.size() << " rows to " << out_path.string();
  if (failed > 0) std::cout << " (" << failed << " failed)";
  std::cout << '\n';
  return 0;
}

int run_transport(const fs::path& config_a, const fs::path& config_b, const std::string& output_name) {
  const ex::TransportConfig a = ex::load_transport_config(config_a);
  const ex::TransportConfig b = ex::load_transport_config(config_b);
  const auto report = ex::run_transport_report(a, b);
  fs::create_directories(a.output_dir);
  const fs::path out_path = a.output_dir / output_name;
  std::ofstream out(out_path);
  if (!out) throw nhqm::Error(nhqm::ErrorKind::ConfigError, "cannot write " + out_path.string());
  out << report.dump(2) << '\n';
  std::cout << report.dump(2) << '\n';
  return 0;
}

int run_plot(const fs::path& input, const fs::path& output, const std::string& kind) {
  std::ifstream in(input);
  if (!in) throw nhqm::Error(nhqm::ErrorKind::ConfigError, "cannot open " + input.string());
  ex::emit_plot(ex::read_csv(in), ex::parse_plot_kind(kind), output);
  std::cout << "wrote " << output.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Biorthogonal and metric inner products for non-Hermitian Hamiltonians"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment");
  run->require_subcommand(1);

  std::string sweep_config;
  std::string sweep_output = "sweep.csv";
  auto* sweep = run->add_subcommand("sweep", "Expectation value of H over a gamma grid and gauges");
  sweep->add_option("--config", sweep_config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  sweep->add_option("--output-name", sweep_output, "CSV file name inside output_dir")->capture_default_str();

  std::string config_a, config_b;
  std::string transport_output = "transport_report.json";
  auto* transport = run->add_subcommand("transport", "Hilbert-space map and norm/overlap feasibility report");
  transport->add_option("--config-a", config_a, "source representation config")->required()->check(CLI::ExistingFile);
  transport->add_option("--config-b", config_b, "target representation config")->required()->check(CLI::ExistingFile);
  transport->add_option("--output-name", transport_output, "report file name inside config A's output_dir")->capture_default_str();

  std::string plot_input, plot_output, plot_kind = "abs";
  auto* plot = app.add_subcommand("plot", "Plot a sweep CSV (one curve per gauge)");
  plot->add_option("--input", plot_input, "sweep CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--output", plot_output, "image path (.svg or .ppm)")->required();
  plot->add_option("--kind", plot_kind, "abs, re or im")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return run_sweep(sweep_config, sweep_output);
    if (transport->parsed()) return run_transport(config_a, config_b, transport_output);
    if (plot->parsed()) return run_plot(plot_input, plot_output, plot_kind);
  } catch (const nhqm::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
