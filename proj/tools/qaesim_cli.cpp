// Command-line front end: scenario runs, depth scans, and classical oracle
// values. See README.md for the config schema and output formats.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "qaesim/harness.hpp"

namespace {

int budget_from_env(int fallback) {
  if (const char* env = std::getenv("QAESIM_MAX_QUBITS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return fallback;
}

void print_refusal(const qaesim::CapacityError& err) {
  nlohmann::ordered_json j;
  j["error"] = "memory-budget";
  j["required_qubits"] = err.required_qubits;
  j["budget_qubits"] = err.budget_qubits;
  j["shortfall"] = err.required_qubits - err.budget_qubits;
  std::cerr << j.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum amplitude-estimation scenario runner"};
  app.require_subcommand(1);

  // run
  std::string config_path;
  std::string mode_override;
  std::uint64_t shots_override = 0;
  std::int64_t seed_override = -1;
  std::string out_dir = "out";
  bool dump_circuit = false;
  CLI::App* run_cmd = app.add_subcommand("run", "run a configured scenario sweep");
  run_cmd->add_option("--config", config_path, "JSON config file")->required();
  run_cmd->add_option("--mode", mode_override, "exact|shots")
      ->check(CLI::IsMember({"exact", "shots"}));
  run_cmd->add_option("--shots", shots_override, "shot count for shots mode");
  run_cmd->add_option("--seed", seed_override, "sampling seed");
  run_cmd->add_option("--out", out_dir, "output directory");
  run_cmd->add_flag("--dump-circuit", dump_circuit, "write the full circuit text per sweep point");

  // depth-scan
  std::string family;
  std::string range = "3..12";
  CLI::App* depth_cmd = app.add_subcommand("depth-scan", "decomposed-depth scaling table");
  depth_cmd
      ->add_option("--family", family,
                   "one of d_eq|m_max|m_min|m_def|d_ir|d_surv|full-eq-max")
      ->required();
  depth_cmd->add_option("--range", range, "size range A..B");

  // oracle
  std::string oracle_scenario;
  CLI::App* oracle_cmd = app.add_subcommand("oracle", "print the classical reference value");
  oracle_cmd->add_option("--scenario", oracle_scenario, "scenario name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      qaesim::ExperimentConfig config = qaesim::load_config(config_path);
      config.max_qubits = budget_from_env(config.max_qubits);
      if (mode_override == "exact") config.shots_mode = false;
      if (mode_override == "shots") config.shots_mode = true;
      if (shots_override > 0) config.shots = shots_override;
      if (seed_override >= 0) config.seed = static_cast<std::uint64_t>(seed_override);
      config.out_dir = out_dir;

      const std::vector<qaesim::RunRecord> records = qaesim::run(config);
      const auto [csv_path, json_path] = qaesim::emit(records, out_dir);
      if (dump_circuit) {
        for (const qaesim::RunRecord& rec : records) {
          const qaesim::ScenarioInstance inst =
              qaesim::make_scenario(config, rec.n);
          const std::filesystem::path path =
              std::filesystem::path(out_dir) /
              (rec.scenario + "_n" + std::to_string(rec.n) + ".circuit.txt");
          std::ofstream f(path);
          if (!f) throw qaesim::Error("cannot write " + path.string());
          qaesim::dump_circuit(f, qaesim::build_full_circuit(inst.problem));
        }
      }
      std::cout << qaesim::emit_csv(records);
      std::cout << "wrote " << csv_path << " and " << json_path << "\n";
      return 0;
    }

    if (*depth_cmd) {
      const auto dots = range.find("..");
      if (dots == std::string::npos) throw qaesim::Error("range must look like A..B");
      const int lo = std::stoi(range.substr(0, dots));
      const int hi = std::stoi(range.substr(dots + 2));
      const qaesim::DepthScanReport report = qaesim::depth_scan(family, lo, hi);
      std::cout << qaesim::depth_scan_csv(report);
      if (report.rows.size() >= 2) {
        std::printf("# linear fit: depth ~ %.4g * size + %.4g (R^2 = %.6f)\n", report.slope,
                    report.intercept, report.r_squared);
        std::printf("# consecutive ratios:");
        for (double r : report.ratios) std::printf(" %.3f", r);
        std::printf("\n");
      }
      std::cout << "# " << report.extrapolation << "\n";
      return 0;
    }

    if (*oracle_cmd) {
      qaesim::ExperimentConfig config;
      config.scenario = qaesim::scenario_from_name(oracle_scenario);
      qaesim::apply_scenario_defaults(config);
      for (const qaesim::oracles::OracleReport& r : qaesim::oracle_reports(config))
        std::printf("%s = %.12g (%s)\n", r.quantity.c_str(), r.value,
                    qaesim::oracles::method_name(r.method));
      return 0;
    }
  } catch (const qaesim::CapacityError& err) {
    print_refusal(err);
    return 2;
  } catch (const std::exception& err) {
    nlohmann::ordered_json j;
    j["error"] = "failure";
    j["detail"] = err.what();
    std::cerr << j.dump() << "\n";
    return 1;
  }
  return 0;
}
