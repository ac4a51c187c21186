#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "qaesim/decompose.hpp"
#include "qaesim/oracles.hpp"
#include "qaesim/qae.hpp"
#include "qaesim/risk_models.hpp"

namespace qaesim {

enum class Scenario { EqMax, EqMin, IrMid, CreditDefault, CreditSurvival, Migration, ExampleC3 };

inline const char* scenario_name(Scenario s) {
  switch (s) {
    case Scenario::EqMax: return "eq-max";
    case Scenario::EqMin: return "eq-min";
    case Scenario::IrMid: return "ir-mid";
    case Scenario::CreditDefault: return "credit-default";
    case Scenario::CreditSurvival: return "credit-survival";
    case Scenario::Migration: return "migration";
    case Scenario::ExampleC3: return "example-c3";
  }
  return "?";
}

inline Scenario scenario_from_name(const std::string& name) {
  for (Scenario s : {Scenario::EqMax, Scenario::EqMin, Scenario::IrMid, Scenario::CreditDefault,
                     Scenario::CreditSurvival, Scenario::Migration, Scenario::ExampleC3})
    if (name == scenario_name(s)) return s;
  throw Error("unknown scenario: " + name);
}

struct ExperimentConfig {
  Scenario scenario = Scenario::EqMax;

  // Equity / structural-credit lattice
  double mu = 0.08;
  double sigma = 0.20;
  double maturity = 1.0;
  int steps = 6;

  // Rate lattice
  double a_dt = 0.25;

  // Credit
  double q_def = 0.02;
  int barrier_down_exponent = 4;
  oracles::TransitionMatrix migration_matrix{{{0.90, 0.08, 0.02},
                                              {0.05, 0.85, 0.10},
                                              {0.00, 0.00, 1.00}}};

  int n_lo = 1;
  int n_hi = 9;

  bool shots_mode = false;
  std::uint64_t shots = 10000;
  std::uint64_t seed = 12345;

  int max_qubits = kDefaultMaxQubits;

  std::string out_dir;
  bool dump_circuit = false;
};

inline void apply_scenario_defaults(ExperimentConfig& c) {
  switch (c.scenario) {
    case Scenario::EqMax:
    case Scenario::EqMin:
    case Scenario::CreditSurvival:
      c.n_lo = 1;
      c.n_hi = 9;
      break;
    case Scenario::CreditDefault:
      // n = 8 already needs 26 qubits and n = 9 overruns the default budget.
      c.n_lo = 1;
      c.n_hi = 7;
      break;
    case Scenario::IrMid:
    case Scenario::Migration:
      c.steps = 3;
      c.n_lo = 1;
      c.n_hi = 5;
      break;
    case Scenario::ExampleC3:
      c.steps = 2;
      c.n_lo = 3;
      c.n_hi = 3;
      break;
  }
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  ExperimentConfig c;
  c.scenario = scenario_from_name(j.at("scenario").get<std::string>());
  apply_scenario_defaults(c);
  if (j.contains("mu")) c.mu = j["mu"].get<double>();
  if (j.contains("sigma")) c.sigma = j["sigma"].get<double>();
  if (j.contains("maturity")) c.maturity = j["maturity"].get<double>();
  if (j.contains("steps")) c.steps = j["steps"].get<int>();
  if (j.contains("a_dt")) c.a_dt = j["a_dt"].get<double>();
  if (j.contains("q_def")) c.q_def = j["q_def"].get<double>();
  if (j.contains("barrier_down_exponent"))
    c.barrier_down_exponent = j["barrier_down_exponent"].get<int>();
  if (j.contains("migration_matrix")) {
    const auto& m = j["migration_matrix"];
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) c.migration_matrix[r][col] = m.at(r).at(col).get<double>();
  }
  if (j.contains("n")) c.n_lo = c.n_hi = j["n"].get<int>();
  if (j.contains("n_range")) {
    c.n_lo = j["n_range"].at(0).get<int>();
    c.n_hi = j["n_range"].at(1).get<int>();
  }
  if (j.contains("mode")) {
    const std::string mode = j["mode"].get<std::string>();
    if (mode == "exact") c.shots_mode = false;
    else if (mode == "shots") c.shots_mode = true;
    else throw Error("mode must be \"exact\" or \"shots\"");
  }
  if (j.contains("shots")) c.shots = j["shots"].get<std::uint64_t>();
  if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("max_qubits")) c.max_qubits = j["max_qubits"].get<int>();
  if (c.n_lo < 1 || c.n_hi < c.n_lo) throw Error("invalid output-qubit range");
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file: " + path);
  nlohmann::json j;
  in >> j;
  return parse_config(j);
}

// A QAE problem plus the classical reference it must reproduce.
struct ScenarioInstance {
  QaeProblem problem;
  double p_oracle = 0.0;
  oracles::Method oracle_method = oracles::Method::ClosedForm;
};

inline ScenarioInstance make_scenario(const ExperimentConfig& c, int n) {
  ScenarioInstance inst;
  switch (c.scenario) {
    case Scenario::EqMax:
    case Scenario::EqMin: {
      const BinomialParams params = calibrate_binomial(c.mu, c.sigma, c.maturity, c.steps);
      const RegisterLayout layout = make_equity_layout(c.steps, n);
      Circuit d = build_d_eq(params, layout);
      Circuit m = c.scenario == Scenario::EqMax ? build_m_max(c.steps, layout)
                                                : build_m_min(c.steps, layout);
      inst.problem = make_problem(std::move(d), std::move(m), layout, n);
      inst.p_oracle = c.scenario == Scenario::EqMax ? std::pow(params.q, c.steps)
                                                    : std::pow(1.0 - params.q, c.steps);
      break;
    }
    case Scenario::ExampleC3: {
      const BinomialParams params =
          binomial_from_up_probability(std::sin(std::numbers::pi / 8), 2);
      const RegisterLayout layout = make_equity_layout(2, n);
      inst.problem = make_problem(build_d_eq(params, layout), build_m_max(2, layout), layout, n);
      inst.p_oracle = params.q * params.q;
      break;
    }
    case Scenario::IrMid: {
      const TrinomialParams params = calibrate_trinomial(c.a_dt, RateLevel::Mid, c.steps);
      const RegisterLayout layout = make_rate_layout(c.steps, n);
      inst.problem = make_problem(build_d_ir(params, layout), build_m_mid(layout), layout, n,
                                  layout.st.indices());
      inst.p_oracle = oracles::trinomial_distribution(
          params.transition, static_cast<int>(RateLevel::Mid), c.steps)[1];
      inst.oracle_method = oracles::Method::MatrixPower;
      break;
    }
    case Scenario::CreditDefault: {
      const BinomialParams params = calibrate_binomial(c.mu, c.sigma, c.maturity, c.steps);
      const DefaultRegion region = region_from_barrier(c.steps, c.barrier_down_exponent);
      if (region.j_set.empty()) throw CalibrationError("barrier places no path in default");
      const RegisterLayout layout =
          make_structural_layout(c.steps, static_cast<int>(region.j_set.size()), n);
      inst.problem = make_problem(build_d_eq(params, layout),
                                  build_m_def(params, region, layout), layout, n);
      inst.p_oracle = oracles::default_region_prob(params.q, c.steps, region.j_set);
      break;
    }
    case Scenario::CreditSurvival: {
      const HazardParams params = hazard_from_step_probability(c.q_def, c.steps, c.maturity);
      const RegisterLayout layout = make_equity_layout(c.steps, n);
      inst.problem = make_problem(build_d_surv(params, layout), build_m_surv(c.steps, layout),
                                  layout, n);
      inst.p_oracle = oracles::survival_prob(c.q_def, c.steps);
      break;
    }
    case Scenario::Migration: {
      const TrinomialParams params =
          trinomial_from_matrix(c.migration_matrix, RateLevel::High, c.steps);
      const RegisterLayout layout = make_rate_layout(c.steps, n);
      inst.problem = make_problem(build_d_migr(params, layout),
                                  build_m_level(RateLevel::Low, layout), layout, n,
                                  layout.st.indices());
      inst.p_oracle = oracles::trinomial_distribution(
          params.transition, static_cast<int>(RateLevel::High), c.steps)[2];
      inst.oracle_method = oracles::Method::MatrixPower;
      break;
    }
  }
  return inst;
}

struct RunRecord {
  std::string scenario;
  int n = 0;
  std::uint64_t z0 = 0;
  double p_est = 0.0;
  double delta_p = 0.0;
  double p_oracle = 0.0;
  double abs_error = 0.0;
  int qubits = 0;
  long long depth = 0;
  double seconds = 0.0;
};

// Builds, simulates, and scores one sweep point.
inline RunRecord run_point(const ExperimentConfig& c, int n) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioInstance inst = make_scenario(c, n);
  const int required = inst.problem.layout.num_qubits();
  if (required > c.max_qubits) throw CapacityError(required, c.max_qubits);
  EstimationResult est =
      c.shots_mode ? estimate(inst.problem, ShotSpec{c.shots, c.seed}, c.max_qubits)
                   : estimate(inst.problem, c.max_qubits);
  RunRecord rec;
  rec.scenario = scenario_name(c.scenario);
  rec.n = n;
  rec.z0 = est.z0;
  rec.p_est = est.p_est;
  rec.delta_p = est.delta_p;
  rec.p_oracle = inst.p_oracle;
  rec.abs_error = std::abs(est.p_est - inst.p_oracle);
  rec.qubits = required;
  rec.depth = depth(decompose_to_basis(build_full_circuit(inst.problem)));
  rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

// Runs every sweep point. Memory requirements are checked for the whole sweep
// up front so a refusal never truncates the output silently. Small sweep
// points run in a worker pool; large states run alone and parallelise inside
// the gate kernels instead.
inline std::vector<RunRecord> run(const ExperimentConfig& c) {
  std::vector<int> ns;
  int worst_required = 0;
  for (int n = c.n_lo; n <= c.n_hi; ++n) {
    ns.push_back(n);
    worst_required = std::max(worst_required, make_scenario(c, n).problem.layout.num_qubits());
  }
  if (worst_required > c.max_qubits) throw CapacityError(worst_required, c.max_qubits);

  std::vector<RunRecord> records(ns.size());
  const bool heavy = worst_required > 20;
  if (heavy || ns.size() == 1) {
    for (std::size_t i = 0; i < ns.size(); ++i) records[i] = run_point(c, ns[i]);
  } else {
    std::vector<std::future<RunRecord>> futures;
    futures.reserve(ns.size());
    for (int n : ns)
      futures.push_back(std::async(std::launch::async, [&c, n] { return run_point(c, n); }));
    for (std::size_t i = 0; i < ns.size(); ++i) records[i] = futures[i].get();
  }
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return a.scenario != b.scenario ? a.scenario < b.scenario : a.n < b.n;
  });
  return records;
}

// ---------------------------------------------------------------------------
// Emission: CSV and JSON with a fixed schema, byte-stable for fixed records.

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string emit_csv(const std::vector<RunRecord>& records) {
  std::ostringstream os;
  os << "scenario,n,z0,p_est,delta_p,p_oracle,abs_error,qubits,depth,seconds\n";
  for (const RunRecord& r : records) {
    char sec[32];
    std::snprintf(sec, sizeof(sec), "%.3f", r.seconds);
    os << r.scenario << ',' << r.n << ',' << r.z0 << ',' << format_double(r.p_est) << ','
       << format_double(r.delta_p) << ',' << format_double(r.p_oracle) << ','
       << format_double(r.abs_error) << ',' << r.qubits << ',' << r.depth << ',' << sec << '\n';
  }
  return os.str();
}

inline nlohmann::ordered_json record_to_json(const RunRecord& r) {
  nlohmann::ordered_json j;
  j["scenario"] = r.scenario;
  j["n"] = r.n;
  j["z0"] = r.z0;
  j["p_est"] = r.p_est;
  j["delta_p"] = r.delta_p;
  j["p_oracle"] = r.p_oracle;
  j["abs_error"] = r.abs_error;
  j["qubits"] = r.qubits;
  j["depth"] = r.depth;
  j["seconds"] = r.seconds;
  return j;
}

inline std::string emit_json(const std::vector<RunRecord>& records) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const RunRecord& r : records) arr.push_back(record_to_json(r));
  return arr.dump(2) + "\n";
}

inline std::vector<RunRecord> parse_records_json(const std::string& text) {
  const nlohmann::json arr = nlohmann::json::parse(text);
  std::vector<RunRecord> records;
  for (const auto& j : arr) {
    RunRecord r;
    r.scenario = j.at("scenario").get<std::string>();
    r.n = j.at("n").get<int>();
    r.z0 = j.at("z0").get<std::uint64_t>();
    r.p_est = j.at("p_est").get<double>();
    r.delta_p = j.at("delta_p").get<double>();
    r.p_oracle = j.at("p_oracle").get<double>();
    r.abs_error = j.at("abs_error").get<double>();
    r.qubits = j.at("qubits").get<int>();
    r.depth = j.at("depth").get<long long>();
    r.seconds = j.at("seconds").get<double>();
    records.push_back(std::move(r));
  }
  return records;
}

inline bool operator==(const RunRecord& a, const RunRecord& b) {
  return a.scenario == b.scenario && a.n == b.n && a.z0 == b.z0 && a.p_est == b.p_est &&
         a.delta_p == b.delta_p && a.p_oracle == b.p_oracle && a.abs_error == b.abs_error &&
         a.qubits == b.qubits && a.depth == b.depth && a.seconds == b.seconds;
}

// Writes records.csv and records.json under `dir`; returns the two paths.
inline std::pair<std::string, std::string> emit(const std::vector<RunRecord>& records,
                                                const std::string& dir) {
  if (records.empty()) throw Error("no records to emit");
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  const fs::path csv_path = fs::path(dir) / "records.csv";
  const fs::path json_path = fs::path(dir) / "records.json";
  std::ofstream csv(csv_path);
  if (!csv) throw Error("cannot write " + csv_path.string());
  csv << emit_csv(records);
  std::ofstream js(json_path);
  if (!js) throw Error("cannot write " + json_path.string());
  js << emit_json(records);
  return {csv_path.string(), json_path.string()};
}

// ---------------------------------------------------------------------------
// Depth scans

struct DepthScanRow {
  int size = 0;         // m for gate families, n for full circuits
  long long depth = 0;  // decomposed depth
};

struct DepthScanReport {
  std::string family;
  std::vector<DepthScanRow> rows;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<double> ratios;  // depth(size+1) / depth(size)
  std::string extrapolation;
};

namespace detail {

inline void linear_fit(DepthScanReport& report) {
  const auto& rows = report.rows;
  const double n = double(rows.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    sx += r.size;
    sy += double(r.depth);
    sxx += double(r.size) * r.size;
    sxy += double(r.size) * double(r.depth);
  }
  report.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  report.intercept = (sy - report.slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double mean = sy / n;
  for (const auto& r : rows) {
    const double fit = report.slope * r.size + report.intercept;
    ss_res += (r.depth - fit) * (r.depth - fit);
    ss_tot += (r.depth - mean) * (r.depth - mean);
  }
  report.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
}

}  // namespace detail

inline DepthScanReport depth_scan(const std::string& family, int lo, int hi) {
  if (lo < 1 || hi < lo) throw Error("invalid depth-scan range");
  DepthScanReport report;
  report.family = family;

  auto gate_depth = [&](int m) -> long long {
    if (family == "d_eq") {
      const RegisterLayout lay = make_equity_layout(m, 0);
      return depth(decompose_to_basis(build_d_eq(calibrate_binomial(0.08, 0.20, 1.0, m), lay)));
    }
    if (family == "m_max") return depth(decompose_to_basis(build_m_max(m, make_equity_layout(m, 0))));
    if (family == "m_min") return depth(decompose_to_basis(build_m_min(m, make_equity_layout(m, 0))));
    if (family == "d_surv") {
      const RegisterLayout lay = make_equity_layout(m, 0);
      return depth(decompose_to_basis(build_d_surv(hazard_from_step_probability(0.02, m), lay)));
    }
    if (family == "d_ir") {
      const RegisterLayout lay = make_rate_layout(m, 0);
      return depth(decompose_to_basis(build_d_ir(calibrate_trinomial(0.25, RateLevel::Mid, m), lay)));
    }
    if (family == "m_def") {
      const BinomialParams params = calibrate_binomial(0.08, 0.20, 1.0, m);
      const DefaultRegion region = region_from_barrier(m, std::min(m, 4));
      const RegisterLayout lay =
          make_structural_layout(m, static_cast<int>(region.j_set.size()), 0);
      return depth(decompose_to_basis(build_m_def(params, region, lay)));
    }
    if (family == "full-eq-max") {
      ExperimentConfig c;
      c.scenario = Scenario::EqMax;
      return depth(decompose_to_basis(build_full_circuit(make_scenario(c, m).problem)));
    }
    throw Error("unknown depth-scan family: " + family);
  };

  for (int size = lo; size <= hi; ++size) report.rows.push_back({size, gate_depth(size)});

  if (report.rows.size() >= 2) {
    detail::linear_fit(report);
    for (std::size_t i = 1; i < report.rows.size(); ++i)
      report.ratios.push_back(double(report.rows[i].depth) / double(report.rows[i - 1].depth));
  }

  std::ostringstream extrap;
  if (family == "full-eq-max") {
    const auto& last = report.rows.back();
    const double projected = double(last.depth) * std::pow(2.0, 14 - last.size);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", projected);
    extrap << "extrapolation (not simulated): doubling per output qubit projects depth ~" << buf
           << " at n=14";
  } else {
    const double projected = report.slope * 1000 + report.intercept;
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", projected);
    extrap << "extrapolation (not simulated): linear fit projects depth ~" << buf
           << " at m=1000";
  }
  report.extrapolation = extrap.str();
  return report;
}

inline std::string depth_scan_csv(const DepthScanReport& report) {
  std::ostringstream os;
  os << "family,size,depth\n";
  for (const auto& r : report.rows) os << report.family << ',' << r.size << ',' << r.depth << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Oracle reports for the CLI

inline std::vector<oracles::OracleReport> oracle_reports(const ExperimentConfig& c) {
  std::vector<oracles::OracleReport> reports;
  const ScenarioInstance inst = make_scenario(c, 1);
  reports.push_back({std::string(scenario_name(c.scenario)) + " p", inst.p_oracle,
                     inst.oracle_method});
  if (c.scenario == Scenario::IrMid) {
    const TrinomialParams params = calibrate_trinomial(c.a_dt, RateLevel::Mid, c.steps);
    const auto by_paths = oracles::trinomial_distribution_by_paths(
        params.transition, static_cast<int>(RateLevel::Mid), c.steps);
    reports.push_back({"ir-mid p (path enumeration)", by_paths[1],
                       oracles::Method::PathEnumeration});
  }
  return reports;
}

}  // namespace qaesim
