/**
 * @file losform_main.cpp
 * @brief Command-line front end: simulate a scenario, certify its gain set,
 *        validate a configuration, or run the embedded seven-craft demo.
 *
 * Exit codes: 0 success, 2 invalid scenario, 3 numerical divergence.
 */
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "losform/certificates.hpp"
#include "losform/scenario.hpp"
#include "losform/simulation.hpp"
#include "losform/telemetry_io.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 2;
constexpr int kExitDiverged = 3;

void print_report(const losform::ValidationReport& report) {
  for (const auto& issue : report.errors) {
    std::cout << "error [" << issue.code << "] " << issue.message << "\n";
  }
  for (const auto& issue : report.warnings) {
    std::cout << "warning [" << issue.code << "] " << issue.message << "\n";
  }
}

struct RunOptions {
  std::string out_dir = "out";
  std::optional<double> step;
  std::optional<double> horizon;
  std::optional<int> decimate;
};

void apply_overrides(losform::Scenario& scenario, const RunOptions& opts) {
  if (opts.step) scenario.time_step = *opts.step;
  if (opts.horizon) scenario.horizon = *opts.horizon;
  if (opts.decimate) scenario.output_decimation = *opts.decimate;
}

int run_simulation(losform::Scenario scenario, const RunOptions& opts) {
  apply_overrides(scenario, opts);
  const losform::ValidationReport report = losform::validate_scenario(scenario);
  print_report(report);
  if (!report.ok()) return kExitInvalid;

  losform::ClosedLoopSimulation sim(scenario);
  const losform::RunResult result = sim.run();
  const losform::TelemetryLabels labels = losform::make_labels(*sim.setup().spec);
  losform::write_run_outputs(opts.out_dir, result, labels);

  std::cout << "status: " << result.summary.status << "\n"
            << "steps: " << result.summary.steps << ", records: " << result.summary.records
            << "\n"
            << "max rotation drift: " << result.summary.max_rotation_drift << "\n"
            << "energy violations: " << result.summary.energy_violation_count << "\n";
  for (const auto& [edge, psi] : result.summary.final_psi) {
    std::cout << "final Psi_" << edge << ": " << psi << "\n";
  }
  std::cout << "outputs written to " << opts.out_dir << "\n";
  return result.summary.status == "ok" ? kExitOk : kExitDiverged;
}

int run_certify(const losform::Scenario& scenario) {
  const losform::ValidationReport report = losform::validate_scenario(scenario);
  if (!report.ok()) {
    print_report(report);
    return kExitInvalid;
  }
  const losform::SimulationSetup setup = losform::build_setup(scenario);
  std::vector<losform::Mat3> inertias;
  for (const auto& s : setup.initial_states) inertias.push_back(s.inertia);

  const auto feasible_c =
      losform::find_feasible_coupling(*setup.spec, setup.controller->gains(), inertias,
                                      setup.rate_bound, setup.psi_cap);
  const losform::Certificate cert =
      losform::build_certificate(*setup.spec, setup.controller->gains(), inertias,
                                 setup.rate_bound, feasible_c.value_or(1e-8), setup.psi_cap);

  // Region-of-attraction membership of the scenario's own initial conditions.
  const losform::ClosedLoopSimulation sim(scenario);
  const losform::TelemetryRecord initial = sim.observe(0.0, setup.initial_states);
  losform::RoaReport roa =
      losform::check_roa(initial.psi, initial.rate_error, inertias, setup.spec->chain(),
                         setup.psi_cap);

  nlohmann::json j;
  j["feasible"] = feasible_c.has_value();
  j["feasible_c"] = feasible_c.value_or(0.0);
  j["heuristic"] = cert.heuristic;
  j["rate_bound"] = setup.rate_bound;
  j["psi_cap"] = setup.psi_cap;
  j["bounds"] = nlohmann::json::array();
  const auto labels = losform::make_labels(*setup.spec);
  for (size_t m = 0; m < cert.edge_bounds.size(); ++m) {
    j["bounds"].push_back({{"edge", labels.edge[m]},
                           {"psi_lower", cert.edge_bounds[m].lower},
                           {"psi_upper", cert.edge_bounds[m].upper}});
  }
  j["matrices"] = nlohmann::json::array();
  for (const auto& m : cert.matrices) {
    j["matrices"].push_back({{"name", m.name}, {"min_eigenvalue", m.min_eigenvalue}});
  }
  j["roa"] = {{"member", roa.member},
              {"psi_total", roa.psi_total},
              {"psi_margin", roa.psi_margin},
              {"velocity_lhs", roa.velocity_lhs},
              {"velocity_rhs", roa.velocity_rhs},
              {"velocity_margin", roa.velocity_margin}};
  std::cout << j.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Line-of-sight relative attitude formation control simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  RunOptions opts;

  auto* simulate = app.add_subcommand("simulate", "Propagate a scenario and write telemetry");
  simulate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();
  simulate->add_option("--out", opts.out_dir, "Output directory");
  simulate->add_option("--step", opts.step, "Override time step (s)");
  simulate->add_option("--horizon", opts.horizon, "Override horizon (s)");
  simulate->add_option("--decimate", opts.decimate, "Override output decimation");

  auto* certify = app.add_subcommand("certify", "Report certificate matrices and feasibility");
  certify->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

  auto* validate = app.add_subcommand("validate", "Check a scenario configuration");
  validate->add_option("--scenario", scenario_path, "Scenario JSON file")->required();

  std::string write_scenario_path;
  auto* demo = app.add_subcommand("demo-paper", "Run the embedded seven-craft demonstration");
  demo->add_option("--out", opts.out_dir, "Output directory");
  demo->add_option("--step", opts.step, "Override time step (s)");
  demo->add_option("--horizon", opts.horizon, "Override horizon (s)");
  demo->add_option("--decimate", opts.decimate, "Override output decimation");
  demo->add_option("--write-scenario", write_scenario_path,
                   "Also write the embedded scenario as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return run_simulation(losform::load_scenario(scenario_path), opts);
    }
    if (certify->parsed()) {
      return run_certify(losform::load_scenario(scenario_path));
    }
    if (validate->parsed()) {
      const losform::Scenario scenario = losform::load_scenario(scenario_path);
      const losform::ValidationReport report = losform::validate_scenario(scenario);
      print_report(report);
      std::cout << (report.ok() ? "scenario is valid" : "scenario is invalid") << "\n";
      return report.ok() ? kExitOk : kExitInvalid;
    }
    if (demo->parsed()) {
      losform::Scenario scenario = losform::make_demo_scenario();
      if (!write_scenario_path.empty()) {
        losform::save_scenario(scenario, write_scenario_path);
      }
      return run_simulation(std::move(scenario), opts);
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitInvalid;
  }
  return kExitOk;
}
