/**
 * @file scenario.hpp
 * @brief Scenario configuration: formation, inertias, initial conditions,
 *        commanded trajectories, gains, and run parameters; JSON load/save
 *        and the embedded seven-craft demonstration case.
 *
 * All angles are radians; node ids are 1-based in files and 0-based in
 * memory.
 */
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "losform/control.hpp"
#include "losform/formation.hpp"
#include "losform/trajectory.hpp"

namespace losform {

struct CommandDef {
  enum class Type { Identity, Euler321, TransposeOf };
  std::pair<int, int> edge;  // directed, as authored
  Type type = Type::Identity;
  std::optional<EulerAngleCommand> euler;  // Type::Euler321
  std::pair<int, int> reference{-1, -1};   // Type::TransposeOf
};

struct GainSpec {
  double k_align = 0.0;
  double k_coplanar = 0.0;
  double k_rate = 0.0;
  std::map<std::pair<int, int>, EdgeGains> edge_overrides;  // canonical (min,max) keys
  std::map<int, double> rate_overrides;
};

struct Scenario {
  std::string name = "scenario";
  int node_count = 0;
  std::vector<std::pair<int, int>> edges;
  std::map<std::pair<int, int>, int> assignment;
  std::vector<Vec3> positions;
  std::vector<Mat3> inertias;
  std::vector<Mat3> initial_attitudes;
  std::vector<Vec3> initial_rates;
  std::vector<CommandDef> commands;
  GainSpec gains;
  int anchor = -1;             // node holding zero desired rate (anchor split)
  std::string split = "auto";  // "anchor" | "half" | "auto"
  double time_step = 1e-3;     // s, must lie in (0, 0.01]
  double horizon = 30.0;       // s
  double psi_cap = 0.0;        // 0 => 90% of 2*min(edge gains)
  int output_decimation = 10;  // record every k-th step
};

/// Effective error-function cap: the explicit value, or the default fraction
/// of the admissible range when unset.
double effective_psi_cap(const Scenario& scenario);

/// Full configuration check: formation assumptions, gains, command coverage,
/// state shapes, and run parameters. Never throws.
ValidationReport validate_scenario(const Scenario& scenario);

/// Scenario resolved into runnable pieces.
struct SimulationSetup {
  std::shared_ptr<const FormationSpec> spec;
  std::shared_ptr<const FormationCommands> commands;
  std::shared_ptr<const DesiredRates> rates;
  std::shared_ptr<const FormationController> controller;
  std::vector<SpacecraftState> initial_states;
  double psi_cap = 0.0;
  double rate_bound = 0.0;  // measured over the scenario horizon
};

/// Builds the runnable setup; throws std::invalid_argument when
/// validate_scenario() would report errors.
SimulationSetup build_setup(const Scenario& scenario);

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& scenario);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& scenario, const std::string& path);

/// The embedded seven-craft demonstration: a serial chain with two flipped
/// initial attitudes, sinusoidal commands on two edges, one edge tracking
/// another's transpose, and uniform gains.
Scenario make_demo_scenario();

}  // namespace losform
