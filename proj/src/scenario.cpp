#include "losform/scenario.hpp"

#include <cmath>
#include <fstream>
#include <filesystem>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace losform {

namespace {

std::pair<int, int> canonical(std::pair<int, int> e) {
  return {std::min(e.first, e.second), std::max(e.first, e.second)};
}

EdgeGains edge_gains_for(const GainSpec& gains, std::pair<int, int> edge) {
  auto it = gains.edge_overrides.find(canonical(edge));
  if (it != gains.edge_overrides.end()) return it->second;
  return EdgeGains{gains.k_align, gains.k_coplanar};
}

double rate_gain_for(const GainSpec& gains, int node) {
  auto it = gains.rate_overrides.find(node);
  if (it != gains.rate_overrides.end()) return it->second;
  return gains.k_rate;
}

constexpr double kPitchWarnMargin = 0.1;  // rad short of pi/2 before flagging

}  // namespace

double effective_psi_cap(const Scenario& scenario) {
  if (scenario.psi_cap > 0.0) return scenario.psi_cap;
  double min_gain = std::numeric_limits<double>::infinity();
  for (const auto& edge : scenario.edges) {
    min_gain = std::min(min_gain, edge_gains_for(scenario.gains, edge).min_gain());
  }
  if (!std::isfinite(min_gain)) return 0.0;
  return 0.9 * 2.0 * min_gain;
}

ValidationReport validate_scenario(const Scenario& scenario) {
  ValidationReport report;
  auto error = [&report](std::string code, std::string msg) {
    report.errors.push_back({std::move(code), std::move(msg)});
  };
  auto warn = [&report](std::string code, std::string msg) {
    report.warnings.push_back({std::move(code), std::move(msg)});
  };

  std::unique_ptr<FormationSpec> spec;
  try {
    spec = std::make_unique<FormationSpec>(scenario.node_count, scenario.edges,
                                           scenario.assignment, scenario.positions);
  } catch (const std::exception& ex) {
    error("formation", ex.what());
    return report;
  }
  {
    ValidationReport formation = spec->validate();
    report.errors.insert(report.errors.end(), formation.errors.begin(), formation.errors.end());
    report.warnings.insert(report.warnings.end(), formation.warnings.begin(),
                           formation.warnings.end());
  }

  const size_t n = static_cast<size_t>(scenario.node_count);
  if (scenario.inertias.size() != n) error("inertia", "inertia count mismatch");
  if (scenario.initial_attitudes.size() != n) error("initial", "initial attitude count mismatch");
  if (scenario.initial_rates.size() != n) error("initial", "initial rate count mismatch");

  for (size_t i = 0; i < scenario.inertias.size(); ++i) {
    const Mat3& inertia = scenario.inertias[i];
    if (!inertia.allFinite() || (inertia - inertia.transpose()).norm() > 1e-9) {
      error("inertia", "inertia " + std::to_string(i + 1) + " is not symmetric");
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia);
    if (eig.eigenvalues().minCoeff() <= 0.0) {
      error("inertia", "inertia " + std::to_string(i + 1) + " is not positive definite");
    }
  }
  for (size_t i = 0; i < scenario.initial_attitudes.size(); ++i) {
    if (!is_rotation(scenario.initial_attitudes[i])) {
      error("initial", "initial attitude " + std::to_string(i + 1) + " is not a rotation");
    }
  }
  for (size_t i = 0; i < scenario.initial_rates.size(); ++i) {
    if (!scenario.initial_rates[i].allFinite()) {
      error("initial", "initial rate " + std::to_string(i + 1) + " is not finite");
    }
  }

  // Gains: every chain edge needs positive, distinct gains; every craft a
  // positive rate gain.
  for (const auto& edge : scenario.edges) {
    try {
      validate_gains(edge_gains_for(scenario.gains, edge));
    } catch (const std::exception& ex) {
      error("gains", "edge (" + std::to_string(edge.first + 1) + "," +
                         std::to_string(edge.second + 1) + "): " + ex.what());
    }
  }
  for (int i = 0; i < scenario.node_count; ++i) {
    if (spec->is_chain_node(i) && !(rate_gain_for(scenario.gains, i) > 0.0)) {
      error("gains", "craft " + std::to_string(i + 1) + ": rate gain must be positive");
    }
  }

  // Commands: exactly one per chain edge, each referencing chain edges only.
  std::set<std::pair<int, int>> covered;
  for (const auto& cmd : scenario.commands) {
    const auto key = canonical(cmd.edge);
    if (!spec->has_edge(cmd.edge.first, cmd.edge.second)) {
      error("commands", "command references a non-edge");
      continue;
    }
    if (!covered.insert(key).second) {
      error("commands", "duplicate command for an edge");
    }
    if (cmd.type == CommandDef::Type::TransposeOf) {
      if (!spec->has_edge(cmd.reference.first, cmd.reference.second)) {
        error("commands", "transpose_of references a non-edge");
      } else if (canonical(cmd.reference) == key) {
        error("commands", "transpose_of references its own edge");
      } else {
        for (const auto& other : scenario.commands) {
          if (canonical(other.edge) == canonical(cmd.reference) &&
              other.type == CommandDef::Type::TransposeOf) {
            error("commands", "transpose_of cannot reference another transpose_of");
          }
        }
      }
    }
    if (cmd.type == CommandDef::Type::Euler321 && cmd.euler.has_value()) {
      if (cmd.euler->pitch().max_abs_value() >= std::numbers::pi / 2.0 - kPitchWarnMargin) {
        warn("commands", "pitch command approaches +-pi/2");
      }
    }
  }
  for (const auto& edge : scenario.edges) {
    if (!covered.count(canonical(edge))) {
      error("commands", "edge (" + std::to_string(edge.first + 1) + "," +
                            std::to_string(edge.second + 1) + ") has no command");
    }
  }

  // Split mode and anchor.
  const auto& chain = spec->chain();
  if (scenario.split != "auto" && scenario.split != "anchor" && scenario.split != "half") {
    error("split", "split must be auto, anchor, or half");
  }
  if (scenario.split == "half" && chain.size() > 2) {
    error("split", "half split requires a single edge");
  }
  const bool anchor_mode =
      scenario.split == "anchor" || (scenario.split == "auto" && chain.size() > 2);
  if (anchor_mode && !chain.empty() &&
      (scenario.anchor < 0 || !spec->is_chain_node(scenario.anchor))) {
    error("anchor", "anchor split requires an anchor on the chain");
  }

  if (!(scenario.time_step > 0.0) || scenario.time_step > 0.01) {
    error("run", "time step must lie in (0, 0.01]");
  }
  if (!(scenario.horizon > 0.0)) {
    error("run", "horizon must be positive");
  }
  if (scenario.output_decimation < 1) {
    error("run", "output decimation must be >= 1");
  }

  const double cap = effective_psi_cap(scenario);
  double min_gain = std::numeric_limits<double>::infinity();
  for (const auto& edge : scenario.edges) {
    min_gain = std::min(min_gain, edge_gains_for(scenario.gains, edge).min_gain());
  }
  if (!scenario.edges.empty() && !(cap > 0.0 && cap < 2.0 * min_gain)) {
    error("psi-cap", "error-function cap must lie in (0, 2*min(edge gains))");
  }
  return report;
}

SimulationSetup build_setup(const Scenario& scenario) {
  {
    ValidationReport report = validate_scenario(scenario);
    if (!report.ok()) {
      std::string msg = "invalid scenario:";
      for (const auto& issue : report.errors) msg += " [" + issue.code + "] " + issue.message;
      throw std::invalid_argument(msg);
    }
  }
  SimulationSetup setup;
  setup.spec = std::make_shared<FormationSpec>(scenario.node_count, scenario.edges,
                                               scenario.assignment, scenario.positions);
  const auto& chain = setup.spec->chain();
  const int edge_count = static_cast<int>(chain.size()) - 1;

  // Command entries aligned with chain edges.
  std::vector<FormationCommands::Entry> entries(edge_count);
  std::map<std::pair<int, int>, int> edge_index;
  for (int m = 0; m < edge_count; ++m) {
    edge_index[canonical({chain[m], chain[m + 1]})] = m;
  }
  for (const auto& cmd : scenario.commands) {
    const int m = edge_index.at(canonical(cmd.edge));
    FormationCommands::Entry& entry = entries[m];
    entry.forward = (cmd.edge == std::pair{chain[m], chain[m + 1]});
    switch (cmd.type) {
      case CommandDef::Type::Identity:
        break;
      case CommandDef::Type::Euler321:
        entry.euler = std::make_shared<EulerAngleCommand>(*cmd.euler);
        break;
      case CommandDef::Type::TransposeOf: {
        const int ref = edge_index.at(canonical(cmd.reference));
        entry.alias_of = ref;
        // The authored relation is Q^d(edge) = Q^d(reference)^T. Expressed in
        // chain directions, the flip cancels whenever exactly one of the two
        // edges is authored against its chain order.
        const bool cmd_forward = entry.forward;
        const bool ref_forward =
            (cmd.reference == std::pair{chain[ref], chain[ref + 1]});
        entry.forward = cmd_forward != ref_forward;
        break;
      }
    }
  }
  setup.commands = std::make_shared<FormationCommands>(chain, std::move(entries));

  const DesiredRates::Mode mode =
      (scenario.split == "half" || (scenario.split == "auto" && chain.size() == 2))
          ? DesiredRates::Mode::SymmetricPair
          : DesiredRates::Mode::Anchor;
  setup.rates = std::make_shared<DesiredRates>(setup.commands, scenario.node_count,
                                               scenario.anchor, mode);

  ControlGains gains;
  for (int m = 0; m < edge_count; ++m) {
    gains.edge.push_back(edge_gains_for(scenario.gains, {chain[m], chain[m + 1]}));
  }
  for (int i = 0; i < scenario.node_count; ++i) {
    const double k = rate_gain_for(scenario.gains, i);
    // Non-chain crafts are uncontrolled; keep a positive placeholder so the
    // shared validation passes.
    gains.k_rate.push_back(setup.spec->is_chain_node(i) ? k : std::max(k, 1.0));
  }
  setup.controller = std::make_shared<FormationController>(setup.spec, setup.commands,
                                                           setup.rates, std::move(gains));

  setup.initial_states.resize(scenario.node_count);
  for (int i = 0; i < scenario.node_count; ++i) {
    setup.initial_states[i].attitude = scenario.initial_attitudes[i];
    setup.initial_states[i].omega = scenario.initial_rates[i];
    setup.initial_states[i].inertia = scenario.inertias[i];
  }
  setup.psi_cap = effective_psi_cap(scenario);
  setup.rate_bound = setup.rates->rate_bound(scenario.horizon);
  return setup;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace {

using nlohmann::json;

AngleFunction angle_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") {
    return AngleFunction::constant(j.at("value").get<double>());
  }
  const double amplitude = j.at("amplitude").get<double>();
  const double frequency = j.at("frequency").get<double>();
  const double offset = j.value("offset", 0.0);
  if (kind == "sin") return AngleFunction::sine(amplitude, frequency, offset);
  if (kind == "cos") return AngleFunction::cosine(amplitude, frequency, offset);
  throw std::invalid_argument("angle function kind must be constant, sin, or cos");
}

json angle_to_json(const AngleFunction& f) {
  switch (f.kind()) {
    case AngleFunction::Kind::Constant:
      return {{"kind", "constant"}, {"value", f.offset()}};
    case AngleFunction::Kind::Sin:
      return {{"kind", "sin"}, {"amplitude", f.amplitude()}, {"frequency", f.frequency()},
              {"offset", f.offset()}};
    case AngleFunction::Kind::Cos:
      return {{"kind", "cos"}, {"amplitude", f.amplitude()}, {"frequency", f.frequency()},
              {"offset", f.offset()}};
  }
  throw std::logic_error("unreachable");
}

Vec3 vec3_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("expected an array of 3 numbers");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Mat3 mat3_from_json(const json& j) {
  if (j.is_array() && j.size() == 3 && j[0].is_number()) {
    // Diagonal shorthand.
    Mat3 m = Mat3::Zero();
    m(0, 0) = j[0].get<double>();
    m(1, 1) = j[1].get<double>();
    m(2, 2) = j[2].get<double>();
    return m;
  }
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("expected a 3x3 matrix or diagonal triple");
  }
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    const Vec3 row = vec3_from_json(j[r]);
    m.row(r) = row.transpose();
  }
  return m;
}

json mat3_to_json(const Mat3& m) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) rows.push_back(vec3_to_json(m.row(r).transpose()));
  return rows;
}

Mat3 attitude_from_json(const json& j) {
  if (j.is_string() && j.get<std::string>() == "identity") return Mat3::Identity();
  if (j.contains("axis_angle")) {
    const json& aa = j.at("axis_angle");
    const Vec3 axis = vec3_from_json(aa.at("axis"));
    const double angle = aa.at("angle").get<double>();
    return exp_so3(angle * axis.normalized()).matrix();
  }
  if (j.contains("euler321")) {
    const json& e = j.at("euler321");
    return euler321_to_rotation(e[0].get<double>(), e[1].get<double>(), e[2].get<double>())
        .matrix();
  }
  if (j.contains("matrix")) {
    const Mat3 m = mat3_from_json(j.at("matrix"));
    return RotationMatrix::from_matrix(m).matrix();
  }
  throw std::invalid_argument("attitude must be identity, axis_angle, euler321, or matrix");
}

std::pair<int, int> edge_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument("edge must be a pair of node ids");
  }
  return {j[0].get<int>() - 1, j[1].get<int>() - 1};
}

json edge_to_json(std::pair<int, int> e) {
  return json::array({e.first + 1, e.second + 1});
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.name = j.value("name", std::string("scenario"));
  s.node_count = j.at("nodes").get<int>();

  for (const auto& e : j.at("edges")) s.edges.push_back(edge_from_json(e));
  for (const auto& a : j.at("assignment")) {
    if (!a.is_array() || a.size() != 3) {
      throw std::invalid_argument("assignment entries must be [i, j, reference]");
    }
    s.assignment[canonical({a[0].get<int>() - 1, a[1].get<int>() - 1})] = a[2].get<int>() - 1;
  }
  for (const auto& p : j.at("positions")) s.positions.push_back(vec3_from_json(p));

  const json& inertia = j.at("inertia");
  if (inertia.size() == 1 && s.node_count > 1) {
    const Mat3 m = mat3_from_json(inertia[0]);
    s.inertias.assign(s.node_count, m);
  } else {
    for (const auto& entry : inertia) s.inertias.push_back(mat3_from_json(entry));
  }

  if (j.contains("initial")) {
    for (const auto& entry : j.at("initial")) {
      s.initial_attitudes.push_back(entry.contains("attitude")
                                        ? attitude_from_json(entry.at("attitude"))
                                        : Mat3::Identity());
      s.initial_rates.push_back(entry.contains("rate") ? vec3_from_json(entry.at("rate"))
                                                       : Vec3::Zero());
    }
  } else {
    s.initial_attitudes.assign(s.node_count, Mat3::Identity());
    s.initial_rates.assign(s.node_count, Vec3::Zero());
  }

  for (const auto& entry : j.at("commands")) {
    CommandDef cmd;
    cmd.edge = edge_from_json(entry.at("edge"));
    const std::string type = entry.value("type", std::string("identity"));
    if (type == "identity") {
      cmd.type = CommandDef::Type::Identity;
    } else if (type == "euler321") {
      cmd.type = CommandDef::Type::Euler321;
      cmd.euler.emplace(angle_from_json(entry.at("yaw")), angle_from_json(entry.at("pitch")),
                        angle_from_json(entry.at("roll")));
    } else if (type == "transpose_of") {
      cmd.type = CommandDef::Type::TransposeOf;
      cmd.reference = edge_from_json(entry.at("reference"));
    } else {
      throw std::invalid_argument("command type must be identity, euler321, or transpose_of");
    }
    s.commands.push_back(std::move(cmd));
  }

  const json& gains = j.at("gains");
  s.gains.k_align = gains.at("k_align").get<double>();
  s.gains.k_coplanar = gains.at("k_coplanar").get<double>();
  s.gains.k_rate = gains.at("k_rate").get<double>();
  if (gains.contains("edge_overrides")) {
    for (const auto& entry : gains.at("edge_overrides")) {
      s.gains.edge_overrides[canonical(edge_from_json(entry.at("edge")))] =
          EdgeGains{entry.at("k_align").get<double>(), entry.at("k_coplanar").get<double>()};
    }
  }
  if (gains.contains("rate_overrides")) {
    for (const auto& entry : gains.at("rate_overrides")) {
      s.gains.rate_overrides[entry.at("node").get<int>() - 1] = entry.at("k_rate").get<double>();
    }
  }

  if (j.contains("anchor")) s.anchor = j.at("anchor").get<int>() - 1;
  s.split = j.value("split", std::string("auto"));
  s.time_step = j.value("time_step", 1e-3);
  s.horizon = j.value("horizon", 30.0);
  s.psi_cap = j.value("psi_cap", 0.0);
  s.output_decimation = j.value("output_decimation", 10);
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["nodes"] = s.node_count;
  j["edges"] = json::array();
  for (const auto& e : s.edges) j["edges"].push_back(edge_to_json(e));
  j["assignment"] = json::array();
  for (const auto& [edge, ref] : s.assignment) {
    j["assignment"].push_back(json::array({edge.first + 1, edge.second + 1, ref + 1}));
  }
  j["positions"] = json::array();
  for (const auto& p : s.positions) j["positions"].push_back(vec3_to_json(p));
  j["inertia"] = json::array();
  for (const auto& m : s.inertias) j["inertia"].push_back(mat3_to_json(m));
  j["initial"] = json::array();
  for (size_t i = 0; i < s.initial_attitudes.size(); ++i) {
    j["initial"].push_back({{"attitude", {{"matrix", mat3_to_json(s.initial_attitudes[i])}}},
                            {"rate", vec3_to_json(s.initial_rates[i])}});
  }
  j["commands"] = json::array();
  for (const auto& cmd : s.commands) {
    json entry;
    entry["edge"] = edge_to_json(cmd.edge);
    switch (cmd.type) {
      case CommandDef::Type::Identity:
        entry["type"] = "identity";
        break;
      case CommandDef::Type::Euler321:
        entry["type"] = "euler321";
        entry["yaw"] = angle_to_json(cmd.euler->yaw());
        entry["pitch"] = angle_to_json(cmd.euler->pitch());
        entry["roll"] = angle_to_json(cmd.euler->roll());
        break;
      case CommandDef::Type::TransposeOf:
        entry["type"] = "transpose_of";
        entry["reference"] = edge_to_json(cmd.reference);
        break;
    }
    j["commands"].push_back(std::move(entry));
  }
  j["gains"] = {{"k_align", s.gains.k_align},
                {"k_coplanar", s.gains.k_coplanar},
                {"k_rate", s.gains.k_rate}};
  if (!s.gains.edge_overrides.empty()) {
    json overrides = json::array();
    for (const auto& [edge, g] : s.gains.edge_overrides) {
      overrides.push_back({{"edge", edge_to_json(edge)},
                           {"k_align", g.k_align},
                           {"k_coplanar", g.k_coplanar}});
    }
    j["gains"]["edge_overrides"] = std::move(overrides);
  }
  if (!s.gains.rate_overrides.empty()) {
    json overrides = json::array();
    for (const auto& [node, k] : s.gains.rate_overrides) {
      overrides.push_back({{"node", node + 1}, {"k_rate", k}});
    }
    j["gains"]["rate_overrides"] = std::move(overrides);
  }
  if (s.anchor >= 0) j["anchor"] = s.anchor + 1;
  j["split"] = s.split;
  j["time_step"] = s.time_step;
  j["horizon"] = s.horizon;
  j["psi_cap"] = s.psi_cap;
  j["output_decimation"] = s.output_decimation;
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  json j;
  in >> j;
  return scenario_from_json(j);
}

void save_scenario(const Scenario& scenario, const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << scenario_to_json(scenario).dump(2) << "\n";
}

Scenario make_demo_scenario() {
  using std::numbers::pi;
  Scenario s;
  s.name = "seven-craft-chain";
  s.node_count = 7;
  for (int i = 0; i + 1 < 7; ++i) s.edges.push_back({i, i + 1});
  s.assignment[{0, 1}] = 2;
  s.assignment[{1, 2}] = 3;
  s.assignment[{2, 3}] = 4;
  s.assignment[{3, 4}] = 6;
  s.assignment[{4, 5}] = 6;
  s.assignment[{5, 6}] = 4;

  // Regular heptagon; only the directions between crafts matter.
  for (int i = 0; i < 7; ++i) {
    const double theta = 2.0 * pi * i / 7.0;
    s.positions.push_back(10.0 * Vec3(std::cos(theta), std::sin(theta), 0.0));
  }

  Mat3 inertia = Mat3::Zero();
  inertia.diagonal() << 3.0, 2.0, 1.0;
  s.inertias.assign(7, inertia);

  s.initial_attitudes.assign(7, Mat3::Identity());
  s.initial_attitudes[2] = exp_so3(0.999 * pi * Vec3::UnitX()).matrix();
  s.initial_attitudes[5] = exp_so3(0.990 * pi * Vec3::UnitY()).matrix();
  s.initial_rates.assign(7, Vec3::Zero());

  auto identity_cmd = [](int i, int j) {
    CommandDef cmd;
    cmd.edge = {i, j};
    cmd.type = CommandDef::Type::Identity;
    return cmd;
  };
  s.commands.push_back(identity_cmd(0, 1));
  s.commands.push_back(identity_cmd(1, 2));
  {
    CommandDef cmd;
    cmd.edge = {2, 3};
    cmd.type = CommandDef::Type::Euler321;
    cmd.euler.emplace(AngleFunction::sine(1.0, 0.5), AngleFunction::constant(0.1),
                      AngleFunction::cosine(1.0, 1.0));
    s.commands.push_back(std::move(cmd));
  }
  {
    CommandDef cmd;
    cmd.edge = {3, 4};
    cmd.type = CommandDef::Type::Euler321;
    cmd.euler.emplace(AngleFunction::constant(0.0), AngleFunction::cosine(1.0, 0.2, -0.1),
                      AngleFunction::sine(0.5, 2.0));
    s.commands.push_back(std::move(cmd));
  }
  s.commands.push_back(identity_cmd(4, 5));
  {
    CommandDef cmd;
    cmd.edge = {5, 6};
    cmd.type = CommandDef::Type::TransposeOf;
    cmd.reference = {3, 4};
    s.commands.push_back(std::move(cmd));
  }

  s.gains.k_align = 25.0;
  s.gains.k_coplanar = 25.1;
  s.gains.k_rate = 7.0;
  s.anchor = 3;
  s.split = "anchor";
  s.time_step = 1e-3;
  s.horizon = 30.0;
  s.psi_cap = 45.0;
  s.output_decimation = 10;
  return s;
}

}  // namespace losform
