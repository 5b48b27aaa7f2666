#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>

#include "losform/control.hpp"
#include "losform/los.hpp"
#include "support/test_support.hpp"

using namespace losform;
using losform::testing::Rng;
using losform::testing::random_rotation;
using losform::testing::random_vec3;

namespace {

Mat3 demo_inertia() {
  Mat3 inertia = Mat3::Zero();
  inertia.diagonal() << 3.0, 2.0, 1.0;
  return inertia;
}

struct PairLoop {
  std::shared_ptr<FormationSpec> spec;
  std::shared_ptr<FormationCommands> commands;
  std::shared_ptr<DesiredRates> rates;
  std::shared_ptr<FormationController> controller;
};

// Two controlled crafts with a sinusoidal command and the symmetric split.
PairLoop make_pair_loop(const EdgeGains& gains = {25.0, 25.1}, double k_rate = 7.0) {
  PairLoop loop;
  loop.spec = std::make_shared<FormationSpec>(losform::testing::two_craft_chain());
  std::vector<FormationCommands::Entry> entries(1);
  entries[0].euler = std::make_shared<EulerAngleCommand>(
      AngleFunction::sine(0.5, 0.5), AngleFunction::sine(0.3, 0.3),
      AngleFunction::cosine(0.5, 1.0));
  loop.commands =
      std::make_shared<FormationCommands>(std::vector<int>{0, 1}, std::move(entries));
  loop.rates = std::make_shared<DesiredRates>(loop.commands, 3, 0,
                                              DesiredRates::Mode::SymmetricPair);
  ControlGains cg;
  cg.edge = {gains};
  cg.k_rate = {k_rate, k_rate, 1.0};
  loop.controller =
      std::make_shared<FormationController>(loop.spec, loop.commands, loop.rates, cg);
  return loop;
}

struct TripleLoop {
  std::shared_ptr<FormationSpec> spec;
  std::shared_ptr<FormationCommands> commands;
  std::shared_ptr<DesiredRates> rates;
  std::shared_ptr<FormationController> controller;
};

TripleLoop make_triple_loop() {
  TripleLoop loop;
  loop.spec = std::make_shared<FormationSpec>(losform::testing::three_craft_chain());
  std::vector<FormationCommands::Entry> entries(2);
  entries[0].euler = std::make_shared<EulerAngleCommand>(
      AngleFunction::sine(0.4, 0.6), AngleFunction::constant(0.1),
      AngleFunction::cosine(0.3, 0.8));
  loop.commands =
      std::make_shared<FormationCommands>(std::vector<int>{0, 1, 2}, std::move(entries));
  loop.rates =
      std::make_shared<DesiredRates>(loop.commands, 3, 1, DesiredRates::Mode::Anchor);
  ControlGains cg;
  cg.edge = {{25.0, 25.1}, {20.0, 21.0}};
  cg.k_rate = {7.0, 6.0, 5.0};
  loop.controller =
      std::make_shared<FormationController>(loop.spec, loop.commands, loop.rates, cg);
  return loop;
}

std::vector<SpacecraftState> random_states(Rng& rng, int n) {
  std::vector<SpacecraftState> states(n);
  for (auto& s : states) {
    s.attitude = random_rotation(rng);
    s.omega = random_vec3(rng, 1.5);
    s.inertia = demo_inertia();
  }
  return states;
}

}  // namespace

TEST_CASE("moment law vanishes at rest on the command") {
  const Vec3 u = control_moment(Vec3::Zero(), 7.0, Vec3::Zero(), demo_inertia(), {});
  CHECK(u.norm() == 0.0);
}

TEST_CASE("moment law reduces to feedforward when tracking exactly") {
  CraftRateCommand desired;
  desired.rate = Vec3(0.3, -0.2, 0.5);
  desired.rate_dot = Vec3(0.1, 0.0, -0.4);
  const Mat3 inertia = demo_inertia();
  const Vec3 u = control_moment(Vec3::Zero(), 7.0, Vec3::Zero(), inertia, desired);
  const Vec3 expected =
      hat(desired.rate) * (inertia * desired.rate) + inertia * desired.rate_dot;
  CHECK((u - expected).norm() <= 1e-15);
}

TEST_CASE("pair at the commanded configuration produces zero moments") {
  PairLoop loop = make_pair_loop();
  // Constant identity command instead, so feedforward vanishes too.
  std::vector<FormationCommands::Entry> entries(1);
  loop.commands =
      std::make_shared<FormationCommands>(std::vector<int>{0, 1}, std::move(entries));
  loop.rates = std::make_shared<DesiredRates>(loop.commands, 3, 0,
                                              DesiredRates::Mode::SymmetricPair);
  ControlGains cg;
  cg.edge = {{25.0, 25.1}};
  cg.k_rate = {7.0, 7.0, 1.0};
  loop.controller =
      std::make_shared<FormationController>(loop.spec, loop.commands, loop.rates, cg);

  Rng rng(200);
  std::vector<SpacecraftState> states(3);
  const Mat3 shared = random_rotation(rng);
  states[0].attitude = shared;
  states[1].attitude = shared;  // identical attitudes realize the identity command
  states[2].attitude = random_rotation(rng);
  for (auto& s : states) s.inertia = demo_inertia();

  const ControlSnapshot snap = loop.controller->evaluate(0.0, states);
  CHECK(snap.moment[0].norm() <= 1e-12);
  CHECK(snap.moment[1].norm() <= 1e-12);
  CHECK(snap.moment[2].norm() == 0.0);  // reference craft is uncontrolled
  CHECK(snap.forward[0].psi <= 1e-12);
}

TEST_CASE("endpoint law matches the manual formula") {
  PairLoop loop = make_pair_loop();
  Rng rng(201);
  for (int trial = 0; trial < 50; ++trial) {
    const auto states = random_states(rng, 3);
    const double t = 0.37 * trial;
    const ControlSnapshot snap = loop.controller->evaluate(t, states);

    // Rebuild craft 0's moment from scratch.
    const LosSet los = synthesize_los(states, *loop.spec);
    EdgeView view{los.ray(0, 1).vec(), los.ray(0, 2).vec(), los.ray(1, 0).vec(),
                  los.ray(1, 2).vec()};
    const RelativeAttitudeCommand cmd = loop.commands->edge_command(0, t);
    const EdgeErrors errors =
        edge_errors(view, cmd.attitude, loop.controller->gains().edge[0], los.scale(0, 1));
    const auto desired = loop.rates->eval(t);
    const Vec3 rate_error = states[0].omega - desired[0].rate;
    const Vec3 manual =
        control_moment(errors.e, 7.0, rate_error, states[0].inertia, desired[0]);
    CHECK((snap.moment[0] - manual).norm() <= 1e-12);
  }
}

TEST_CASE("closed-loop rate-error dynamics identity at endpoints") {
  PairLoop loop = make_pair_loop();
  Rng rng(202);
  for (int trial = 0; trial < 200; ++trial) {
    const auto states = random_states(rng, 3);
    const double t = 0.11 * trial;
    const ControlSnapshot snap = loop.controller->evaluate(t, states);
    const auto desired = loop.rates->eval(t);

    for (int node : {0, 1}) {
      const Mat3& inertia = states[node].inertia;
      const Vec3& omega = states[node].omega;
      const Vec3 e_rate = snap.rate_error[node];
      // J d/dt e_rate = u - omega x J omega - J rate_cmd_dot
      const Vec3 lhs =
          snap.moment[node] - omega.cross(inertia * omega) - inertia * desired[node].rate_dot;
      const Vec3 error_term = node == 0 ? snap.forward[0].e : snap.backward_e[0];
      const Vec3 rhs = hat(inertia * e_rate + inertia * desired[node].rate) * e_rate -
                       error_term - 7.0 * e_rate;
      CHECK((lhs - rhs).norm() <= 1e-9);
    }
  }
}

TEST_CASE("interior law averages its two edge errors") {
  TripleLoop loop = make_triple_loop();
  Rng rng(203);
  for (int trial = 0; trial < 100; ++trial) {
    const auto states = random_states(rng, 3);
    const double t = 0.23 * trial;
    const ControlSnapshot snap = loop.controller->evaluate(t, states);
    const auto desired = loop.rates->eval(t);

    // Craft 1 sits between edges (0,1) and (1,2); its error term is the
    // average of e_10 and e_12.
    const Vec3 error_term = 0.5 * (snap.backward_e[0] + snap.forward[1].e);
    const Vec3 manual = control_moment(error_term, 6.0, snap.rate_error[1],
                                       states[1].inertia, desired[1]);
    CHECK((snap.moment[1] - manual).norm() <= 1e-12);

    // Closed-loop identity with the averaged error term.
    const Vec3 lhs = snap.moment[1] - states[1].omega.cross(states[1].inertia * states[1].omega) -
                     states[1].inertia * desired[1].rate_dot;
    const Vec3 rhs =
        hat(states[1].inertia * snap.rate_error[1] + states[1].inertia * desired[1].rate) *
            snap.rate_error[1] -
        error_term - 6.0 * snap.rate_error[1];
    CHECK((lhs - rhs).norm() <= 1e-9);

    // Endpoints keep the single-edge law.
    const Vec3 manual0 = control_moment(snap.forward[0].e, 7.0, snap.rate_error[0],
                                        states[0].inertia, desired[0]);
    CHECK((snap.moment[0] - manual0).norm() <= 1e-12);
    const Vec3 manual2 = control_moment(snap.backward_e[1], 5.0, snap.rate_error[2],
                                        states[2].inertia, desired[2]);
    CHECK((snap.moment[2] - manual2).norm() <= 1e-12);
  }
}

TEST_CASE("seven-craft moments are finite and bounded at start") {
  auto spec = std::make_shared<FormationSpec>(losform::testing::seven_craft_chain());
  auto commands = losform::testing::seven_craft_commands();
  auto rates = std::make_shared<DesiredRates>(commands, 7, 3, DesiredRates::Mode::Anchor);
  ControlGains cg;
  cg.edge.assign(6, EdgeGains{25.0, 25.1});
  cg.k_rate.assign(7, 7.0);
  FormationController controller(spec, commands, rates, cg);

  std::vector<SpacecraftState> states(7);
  for (auto& s : states) s.inertia = demo_inertia();
  states[2].attitude = exp_so3(0.999 * std::numbers::pi * Vec3::UnitX()).matrix();
  states[5].attitude = exp_so3(0.990 * std::numbers::pi * Vec3::UnitY()).matrix();

  const ControlSnapshot snap = controller.evaluate(0.0, states);
  for (const auto& u : snap.moment) {
    CHECK(u.allFinite());
    // Error terms are bounded by the gain sums; feedforward by inertia and
    // command rates, both of order tens here.
    CHECK(u.norm() <= 2.0 * (25.0 + 25.1) + 100.0);
  }
}

TEST_CASE("control uses only the edge's shared measurement labels") {
  TripleLoop loop = make_triple_loop();
  Rng rng(205);
  for (int trial = 0; trial < 50; ++trial) {
    const auto states = random_states(rng, 3);
    const double t = 0.17 * trial;
    const ControlSnapshot snap = loop.controller->evaluate(t, states);
    const LosSet los = synthesize_los(states, *loop.spec);
    const auto [meas, comm] = derive_sets(*loop.spec);
    const auto desired = loop.rates->eval(t);

    // Reconstruct craft 1's moment from nothing but the labels its
    // measurement set and incoming communication sets provide.
    auto allowed_ray = [&](int observer, int target) {
      const auto& own = meas.targets.at(observer);
      const bool measured = std::find(own.begin(), own.end(), target) != own.end();
      REQUIRE(measured);
      return los.ray(observer, target).vec();
    };
    auto communicated_ray = [&](int sender, int receiver, int target) {
      const auto& labels = comm.labels.at({sender, receiver});
      const bool sent = std::find(labels.begin(), labels.end(),
                                  std::pair{sender, target}) != labels.end();
      REQUIRE(sent);
      return los.ray(sender, target).vec();
    };

    // Edge (1,0) with reference 2; edge (1,2) with reference 0.
    EdgeView view_10{allowed_ray(1, 0), allowed_ray(1, 2), communicated_ray(0, 1, 1),
                     communicated_ray(0, 1, 2)};
    EdgeView view_12{allowed_ray(1, 2), allowed_ray(1, 0), communicated_ray(2, 1, 1),
                     communicated_ray(2, 1, 0)};
    const Mat3 qd_10 = loop.commands->directed_command(1, 0, t).attitude;
    const Mat3 qd_12 = loop.commands->directed_command(1, 2, t).attitude;
    const Vec3 e_10 =
        edge_errors(view_10, qd_10, loop.controller->gains().edge[0], los.scale(0, 1)).e;
    const Vec3 e_12 =
        edge_errors(view_12, qd_12, loop.controller->gains().edge[1], los.scale(1, 2)).e;
    const Vec3 manual = control_moment(0.5 * (e_10 + e_12), 6.0,
                                       states[1].omega - desired[1].rate, states[1].inertia,
                                       desired[1]);
    CHECK((snap.moment[1] - manual).norm() <= 1e-11);
  }
}

TEST_CASE("gain validation rejects bad shapes and values") {
  ControlGains cg;
  cg.edge = {{25.0, 25.1}};
  cg.k_rate = {7.0, 7.0, 1.0};
  CHECK_NOTHROW(validate_control_gains(cg, 1, 3));
  CHECK_THROWS_AS(validate_control_gains(cg, 2, 3), std::invalid_argument);
  cg.k_rate[0] = 0.0;
  CHECK_THROWS_AS(validate_control_gains(cg, 1, 3), std::invalid_argument);
}
