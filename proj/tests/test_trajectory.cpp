#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <memory>

#include "losform/trajectory.hpp"
#include "support/test_support.hpp"

using namespace losform;
using losform::testing::Rng;

namespace {

// The seven-craft demonstration command set on chain 0..6.
std::shared_ptr<FormationCommands> demo_commands() {
  std::vector<FormationCommands::Entry> entries(6);
  entries[2].euler = std::make_shared<EulerAngleCommand>(
      AngleFunction::sine(1.0, 0.5), AngleFunction::constant(0.1),
      AngleFunction::cosine(1.0, 1.0));
  entries[3].euler = std::make_shared<EulerAngleCommand>(
      AngleFunction::constant(0.0), AngleFunction::cosine(1.0, 0.2, -0.1),
      AngleFunction::sine(0.5, 2.0));
  entries[5].alias_of = 3;
  entries[5].forward = false;  // transpose of the referenced forward command
  return std::make_shared<FormationCommands>(std::vector<int>{0, 1, 2, 3, 4, 5, 6},
                                             std::move(entries));
}

Vec3 fd_rate(const std::function<Mat3(double)>& q, double t, double h) {
  const Mat3 diff = (q(t + h) - q(t - h)) / (2.0 * h);
  return vee(skew_part(q(t).transpose() * diff));
}

}  // namespace

TEST_CASE("angle function derivatives match finite differences") {
  const AngleFunction funcs[] = {AngleFunction::constant(0.7),
                                 AngleFunction::sine(1.3, 0.5, 0.2),
                                 AngleFunction::cosine(0.4, 2.0, -0.1)};
  const double h = 1e-6;
  for (const auto& f : funcs) {
    for (double t : {0.0, 0.3, 1.7, 9.2}) {
      CHECK(f.rate(t) ==
            doctest::Approx((f.value(t + h) - f.value(t - h)) / (2 * h)).epsilon(1e-7));
      CHECK(f.accel(t) ==
            doctest::Approx((f.rate(t + h) - f.rate(t - h)) / (2 * h)).epsilon(1e-7));
    }
  }
}

TEST_CASE("constant angles command zero rates") {
  const EulerAngleCommand cmd(AngleFunction::constant(0.3), AngleFunction::constant(-0.2),
                              AngleFunction::constant(1.1));
  for (double t : {0.0, 1.0, 5.0}) {
    const RelativeAttitudeCommand sample = cmd.eval(t);
    CHECK(sample.rate.norm() <= 1e-15);
    CHECK(sample.rate_dot.norm() <= 1e-15);
    CHECK((sample.attitude - euler321_to_rotation(0.3, -0.2, 1.1).matrix()).norm() <= 1e-15);
  }
}

TEST_CASE("demonstration command at t = 0") {
  const auto commands = demo_commands();
  const RelativeAttitudeCommand sample = commands->edge_command(2, 0.0);
  CHECK((sample.attitude - euler321_to_rotation(0.0, 0.1, 1.0).matrix()).norm() <= 1e-14);
}

TEST_CASE("command kinematics match finite differences") {
  const EulerAngleCommand cmd(AngleFunction::sine(1.0, 0.5), AngleFunction::constant(0.1),
                              AngleFunction::cosine(1.0, 1.0));
  auto q = [&cmd](double t) { return cmd.eval(t).attitude; };
  const double h = 1e-5;
  for (double t : {0.0, 0.4, 1.3, 2.9, 7.7}) {
    const RelativeAttitudeCommand sample = cmd.eval(t);
    CHECK(is_rotation(sample.attitude, 1e-12));
    CHECK((fd_rate(q, t, h) - sample.rate).norm() <= 1e-8);

    auto rate_of = [&cmd](double tt) { return cmd.eval(tt).rate; };
    const Vec3 fd_accel = (rate_of(t + h) - rate_of(t - h)) / (2.0 * h);
    CHECK((fd_accel - sample.rate_dot).norm() <= 1e-8);
  }
}

TEST_CASE("reversed command satisfies the transposed kinematics") {
  const EulerAngleCommand cmd(AngleFunction::sine(0.8, 0.7), AngleFunction::cosine(0.3, 0.4),
                              AngleFunction::constant(0.2));
  auto q_rev = [&cmd](double t) { return reversed(cmd.eval(t)).attitude; };
  const double h = 1e-5;
  for (double t : {0.1, 0.9, 3.3}) {
    const RelativeAttitudeCommand rev = reversed(cmd.eval(t));
    CHECK((rev.attitude - cmd.eval(t).attitude.transpose()).norm() <= 1e-15);
    CHECK((fd_rate(q_rev, t, h) - rev.rate).norm() <= 1e-8);

    auto rate_of = [&cmd](double tt) { return reversed(cmd.eval(tt)).rate; };
    const Vec3 fd_accel = (rate_of(t + h) - rate_of(t - h)) / (2.0 * h);
    CHECK((fd_accel - rev.rate_dot).norm() <= 1e-8);
  }
}

TEST_CASE("directed commands agree across edge directions") {
  const auto commands = demo_commands();
  for (double t : {0.0, 0.5, 2.1}) {
    const RelativeAttitudeCommand fwd = commands->directed_command(2, 3, t);
    const RelativeAttitudeCommand bwd = commands->directed_command(3, 2, t);
    CHECK((fwd.attitude - bwd.attitude.transpose()).norm() <= 1e-15);
    CHECK((bwd.rate + fwd.attitude * fwd.rate).norm() <= 1e-15);
  }
  CHECK_THROWS_AS(commands->directed_command(0, 2, 0.0), std::invalid_argument);
}

TEST_CASE("alias edge tracks the transposed reference command") {
  const auto commands = demo_commands();
  for (double t : {0.0, 0.7, 4.2}) {
    const RelativeAttitudeCommand ref = commands->edge_command(3, t);
    const RelativeAttitudeCommand alias = commands->edge_command(5, t);
    CHECK((alias.attitude - ref.attitude.transpose()).norm() <= 1e-15);
    CHECK((alias.rate + ref.attitude * ref.rate).norm() <= 1e-15);
    CHECK((alias.rate_dot + ref.attitude * ref.rate_dot).norm() <= 1e-15);
  }
}

TEST_CASE("identity commands split into zero rates") {
  std::vector<FormationCommands::Entry> entries(3);
  auto commands = std::make_shared<FormationCommands>(std::vector<int>{0, 1, 2, 3},
                                                      std::move(entries));
  const DesiredRates rates(commands, 4, 1, DesiredRates::Mode::Anchor);
  for (const auto& cmd : rates.eval(3.7)) {
    CHECK(cmd.rate.norm() == 0.0);
    CHECK(cmd.rate_dot.norm() == 0.0);
  }
  CHECK(rates.rate_bound(10.0, 64) == 0.0);
}

TEST_CASE("anchored split satisfies the edge consistency relation") {
  const auto commands = demo_commands();
  const DesiredRates rates(commands, 7, 3, DesiredRates::Mode::Anchor);
  for (double t : {0.0, 0.31, 1.9, 6.5, 14.2}) {
    const auto per_craft = rates.eval(t);
    CHECK(per_craft[3].rate.norm() == 0.0);  // anchor holds zero
    for (int m = 0; m < 6; ++m) {
      const RelativeAttitudeCommand rel = commands->edge_command(m, t);
      const Vec3 residual = rel.rate - (per_craft[m].rate -
                                        rel.attitude.transpose() * per_craft[m + 1].rate);
      CHECK(residual.norm() <= 1e-10);
    }
  }
}

TEST_CASE("split rate derivatives match finite differences") {
  const auto commands = demo_commands();
  const DesiredRates rates(commands, 7, 3, DesiredRates::Mode::Anchor);
  const double h = 1e-5;
  for (double t : {0.2, 1.1, 5.0}) {
    const auto now = rates.eval(t);
    const auto plus = rates.eval(t + h);
    const auto minus = rates.eval(t - h);
    for (int i = 0; i < 7; ++i) {
      const Vec3 fd = (plus[i].rate - minus[i].rate) / (2.0 * h);
      CHECK((fd - now[i].rate_dot).norm() <= 1e-7);
    }
  }
}

TEST_CASE("symmetric pair split") {
  std::vector<FormationCommands::Entry> entries(1);
  entries[0].euler = std::make_shared<EulerAngleCommand>(
      AngleFunction::sine(0.5, 0.8), AngleFunction::constant(0.0),
      AngleFunction::cosine(0.7, 0.3));
  auto commands =
      std::make_shared<FormationCommands>(std::vector<int>{0, 1}, std::move(entries));
  const DesiredRates rates(commands, 3, 0, DesiredRates::Mode::SymmetricPair);
  for (double t : {0.0, 0.9, 3.1}) {
    const auto per_craft = rates.eval(t);
    const RelativeAttitudeCommand rel = commands->edge_command(0, t);
    CHECK((per_craft[0].rate - 0.5 * rel.rate).norm() <= 1e-15);
    const Vec3 residual =
        rel.rate - (per_craft[0].rate - rel.attitude.transpose() * per_craft[1].rate);
    CHECK(residual.norm() <= 1e-14);
    CHECK(per_craft[2].rate.norm() == 0.0);  // reference craft has no command
  }
}

TEST_CASE("rate bound covers sampled peaks with margin") {
  const auto commands = demo_commands();
  const DesiredRates rates(commands, 7, 3, DesiredRates::Mode::Anchor);
  const double bound = rates.rate_bound(30.0);
  CHECK(bound > 0.0);
  Rng rng(3);
  std::uniform_real_distribution<double> dist(0.0, 30.0);
  for (int trial = 0; trial < 200; ++trial) {
    const auto per_craft = rates.eval(dist(rng));
    for (const auto& cmd : per_craft) {
      CHECK(cmd.rate.norm() <= bound);
    }
  }
}

TEST_CASE("split construction rejects bad configurations") {
  const auto commands = demo_commands();
  CHECK_THROWS_AS(DesiredRates(commands, 7, 3, DesiredRates::Mode::SymmetricPair),
                  std::invalid_argument);
  std::vector<FormationCommands::Entry> entries(1);
  auto pair_commands =
      std::make_shared<FormationCommands>(std::vector<int>{0, 1}, std::move(entries));
  CHECK_THROWS_AS(DesiredRates(pair_commands, 3, 2, DesiredRates::Mode::Anchor),
                  std::invalid_argument);
}
