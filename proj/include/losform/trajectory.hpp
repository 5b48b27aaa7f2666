/**
 * @file trajectory.hpp
 * @brief Commanded relative-attitude trajectories per controlled edge and the
 *        split into per-craft desired angular velocities.
 *
 * Commands are built from a small catalog of closed-form angle functions so
 * that the desired angular velocity and acceleration are analytic, never
 * numerically differentiated.
 */
#pragma once

#include <memory>
#include <vector>

#include "losform/formation.hpp"
#include "losform/so3.hpp"

namespace losform {

/// f(t) = value (constant), offset + amplitude*sin(frequency*t), or
/// offset + amplitude*cos(frequency*t); with analytic first and second
/// derivatives.
class AngleFunction {
 public:
  enum class Kind { Constant, Sin, Cos };

  static AngleFunction constant(double value);
  static AngleFunction sine(double amplitude, double frequency, double offset = 0.0);
  static AngleFunction cosine(double amplitude, double frequency, double offset = 0.0);

  double value(double t) const;
  double rate(double t) const;
  double accel(double t) const;

  Kind kind() const { return kind_; }
  double amplitude() const { return amplitude_; }
  double frequency() const { return frequency_; }
  double offset() const { return offset_; }

  /// Largest |value| the function can reach (offset +/- amplitude).
  double max_abs_value() const;

 private:
  AngleFunction(Kind kind, double amplitude, double frequency, double offset)
      : kind_(kind), amplitude_(amplitude), frequency_(frequency), offset_(offset) {}
  Kind kind_;
  double amplitude_;
  double frequency_;
  double offset_;
};

/// Sample of a commanded relative attitude for a directed edge (i, j):
/// attitude Qd_ij, body-frame rate Wd_ij with d/dt Qd = Qd * hat(Wd), and the
/// rate's time derivative.
struct RelativeAttitudeCommand {
  Mat3 attitude = Mat3::Identity();
  Vec3 rate = Vec3::Zero();
  Vec3 rate_dot = Vec3::Zero();
};

/// The same command seen from the other side of the edge:
/// Qd_ji = Qd_ij^T, Wd_ji = -Qd_ij Wd_ij, and likewise for the derivative.
RelativeAttitudeCommand reversed(const RelativeAttitudeCommand& cmd);

/// Commanded relative attitude from 3-2-1 Euler angle functions:
/// Qd(t) = Rz(yaw(t)) * Ry(pitch(t)) * Rx(roll(t)). Rates are obtained from
/// the analytic derivative of the composition, so there is no kinematic
/// singularity; pitch ranges near +-pi/2 are only flagged by validation.
class EulerAngleCommand {
 public:
  EulerAngleCommand(AngleFunction yaw, AngleFunction pitch, AngleFunction roll);
  RelativeAttitudeCommand eval(double t) const;

  const AngleFunction& yaw() const { return yaw_; }
  const AngleFunction& pitch() const { return pitch_; }
  const AngleFunction& roll() const { return roll_; }

 private:
  AngleFunction yaw_, pitch_, roll_;
};

/// Resolved command set for every chain edge of a formation. Edge m connects
/// chain()[m] to chain()[m+1]; commands for the reverse direction come from
/// reversed().
class FormationCommands {
 public:
  struct Entry {
    std::shared_ptr<const EulerAngleCommand> euler;  // null => identity or alias
    int alias_of = -1;       // edge index this edge's command is derived from
    // For curve entries: whether the curves describe (chain[m], chain[m+1]).
    // For alias entries: whether the referenced edge's forward command is
    // taken as-is (false flips it, the transpose case).
    bool forward = true;
  };

  FormationCommands(std::vector<int> chain, std::vector<Entry> entries);

  int edge_count() const { return static_cast<int>(entries_.size()); }
  const std::vector<int>& chain() const { return chain_; }

  /// Command for edge m in the forward chain direction.
  RelativeAttitudeCommand edge_command(int m, double t) const;

  /// Command for an arbitrary directed chain edge (i, j).
  RelativeAttitudeCommand directed_command(int i, int j, double t) const;

 private:
  std::vector<int> chain_;
  std::vector<Entry> entries_;
  std::vector<int> edge_index_of_node_;  // chain position by node id
};

struct CraftRateCommand {
  Vec3 rate = Vec3::Zero();      // desired body angular velocity
  Vec3 rate_dot = Vec3::Zero();  // its time derivative
};

/// Splits edge-level relative rate commands into per-craft absolute desired
/// rates. Two modes:
///  - Anchor: the anchor node holds zero desired rate and the recursion
///    Wd_i = Wd_ij + Qd_ji Wd_j walks outward along the chain;
///  - SymmetricPair: for a single edge, both ends take half of the relative
///    command.
class DesiredRates {
 public:
  enum class Mode { Anchor, SymmetricPair };

  DesiredRates(std::shared_ptr<const FormationCommands> commands, int node_count, int anchor,
               Mode mode);

  /// Per-node commands at time t; nodes outside the chain get zeros.
  std::vector<CraftRateCommand> eval(double t) const;

  /// Measured bound on max_i ||Wd_i(t)|| over [0, horizon], sampled, with a
  /// 10% margin.
  double rate_bound(double horizon, int samples = 2048) const;

  int anchor() const { return anchor_; }
  Mode mode() const { return mode_; }

 private:
  std::shared_ptr<const FormationCommands> commands_;
  int node_count_;
  int anchor_;      // node id for Anchor mode
  Mode mode_;
};

}  // namespace losform
