/**
 * @file control.hpp
 * @brief Per-craft control moments for a chain formation, and the
 *        orchestrator that evaluates the whole closed loop at one instant.
 *
 * Chain endpoints apply the single-edge law; interior crafts average the
 * error vectors of their two edges. Every craft uses only its own
 * measurements, the two LOS labels communicated by each partner, its own
 * angular velocity, and the desired signals.
 */
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "losform/error_geometry.hpp"
#include "losform/formation.hpp"
#include "losform/los.hpp"
#include "losform/trajectory.hpp"

namespace losform {

struct ControlGains {
  std::vector<EdgeGains> edge;  // per chain edge, index m for (chain[m], chain[m+1])
  std::vector<double> k_rate;   // per craft angular-velocity feedback gain
};

void validate_control_gains(const ControlGains& gains, int edge_count, int node_count);

/// Moment law shared by every craft:
///   u = -error_sum - k_rate * rate_error
///       + hat(rate_cmd) * J * (rate_error + rate_cmd) + J * rate_cmd_dot
/// where error_sum is the craft's configuration error term (single edge for
/// endpoints, half the sum of both edges for interior crafts).
Vec3 control_moment(const Vec3& error_sum, double k_rate, const Vec3& rate_error,
                    const Mat3& inertia, const CraftRateCommand& desired);

/// Everything the simulation and telemetry need from one control evaluation.
struct ControlSnapshot {
  std::vector<Vec3> moment;            // per craft; zero for non-chain crafts
  std::vector<Vec3> rate_error;        // per craft; zero for non-chain crafts
  std::vector<EdgeErrors> forward;     // per chain edge: errors of (chain[m], chain[m+1])
  std::vector<Vec3> backward_e;        // per chain edge: e of the reverse direction
  std::vector<Mat3> commanded;         // per chain edge: Qd forward
};

/// Binds a formation, its commands, desired-rate split, and gains; evaluates
/// control moments for all crafts from a consistent state snapshot.
class FormationController {
 public:
  FormationController(std::shared_ptr<const FormationSpec> spec,
                      std::shared_ptr<const FormationCommands> commands,
                      std::shared_ptr<const DesiredRates> rates, ControlGains gains);

  ControlSnapshot evaluate(double t, std::span<const SpacecraftState> states) const;

  const FormationSpec& spec() const { return *spec_; }
  const FormationCommands& commands() const { return *commands_; }
  const DesiredRates& rates() const { return *rates_; }
  const ControlGains& gains() const { return *gains_; }

  /// Cached coplanarity scales per chain edge, fixed at construction from the
  /// spec geometry.
  const std::vector<double>& edge_scales() const { return edge_scales_; }

  /// Live coplanarity scale for chain edge m from the given states; compared
  /// against the cache by the simulation's per-record audit.
  double live_scale(int m, std::span<const SpacecraftState> states) const;

 private:
  std::shared_ptr<const FormationSpec> spec_;
  std::shared_ptr<const FormationCommands> commands_;
  std::shared_ptr<const DesiredRates> rates_;
  std::shared_ptr<const ControlGains> gains_;
  std::vector<double> edge_scales_;
  std::vector<int> edge_reference_;      // per chain edge: assigned reference craft
  std::vector<Vec3> s_forward_;          // s_ij per chain edge (i = chain[m])
  std::vector<Vec3> s_forward_ref_;      // s_ik per chain edge
  std::vector<Vec3> s_backward_;         // s_ji per chain edge
  std::vector<Vec3> s_backward_ref_;     // s_jk per chain edge
};

}  // namespace losform
