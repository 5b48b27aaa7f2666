/**
 * @file los.hpp
 * @brief Line-of-sight synthesis from true states, relative attitude and
 *        velocity kinematics, and relative attitude determination from four
 *        LOS observations.
 */
#pragma once

#include <array>
#include <map>
#include <span>
#include <utility>

#include "losform/error_geometry.hpp"
#include "losform/formation.hpp"
#include "losform/so3.hpp"

namespace losform {

struct SpacecraftState {
  Mat3 attitude = Mat3::Identity();  // body -> inertial; rotation to kRotationDriftTol
  Vec3 omega = Vec3::Zero();         // body frame, rad/s
  Mat3 inertia = Mat3::Identity();   // kg m^2, symmetric positive definite
};

/// Throws std::invalid_argument on non-finite entries, attitude drift, or a
/// non-SPD inertia matrix.
void validate_state(const SpacecraftState& state);

/// LOS observations for every measurement-set entry, plus the derived cross
/// products and coplanarity scales for the assigned triples.
struct LosSet {
  /// b_ij: direction toward j in i's body frame, keyed by (i, j).
  std::map<std::pair<int, int>, UnitVector> rays;
  /// b_ij x b_ik keyed by (i, j, k) for assigned triples.
  std::map<std::array<int, 3>, Vec3> ray_crosses;
  /// ||b_ji x b_jk|| * ||b_ij x b_ik|| per canonical edge (min, max); constant
  /// in time for fixed positions.
  std::map<std::pair<int, int>, double> coplanarity_scale;

  const UnitVector& ray(int i, int j) const { return rays.at({i, j}); }
  const Vec3& ray_cross(int i, int j, int k) const { return ray_crosses.at({i, j, k}); }
  double scale(int i, int j) const {
    return coplanarity_scale.at({std::min(i, j), std::max(i, j)});
  }
};

/// b_ij = R_i^T s_ij for every entry demanded by the measurement sets.
/// Throws on coincident positions (via FormationSpec::direction).
LosSet synthesize_los(std::span<const SpacecraftState> states, const FormationSpec& spec);

/// Q_ij = R_j^T R_i
Mat3 relative_attitude(const SpacecraftState& state_i, const SpacecraftState& state_j);

/// Omega_ij = Omega_i - Q_ij^T Omega_j
Vec3 relative_velocity(const SpacecraftState& state_i, const SpacecraftState& state_j);

/// d/dt b = b x omega for a LOS observed from a body rotating at omega.
Vec3 los_rate(const Vec3& b, const Vec3& omega);

/// Recovers the relative attitude Q_ij from the four LOS observations shared
/// across an edge: Q_ij b_ij = -b_ji and Q_ij (b_ij x b_ik) ~ -(b_ji x b_jk).
/// Deterministic triad construction; throws std::invalid_argument when either
/// cross product is below kCollinearityTol.
RotationMatrix determine_relative_attitude(const UnitVector& b_ij, const UnitVector& b_ik,
                                           const UnitVector& b_ji, const UnitVector& b_jk);

/// The four observations edge (i, j) with reference k shares, gathered from a
/// synthesized set.
EdgeView gather_edge_view(const LosSet& los, int i, int j, int k);

}  // namespace losform
