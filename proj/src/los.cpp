#include "losform/los.hpp"

#include <stdexcept>

namespace losform {

void validate_state(const SpacecraftState& state) {
  if (!state.attitude.allFinite() || !state.omega.allFinite() || !state.inertia.allFinite()) {
    throw std::invalid_argument("SpacecraftState: non-finite entries");
  }
  if (!is_rotation(state.attitude)) {
    throw std::invalid_argument("SpacecraftState: attitude is not a rotation matrix");
  }
  if ((state.inertia - state.inertia.transpose()).norm() > 1e-9) {
    throw std::invalid_argument("SpacecraftState: inertia is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(state.inertia);
  if (eig.eigenvalues().minCoeff() <= 0.0) {
    throw std::invalid_argument("SpacecraftState: inertia is not positive definite");
  }
}

LosSet synthesize_los(std::span<const SpacecraftState> states, const FormationSpec& spec) {
  if (states.size() != static_cast<size_t>(spec.node_count())) {
    throw std::invalid_argument("synthesize_los: state count does not match node count");
  }
  LosSet los;
  for (const auto& triple : spec.assignment_set()) {
    const int i = triple.observer, j = triple.target, k = triple.reference;
    for (int target : {j, k}) {
      if (!los.rays.count({i, target})) {
        const Vec3 b = states[i].attitude.transpose() * spec.direction(i, target).vec();
        los.rays.emplace(std::pair{i, target}, UnitVector::normalized(b));
      }
    }
    los.ray_crosses[{i, j, k}] = los.ray(i, j).vec().cross(los.ray(i, k).vec());
  }
  for (const auto& [i, j] : spec.edges()) {
    const int k = spec.reference_of(i, j);
    los.coplanarity_scale[{i, j}] =
        los.ray_cross(i, j, k).norm() * los.ray_cross(j, i, k).norm();
  }
  return los;
}

Mat3 relative_attitude(const SpacecraftState& state_i, const SpacecraftState& state_j) {
  return state_j.attitude.transpose() * state_i.attitude;
}

Vec3 relative_velocity(const SpacecraftState& state_i, const SpacecraftState& state_j) {
  const Mat3 q_ij = relative_attitude(state_i, state_j);
  return state_i.omega - q_ij.transpose() * state_j.omega;
}

Vec3 los_rate(const Vec3& b, const Vec3& omega) { return b.cross(omega); }

RotationMatrix determine_relative_attitude(const UnitVector& b_ij, const UnitVector& b_ik,
                                           const UnitVector& b_ji, const UnitVector& b_jk) {
  const Vec3 cross_i = b_ij.vec().cross(b_ik.vec());
  const Vec3 cross_j = b_ji.vec().cross(b_jk.vec());
  if (cross_i.norm() <= kCollinearityTol || cross_j.norm() <= kCollinearityTol) {
    throw std::invalid_argument(
        "determine_relative_attitude: LOS pair is near collinear");
  }
  const Vec3 ni = cross_i.normalized();
  const Vec3 nj = cross_j.normalized();

  // Orthonormal frames {b_ij, n_i, b_ij x n_i} and the mapped counterpart
  // {-b_ji, -n_j, b_ji x n_j}; both cross terms are orthogonal to their first
  // columns by construction.
  Mat3 frame_i, frame_j;
  frame_i.col(0) = b_ij.vec();
  frame_i.col(1) = ni;
  frame_i.col(2) = b_ij.vec().cross(ni);
  frame_j.col(0) = -b_ji.vec();
  frame_j.col(1) = -nj;
  frame_j.col(2) = b_ji.vec().cross(nj);

  return reorthonormalize(frame_j * frame_i.transpose());
}

EdgeView gather_edge_view(const LosSet& los, int i, int j, int k) {
  return EdgeView{los.ray(i, j).vec(), los.ray(i, k).vec(), los.ray(j, i).vec(),
                  los.ray(j, k).vec()};
}

}  // namespace losform
