#include "losform/error_geometry.hpp"

#include <stdexcept>

namespace losform {

void validate_gains(const EdgeGains& gains) {
  if (!(gains.k_align > 0.0) || !(gains.k_coplanar > 0.0)) {
    throw std::invalid_argument("EdgeGains: gains must be positive");
  }
  if (gains.k_align == gains.k_coplanar) {
    throw std::invalid_argument("EdgeGains: the two gains must be distinct");
  }
}

EdgeView mirrored(const EdgeView& view) {
  return EdgeView{view.partner_to_self, view.partner_to_reference, view.own_to_partner,
                  view.own_to_reference};
}

double alignment_error(const Vec3& b_ji, const Mat3& qd_ij, const Vec3& b_ij) {
  return 1.0 + b_ji.dot(qd_ij * b_ij);
}

double coplanarity_error(const Vec3& b_jik, const Mat3& qd_ij, const Vec3& b_ijk,
                         double scale) {
  if (!(scale > 1e-6)) {
    throw std::invalid_argument("coplanarity_error: degenerate scale (collinear triad)");
  }
  return 1.0 + b_jik.dot(qd_ij * b_ijk) / scale;
}

EdgeErrors edge_errors(const EdgeView& view, const Mat3& qd_ij, const EdgeGains& gains,
                       double scale) {
  if (!(scale > 1e-6)) {
    throw std::invalid_argument("edge_errors: degenerate scale (collinear triad)");
  }
  const Mat3 qd_ji = qd_ij.transpose();
  const Vec3 cross_own = view.own_to_partner.cross(view.own_to_reference);
  const Vec3 cross_partner = view.partner_to_self.cross(view.partner_to_reference);

  EdgeErrors out;
  out.psi_align = alignment_error(view.partner_to_self, qd_ij, view.own_to_partner);
  out.psi_coplanar = coplanarity_error(cross_partner, qd_ij, cross_own, scale);
  out.psi = gains.k_align * out.psi_align + gains.k_coplanar * out.psi_coplanar;
  out.e_align = (qd_ji * view.partner_to_self).cross(view.own_to_partner);
  out.e_coplanar = (qd_ji * cross_partner).cross(cross_own) / scale;
  out.e = gains.k_align * out.e_align + gains.k_coplanar * out.e_coplanar;
  return out;
}

std::pair<Vec3, Vec3> error_vectors(const EdgeView& view, const Mat3& qd_ij,
                                    const EdgeGains& gains, double scale) {
  const Vec3 e_ij = edge_errors(view, qd_ij, gains, scale).e;
  const Vec3 e_ji = edge_errors(mirrored(view), qd_ij.transpose(), gains, scale).e;
  return {e_ij, e_ji};
}

double total_error(const EdgeView& view, const Mat3& qd_ij, const EdgeGains& gains,
                   double scale) {
  return edge_errors(view, qd_ij, gains, scale).psi;
}

Mat3 edge_weight_matrix(const UnitVector& s_ij, const Vec3& s_ijk, const EdgeGains& gains) {
  const double n2 = s_ijk.squaredNorm();
  if (!(n2 > kCollinearityTol * kCollinearityTol)) {
    throw std::invalid_argument("edge_weight_matrix: degenerate plane normal");
  }
  return gains.k_align * s_ij.vec() * s_ij.vec().transpose() +
         (gains.k_coplanar / n2) * s_ijk * s_ijk.transpose();
}

Mat3 weight_eigenframe(const UnitVector& s_ij, const Vec3& s_ijk) {
  const double n = s_ijk.norm();
  if (!(n > kCollinearityTol)) {
    throw std::invalid_argument("weight_eigenframe: degenerate plane normal");
  }
  Mat3 frame;
  frame.col(0) = s_ij.vec();
  frame.col(1) = s_ijk / n;
  frame.col(2) = s_ij.vec().cross(s_ijk / n);
  return frame;
}

const char* to_string(EquilibriumType type) {
  switch (type) {
    case EquilibriumType::Desired: return "desired";
    case EquilibriumType::FlipAxis1: return "flip-axis-1";
    case EquilibriumType::FlipAxis2: return "flip-axis-2";
    case EquilibriumType::FlipAxis3: return "flip-axis-3";
    case EquilibriumType::None: return "none";
  }
  return "none";
}

EquilibriumClass classify_equilibrium(const Mat3& r_i, const Mat3& r_j, const Mat3& qd_ij,
                                      const Mat3& weight, double tol) {
  // Eigenaxes of the weight matrix, descending eigenvalue order.
  Eigen::SelfAdjointEigenSolver<Mat3> eig(weight);
  Mat3 axes;
  axes.col(0) = eig.eigenvectors().col(2);
  axes.col(1) = eig.eigenvectors().col(1);
  axes.col(2) = eig.eigenvectors().col(0);

  const Mat3 configuration = r_i * qd_ij.transpose() * r_j.transpose();

  EquilibriumClass best;
  best.distance = (configuration - Mat3::Identity()).norm();
  best.type = EquilibriumType::Desired;
  const EquilibriumType flips[] = {EquilibriumType::FlipAxis1, EquilibriumType::FlipAxis2,
                                   EquilibriumType::FlipAxis3};
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 d = -Vec3::Ones();
    d(axis) = 1.0;
    const Mat3 candidate = axes * d.asDiagonal() * axes.transpose();
    const double dist = (configuration - candidate).norm();
    if (dist < best.distance) {
      best.distance = dist;
      best.type = flips[axis];
    }
  }
  if (best.distance > tol) best.type = EquilibriumType::None;
  return best;
}

}  // namespace losform
