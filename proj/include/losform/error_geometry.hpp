/**
 * @file error_geometry.hpp
 * @brief Configuration error functions and error vectors for one controlled
 *        edge, built from the four LOS observations the edge shares, plus the
 *        per-edge weight matrix and equilibrium classification.
 *
 * For a directed edge (i, j) with reference craft k, two scalar error
 * functions measure how far the relative attitude is from its command:
 *   - alignment: the LOS toward the partner must be antiparallel to the
 *     partner's LOS back, once mapped through the commanded attitude;
 *   - coplanarity: the plane spanned with the reference LOS must match.
 * Their gradient vectors combine into the configuration error vector e_ij
 * that drives the controller.
 */
#pragma once

#include <algorithm>
#include <utility>

#include "losform/so3.hpp"

namespace losform {

struct EdgeGains {
  double k_align = 0.0;     // weight on the antiparallel-LOS term
  double k_coplanar = 0.0;  // weight on the coplanarity term

  double sum() const { return k_align + k_coplanar; }
  double min_gain() const { return std::min(k_align, k_coplanar); }
};

/// Throws std::invalid_argument unless both gains are positive and distinct.
void validate_gains(const EdgeGains& gains);

/// Everything craft i may legally use to control edge (i, j) with reference
/// k: its own two measurements and the two communicated from j.
struct EdgeView {
  Vec3 own_to_partner;        // b_ij, measured by i
  Vec3 own_to_reference;      // b_ik, measured by i
  Vec3 partner_to_self;       // b_ji, communicated by j
  Vec3 partner_to_reference;  // b_jk, communicated by j
};

/// The same four observations seen from the partner's side.
EdgeView mirrored(const EdgeView& view);

struct EdgeErrors {
  double psi_align = 0.0;     // in [0, 2]
  double psi_coplanar = 0.0;  // in [0, 2]
  double psi = 0.0;           // gain-weighted sum
  Vec3 e_align = Vec3::Zero();
  Vec3 e_coplanar = Vec3::Zero();
  Vec3 e = Vec3::Zero();      // e_ij = k_align * e_align + k_coplanar * e_coplanar
};

/// 1 + b_ji . (Qd_ij b_ij); zero iff b_ji = -Qd_ij b_ij.
double alignment_error(const Vec3& b_ji, const Mat3& qd_ij, const Vec3& b_ij);

/// 1 + (b_jik . Qd_ij b_ijk) / scale, with scale = ||b_jik|| ||b_ijk||.
/// Throws std::invalid_argument if scale <= 1e-6 (degenerate triad).
double coplanarity_error(const Vec3& b_jik, const Mat3& qd_ij, const Vec3& b_ijk, double scale);

/// Full error set for directed edge (i, j). qd_ij is the commanded relative
/// attitude for that direction; scale is the cached coplanarity scale.
EdgeErrors edge_errors(const EdgeView& view, const Mat3& qd_ij, const EdgeGains& gains,
                       double scale);

/// (e_ij, e_ji) for one edge; each side computed from its own view.
std::pair<Vec3, Vec3> error_vectors(const EdgeView& view, const Mat3& qd_ij,
                                    const EdgeGains& gains, double scale);

/// Gain-weighted total error function Psi_ij (symmetric in edge direction).
double total_error(const EdgeView& view, const Mat3& qd_ij, const EdgeGains& gains,
                   double scale);

/// K = k_align s_ij s_ij^T + k_coplanar s_ijk s_ijk^T / ||s_ijk||^2.
/// Symmetric PSD of rank 2 with eigenvalues {k_align, k_coplanar, 0}.
Mat3 edge_weight_matrix(const UnitVector& s_ij, const Vec3& s_ijk, const EdgeGains& gains);

/// Orthonormal eigenframe of the weight matrix: columns are s_ij, the
/// normalized s_ijk, and their cross product.
Mat3 weight_eigenframe(const UnitVector& s_ij, const Vec3& s_ijk);

/// Closed-loop equilibria: the commanded configuration plus three isolated
/// configurations obtained by a half-turn about each eigenaxis of the weight
/// matrix. Flip labels follow the eigenaxes sorted by descending eigenvalue.
enum class EquilibriumType { Desired, FlipAxis1, FlipAxis2, FlipAxis3, None };

struct EquilibriumClass {
  EquilibriumType type = EquilibriumType::None;
  double distance = 0.0;  // Frobenius distance to the nearest candidate
};

const char* to_string(EquilibriumType type);

/// Compares R_i Qd_ji R_j^T against the four critical configurations of the
/// error function; returns the nearest class if within tol, else None with
/// the smallest distance. Diagnostic only.
EquilibriumClass classify_equilibrium(const Mat3& r_i, const Mat3& r_j, const Mat3& qd_ij,
                                      const Mat3& weight, double tol = 1e-6);

}  // namespace losform
