/**
 * @file so3.hpp
 * @brief Small fixed-size algebra for rotation matrices and their Lie algebra:
 *        hat/vee maps, exponential map, Euler-angle construction, and
 *        orthonormality maintenance.
 */
#pragma once

#include <Eigen/Dense>

namespace losform {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Tolerances shared by the geometry layer.
inline constexpr double kRotationDriftTol = 1e-9;      // ||R^T R - I||_F for a valid rotation
inline constexpr double kUnitNormTol = 1e-12;          // | ||v|| - 1 | for a unit vector
inline constexpr double kSkewResidualTol = 1e-9;       // ||M + M^T||_F accepted by vee()
inline constexpr double kProjectionDriftLimit = 1e-3;  // max drift reorthonormalize() accepts
inline constexpr double kCollinearityTol = 1e-6;       // min cross-product norm for a usable triad

/// Skew-symmetric matrix of v, so that hat(v) * y == v.cross(y).
Mat3 hat(const Vec3& v);

/// Inverse of hat, evaluated on the skew part (M - M^T)/2.
/// Throws std::invalid_argument if ||M + M^T||_F exceeds kSkewResidualTol.
Vec3 vee(const Mat3& m);

/// (M - M^T)/2
Mat3 skew_part(const Mat3& m);

/// ||M^T M - I||_F
double rotation_drift(const Mat3& m);

bool is_rotation(const Mat3& m, double tol = kRotationDriftTol);

/// Rotation matrix wrapper. Construction is validated (or projected), so a
/// value of this type always satisfies rotation_drift(m) <= kRotationDriftTol
/// and det(m) == 1 within the same tolerance.
class RotationMatrix {
 public:
  RotationMatrix() : m_(Mat3::Identity()) {}

  /// Validating constructor; throws std::invalid_argument on drift or
  /// determinant violations.
  static RotationMatrix from_matrix(const Mat3& m);

  /// Nearest special-orthogonal matrix (polar projection). See
  /// reorthonormalize() for preconditions.
  static RotationMatrix project(const Mat3& m);

  static RotationMatrix identity() { return RotationMatrix{}; }

  const Mat3& matrix() const { return m_; }
  RotationMatrix transposed() const { return RotationMatrix(m_.transpose(), Unchecked{}); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }
  RotationMatrix operator*(const RotationMatrix& o) const {
    return RotationMatrix(m_ * o.m_, Unchecked{});
  }
  double drift() const { return rotation_drift(m_); }

 private:
  struct Unchecked {};
  RotationMatrix(const Mat3& m, Unchecked) : m_(m) {}
  Mat3 m_;

  friend RotationMatrix exp_so3(const Vec3&);
  friend RotationMatrix euler321_to_rotation(double, double, double);
  friend RotationMatrix reorthonormalize(const Mat3&);
};

/// Unit-norm vector wrapper; | ||v|| - 1 | <= kUnitNormTol by construction.
class UnitVector {
 public:
  /// Validating constructor; throws std::invalid_argument if off unit norm.
  static UnitVector from_vec(const Vec3& v);

  /// Normalizes v; throws std::invalid_argument for near-zero input.
  static UnitVector normalized(const Vec3& v);

  const Vec3& vec() const { return v_; }

 private:
  explicit UnitVector(const Vec3& v) : v_(v) {}
  Vec3 v_;
};

/// Exponential map via the Rodrigues formula. Switches to a 2nd-order series
/// for ||v|| < 1e-6 where the closed-form coefficients lose accuracy.
RotationMatrix exp_so3(const Vec3& v);

/// Elementary right-handed rotations about the coordinate axes.
Mat3 rot_x(double angle);
Mat3 rot_y(double angle);
Mat3 rot_z(double angle);

/// 3-2-1 (yaw-pitch-roll) Euler angles: R = Rz(yaw) * Ry(pitch) * Rx(roll).
RotationMatrix euler321_to_rotation(double yaw, double pitch, double roll);

/// Nearest special-orthogonal matrix in the Frobenius sense (polar
/// projection via SVD). Throws std::invalid_argument if det(m) <= 0 or
/// rotation_drift(m) > kProjectionDriftLimit.
RotationMatrix reorthonormalize(const Mat3& m);

}  // namespace losform
