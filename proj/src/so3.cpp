#include "losform/so3.hpp"

#include <cmath>
#include <stdexcept>

namespace losform {

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
      -v.y(), v.x(), 0.0;
  return m;
}

Mat3 skew_part(const Mat3& m) { return 0.5 * (m - m.transpose()); }

Vec3 vee(const Mat3& m) {
  const double residual = (m + m.transpose()).norm();
  if (residual > kSkewResidualTol) {
    throw std::invalid_argument("vee: matrix is not skew-symmetric (residual " +
                                std::to_string(residual) + ")");
  }
  const Mat3 s = skew_part(m);
  return Vec3(s(2, 1), s(0, 2), s(1, 0));
}

double rotation_drift(const Mat3& m) {
  return (m.transpose() * m - Mat3::Identity()).norm();
}

bool is_rotation(const Mat3& m, double tol) {
  return rotation_drift(m) <= tol && std::abs(m.determinant() - 1.0) <= tol;
}

RotationMatrix RotationMatrix::from_matrix(const Mat3& m) {
  if (!m.allFinite()) {
    throw std::invalid_argument("RotationMatrix: non-finite entries");
  }
  if (rotation_drift(m) > kRotationDriftTol) {
    throw std::invalid_argument("RotationMatrix: orthonormality drift above tolerance");
  }
  if (std::abs(m.determinant() - 1.0) > kRotationDriftTol) {
    throw std::invalid_argument("RotationMatrix: determinant not +1");
  }
  return RotationMatrix(m, Unchecked{});
}

RotationMatrix RotationMatrix::project(const Mat3& m) { return reorthonormalize(m); }

UnitVector UnitVector::from_vec(const Vec3& v) {
  if (std::abs(v.norm() - 1.0) > kUnitNormTol) {
    throw std::invalid_argument("UnitVector: norm deviates from 1");
  }
  return UnitVector(v);
}

UnitVector UnitVector::normalized(const Vec3& v) {
  const double n = v.norm();
  if (n < 1e-12 || !std::isfinite(n)) {
    throw std::invalid_argument("UnitVector: cannot normalize near-zero vector");
  }
  return UnitVector(v / n);
}

RotationMatrix exp_so3(const Vec3& v) {
  const double angle = v.norm();
  const Mat3 vh = hat(v);
  double a, b;  // R = I + a*hat(v) + b*hat(v)^2
  if (angle < 1e-6) {
    const double t2 = angle * angle;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
  } else {
    a = std::sin(angle) / angle;
    b = (1.0 - std::cos(angle)) / (angle * angle);
  }
  Mat3 r = Mat3::Identity() + a * vh + b * vh * vh;
  return RotationMatrix(r, RotationMatrix::Unchecked{});
}

Mat3 rot_x(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return m;
}

Mat3 rot_y(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << c, 0, s,
       0, 1, 0,
      -s, 0, c;
  return m;
}

Mat3 rot_z(double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3 m;
  m << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return m;
}

RotationMatrix euler321_to_rotation(double yaw, double pitch, double roll) {
  Mat3 r = rot_z(yaw) * rot_y(pitch) * rot_x(roll);
  return RotationMatrix(r, RotationMatrix::Unchecked{});
}

RotationMatrix reorthonormalize(const Mat3& m) {
  if (!m.allFinite()) {
    throw std::invalid_argument("reorthonormalize: non-finite entries");
  }
  const double drift = rotation_drift(m);
  if (drift > kProjectionDriftLimit) {
    throw std::invalid_argument("reorthonormalize: drift " + std::to_string(drift) +
                                " exceeds limit");
  }
  if (m.determinant() <= 0.0) {
    throw std::invalid_argument("reorthonormalize: non-positive determinant");
  }
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 uv = svd.matrixU() * svd.matrixV().transpose();
  // det(U V^T) is +1 here since det(m) > 0, but guard against roundoff flips.
  if (uv.determinant() < 0.0) {
    Mat3 u = svd.matrixU();
    u.col(2) *= -1.0;
    uv = u * svd.matrixV().transpose();
  }
  return RotationMatrix(uv, RotationMatrix::Unchecked{});
}

}  // namespace losform
