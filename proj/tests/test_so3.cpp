#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "losform/so3.hpp"
#include "support/test_support.hpp"

using namespace losform;
using losform::testing::Rng;
using losform::testing::polar_projection_oracle;
using losform::testing::random_rotation;
using losform::testing::random_unit_vector;
using losform::testing::random_vec3;
using std::numbers::pi;

namespace {

// Independent Rodrigues evaluation used as the oracle for exp_so3.
Mat3 rodrigues_oracle(const Vec3& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle == 0.0) return Mat3::Identity();
  const Vec3 axis = axis_angle / angle;
  const Mat3 k = hat(axis);
  return Mat3::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
}

}  // namespace

TEST_CASE("hat on basis vectors and zero") {
  Mat3 expected;
  expected << 0, 0, 0,
              0, 0, -1,
              0, 1, 0;
  CHECK((hat(Vec3::UnitX()) - expected).norm() == doctest::Approx(0.0));
  CHECK(hat(Vec3::Zero()).norm() == 0.0);
}

TEST_CASE("hat implements the cross product") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 v = random_vec3(rng, 3.0);
    const Vec3 y = random_vec3(rng, 3.0);
    const Vec3 direct(v.y() * y.z() - v.z() * y.y(),
                      v.z() * y.x() - v.x() * y.z(),
                      v.x() * y.y() - v.y() * y.x());
    CHECK((hat(v) * y - direct).norm() <= 1e-12);
    CHECK((hat(v) + hat(v).transpose()).norm() == 0.0);
  }
}

TEST_CASE("vee inverts hat and rejects non-skew input") {
  CHECK((vee(hat(Vec3(1, 2, 3))) - Vec3(1, 2, 3)).norm() == 0.0);
  CHECK(vee(Mat3::Zero()).norm() == 0.0);
  CHECK_THROWS_AS(vee(Mat3::Identity()), std::invalid_argument);

  // hat composed with vee is the identity on skew matrices.
  Rng skew_rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Mat3 s = hat(random_vec3(skew_rng, 4.0));
    CHECK((hat(vee(s)) - s).norm() == 0.0);
  }

  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Mat3 m;
    for (int r = 0; r < 3; ++r) m.row(r) = random_vec3(rng, 2.0).transpose();
    const Vec3 w = vee(skew_part(m));
    // Trace identity: x . vee of the skew doubled equals -tr(hat(x) m).
    for (int axis = 0; axis < 3; ++axis) {
      const Vec3 e = Vec3::Unit(axis);
      CHECK(w(axis) == doctest::Approx(-0.5 * (hat(e) * m).trace()).epsilon(1e-12));
    }
  }
}

TEST_CASE("hat map identities hold for random triples") {
  Rng rng(99);
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec3 x = random_vec3(rng), y = random_vec3(rng), z = random_vec3(rng);
    const Mat3 r = random_rotation(rng);
    Mat3 m;
    for (int row = 0; row < 3; ++row) m.row(row) = random_vec3(rng).transpose();

    CHECK((hat(x.cross(y)) - (hat(x) * hat(y) - hat(y) * hat(x))).norm() <= 1e-12);
    CHECK((hat(x.cross(y)) - (y * x.transpose() - x * y.transpose())).norm() <= 1e-12);

    const double lhs6 = (hat(x) * m).trace();
    CHECK(lhs6 == doctest::Approx(0.5 * (hat(x) * (m - m.transpose())).trace()).epsilon(1e-12));
    CHECK(lhs6 == doctest::Approx(-x.dot(2.0 * vee(skew_part(m)))).epsilon(1e-12));

    CHECK((r * hat(x) * r.transpose() - hat(r * x)).norm() <= 1e-12);

    const double triple = x.dot(hat(y) * z);
    CHECK(triple == doctest::Approx(y.dot(hat(z) * x)).epsilon(1e-12));
    CHECK(triple == doctest::Approx(z.dot(hat(x) * y)).epsilon(1e-12));

    CHECK((hat(x) * hat(y) * z - (x.dot(z) * y - x.dot(y) * z)).norm() <= 1e-12);
    CHECK((hat(x) * (hat(y) * z) - hat(z) * (hat(y) * x) - hat(y) * (hat(x) * z)).norm() <=
          1e-12);
  }
}

TEST_CASE("exp_so3 basic values") {
  CHECK((exp_so3(Vec3::Zero()).matrix() - Mat3::Identity()).norm() == 0.0);

  const Mat3 quarter = exp_so3(Vec3(0, 0, pi / 2)).matrix();
  CHECK((quarter * Vec3::UnitX() - Vec3::UnitY()).norm() <= 1e-15);
}

TEST_CASE("exp_so3 matches the Rodrigues oracle and group structure") {
  Rng rng(31);
  {
    // The near-half-turn initial attitude used by the demonstration case.
    const Vec3 v = 0.999 * pi * Vec3::UnitX();
    CHECK((exp_so3(v).matrix() - rodrigues_oracle(v)).norm() <= 1e-14);
    CHECK((exp_so3(v).matrix() * exp_so3(-v).matrix() - Mat3::Identity()).norm() <= 1e-14);
  }
  for (int trial = 0; trial < 200; ++trial) {
    const Vec3 v = random_vec3(rng, 3.0);
    const Mat3 r = exp_so3(v).matrix();
    CHECK((r - rodrigues_oracle(v)).norm() <= 1e-13);
    CHECK(is_rotation(r));
    CHECK((r * exp_so3(-v).matrix() - Mat3::Identity()).norm() <= 1e-13);
  }
  {
    const Vec3 axis = random_unit_vector(rng);
    const double angle = 1.2345;
    CHECK((exp_so3(angle * axis).matrix() - exp_so3((angle + 2.0 * pi) * axis).matrix()).norm() <=
          1e-12);
  }
}

TEST_CASE("exp_so3 small-angle series") {
  Rng rng(77);
  for (double scale : {1e-7, 1e-9, 1e-12}) {
    const Vec3 v = scale * random_unit_vector(rng);
    const Mat3 r = exp_so3(v).matrix();
    CHECK(is_rotation(r, 1e-12));
    CHECK((r - (Mat3::Identity() + hat(v))).norm() <= 2.0 * scale * scale + 1e-15);
  }
}

TEST_CASE("euler321 composition") {
  CHECK((euler321_to_rotation(0, 0, 0).matrix() - Mat3::Identity()).norm() == 0.0);

  const Mat3 yaw90 = euler321_to_rotation(pi / 2, 0, 0).matrix();
  CHECK((yaw90 * Vec3::UnitX() - Vec3::UnitY()).norm() <= 1e-15);

  // Command value at t = 0 for the demonstration trajectory with angles
  // (sin 0, 0.1, cos 0): compose the elementary factors independently.
  const double yaw = 0.0, pitch = 0.1, roll = 1.0;
  Mat3 rz, ry, rx;
  rz << std::cos(yaw), -std::sin(yaw), 0, std::sin(yaw), std::cos(yaw), 0, 0, 0, 1;
  ry << std::cos(pitch), 0, std::sin(pitch), 0, 1, 0, -std::sin(pitch), 0, std::cos(pitch);
  rx << 1, 0, 0, 0, std::cos(roll), -std::sin(roll), 0, std::sin(roll), std::cos(roll);
  CHECK((euler321_to_rotation(yaw, pitch, roll).matrix() - rz * ry * rx).norm() <= 1e-15);

  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec3 angles = random_vec3(rng, 3.0);
    CHECK(is_rotation(euler321_to_rotation(angles.x(), angles.y(), angles.z()).matrix()));
  }
}

TEST_CASE("reorthonormalize is the polar projection") {
  Rng rng(13);

  // Fixed point on exact rotations.
  const Mat3 r = random_rotation(rng);
  CHECK((reorthonormalize(r).matrix() - r).norm() <= 1e-12);

  // Small skew perturbation of the identity: the projection is a rotation by
  // about 1e-6 rad, so every entry stays within 1e-6 of the identity.
  const Mat3 near_identity = Mat3::Identity() + 1e-6 * hat(Vec3::UnitZ());
  const Mat3 projected = reorthonormalize(near_identity).matrix();
  CHECK((projected - Mat3::Identity()).cwiseAbs().maxCoeff() <= 1e-6);
  CHECK((projected - polar_projection_oracle(near_identity)).norm() <= 1e-14);

  for (int trial = 0; trial < 100; ++trial) {
    const Mat3 base = random_rotation(rng);
    Mat3 noise;
    for (int row = 0; row < 3; ++row) noise.row(row) = random_vec3(rng).transpose();
    noise *= 1e-5 / noise.norm();
    // The projection is the nearest rotation, so it can move at most twice
    // the perturbation away from the original.
    const Mat3 fixed = reorthonormalize(base + noise).matrix();
    CHECK((fixed - base).norm() <= 2e-5);
    CHECK((fixed - polar_projection_oracle(base + noise)).norm() <= 1e-13);
    CHECK(rotation_drift(fixed) <= 1e-12);
  }
}

TEST_CASE("reorthonormalize rejects reflections and large drift") {
  Mat3 reflection = Mat3::Identity();
  reflection(2, 2) = -1.0;
  CHECK_THROWS_AS(reorthonormalize(reflection), std::invalid_argument);
  CHECK_THROWS_AS(reorthonormalize(2.0 * Mat3::Identity()), std::invalid_argument);
}

TEST_CASE("strong type constructors validate") {
  CHECK_THROWS_AS(RotationMatrix::from_matrix(2.0 * Mat3::Identity()), std::invalid_argument);
  CHECK_THROWS_AS(UnitVector::from_vec(Vec3(1, 1, 0)), std::invalid_argument);
  CHECK_THROWS_AS(UnitVector::normalized(Vec3::Zero()), std::invalid_argument);
  CHECK(UnitVector::normalized(Vec3(3, 0, 0)).vec() == Vec3(1, 0, 0));

  Rng rng(3);
  const Mat3 r = random_rotation(rng);
  CHECK((RotationMatrix::from_matrix(r).transposed().matrix() - r.transpose()).norm() == 0.0);
}
