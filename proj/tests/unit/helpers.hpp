// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include "walkin/calibration.hpp"
#include "walkin/fingers.hpp"
#include "walkin/math3d.hpp"
#include "walkin/skeleton.hpp"
#include "walkin/synthetic.hpp"

namespace walkin::test {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(WALKIN_DATA_DIR) / name;
}

inline const SkeletonModel& reference_skeleton() {
  static const SkeletonModel s = load_skeleton_file(data_path("reference_humanoid.json"));
  return s;
}

inline const SkeletonModel& long_legs_skeleton() {
  static const SkeletonModel s = load_skeleton_file(data_path("long_legs_humanoid.json"));
  return s;
}

inline MountOffsets reference_mounts() {
  return default_mounts(reference_left_hand().palm_anchor, reference_right_hand().palm_anchor);
}

inline CalibrationOptions reference_calibration() {
  CalibrationOptions c;
  c.capture.palm_left = reference_left_hand().palm_anchor;
  c.capture.palm_right = reference_right_hand().palm_anchor;
  return c;
}

constexpr double kDeg = 3.14159265358979323846 / 180.0;

// Row-major 3x3 rotation matrix from Rodrigues' formula; an oracle that
// shares no code with UnitQuat.
using Mat3 = std::array<std::array<double, 3>, 3>;

inline Mat3 rodrigues(Vec3 axis, double angle) {
  const double n = std::sqrt(axis.x * axis.x + axis.y * axis.y + axis.z * axis.z);
  const double x = axis.x / n, y = axis.y / n, z = axis.z / n;
  const double c = std::cos(angle), s = std::sin(angle), t = 1.0 - c;
  return {{{t * x * x + c, t * x * y - s * z, t * x * z + s * y},
           {t * x * y + s * z, t * y * y + c, t * y * z - s * x},
           {t * x * z - s * y, t * y * z + s * x, t * z * z + c}}};
}

inline Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) r[i][j] += a[i][k] * b[k][j];
  return r;
}

inline Mat3 transpose(const Mat3& a) {
  Mat3 r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[j][i];
  return r;
}

inline Vec3 mat_apply(const Mat3& m, const Vec3& v) {
  return {m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z, m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
          m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z};
}

// Matrix of a quaternion via its action on the basis vectors.
inline Mat3 matrix_of(const UnitQuat& q) {
  const Vec3 c0 = q.rotate(Vec3::unit_x()), c1 = q.rotate(Vec3::unit_y()), c2 = q.rotate(Vec3::unit_z());
  return {{{c0.x, c1.x, c2.x}, {c0.y, c1.y, c2.y}, {c0.z, c1.z, c2.z}}};
}

inline double max_abs_diff(const Mat3& a, const Mat3& b) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

inline Vec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vec3 v{g(rng), g(rng), g(rng)};
  while (v.norm() < 1e-6) v = {g(rng), g(rng), g(rng)};
  return v / v.norm();
}

inline UnitQuat random_rotation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 3.14159265358979323846);
  return UnitQuat::from_axis_angle(random_unit(rng), u(rng));
}

inline RigidTransform random_rigid(std::mt19937_64& rng, double spread = 2.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  return {random_rotation(rng), {u(rng), u(rng), u(rng)}};
}

}  // namespace walkin::test
