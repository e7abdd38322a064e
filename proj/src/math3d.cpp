// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include "walkin/math3d.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numbers>

#include "walkin/error.hpp"

namespace walkin {

Vec3 Vec3::normalized() const {
  const double n = norm();
  if (!(n > kDegenerateNorm)) {
    throw GeometryError("cannot normalize a degenerate vector");
  }
  return *this / n;
}

UnitQuat UnitQuat::from_axis_angle(const Vec3& axis, double angle) {
  const Vec3 a = axis.normalized();
  const double h = 0.5 * angle;
  const double s = std::sin(h);
  return {std::cos(h), a.x * s, a.y * s, a.z * s};
}

UnitQuat UnitQuat::normalized() const {
  const double n = norm();
  if (!(n > 0.0)) {
    throw GeometryError("cannot normalize a zero quaternion");
  }
  return {w / n, x / n, y / n, z / n};
}

UnitQuat UnitQuat::canonical() const {
  for (double c : {w, x, y, z}) {
    if (c > 0.0) return *this;
    if (c < 0.0) return {-w, -x, -y, -z};
  }
  return *this;
}

double UnitQuat::angle() const {
  const double vn = std::sqrt(x * x + y * y + z * z);
  return 2.0 * std::atan2(vn, std::abs(w));
}

double angular_distance(const UnitQuat& a, const UnitQuat& b) { return (a.inverse() * b).angle(); }

UnitQuat slerp(const UnitQuat& a, const UnitQuat& b_in, double t) {
  UnitQuat b = b_in;
  double cos_theta = a.dot(b);
  if (cos_theta < 0.0) {
    b = {-b.w, -b.x, -b.y, -b.z};
    cos_theta = -cos_theta;
  }
  if (cos_theta > 1.0 - 1e-12) {
    const UnitQuat lerp{a.w + t * (b.w - a.w), a.x + t * (b.x - a.x), a.y + t * (b.y - a.y),
                        a.z + t * (b.z - a.z)};
    return lerp.normalized();
  }
  const double theta = std::acos(std::min(1.0, cos_theta));
  const double sin_theta = std::sin(theta);
  const double wa = std::sin((1.0 - t) * theta) / sin_theta;
  const double wb = std::sin(t * theta) / sin_theta;
  return UnitQuat{wa * a.w + wb * b.w, wa * a.x + wb * b.x, wa * a.y + wb * b.y,
                  wa * a.z + wb * b.z}
      .normalized();
}

double angle_between(const Vec3& a, const Vec3& b) {
  if (!(a.norm() > kDegenerateNorm) || !(b.norm() > kDegenerateNorm)) {
    throw GeometryError("angle_between: degenerate vector");
  }
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

UnitQuat rotation_between(const Vec3& a, const Vec3& b) {
  const double angle = angle_between(a, b);
  const Vec3 ua = a.normalized();
  if (angle > std::numbers::pi - 1e-6) {
    Vec3 axis = ua.cross(Vec3::unit_y());
    if (!(axis.norm() > 1e-6)) axis = ua.cross(Vec3::unit_x());
    return UnitQuat::from_axis_angle(axis, std::numbers::pi);
  }
  // Half-way quaternion (1 + a.b, a x b); no axis normalization, so
  // nearly parallel inputs stay well conditioned.
  const Vec3 ub = b.normalized();
  const Vec3 v = ua.cross(ub);
  return UnitQuat{1.0 + ua.dot(ub), v.x, v.y, v.z}.normalized();
}

Plane fit_plane(std::span<const Vec3> points) {
  if (points.size() < 3) {
    throw GeometryError("fit_plane: need at least 3 points");
  }
  Vec3 centroid;
  for (const Vec3& p : points) centroid += p;
  centroid = centroid / static_cast<double>(points.size());

  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const Vec3& p : points) {
    const Eigen::Vector3d d(p.x - centroid.x, p.y - centroid.y, p.z - centroid.z);
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(points.size());

  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw GeometryError("fit_plane: eigen decomposition failed");
  }
  // Eigenvalues are sorted ascending.
  const Eigen::Vector3d& ev = solver.eigenvalues();
  if (ev(0) < 1e-12 && ev(1) < 1e-12) {
    throw GeometryError("fit_plane: points are collinear or coincident");
  }
  const Eigen::Vector3d n = solver.eigenvectors().col(0).normalized();
  Vec3 normal{n(0), n(1), n(2)};
  const double s = normal.z != 0.0 ? normal.z : (normal.x != 0.0 ? normal.x : normal.y);
  if (s < 0.0) normal = -normal;
  return Plane{normal, normal.dot(centroid)};
}

}  // namespace walkin
