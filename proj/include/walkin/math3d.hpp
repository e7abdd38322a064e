// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

// Small 3D math kit: vectors, unit quaternions, rigid transforms and planes.
//
// World convention: right-handed, +Y up, the user initially faces -Z, so the
// user's right is +X. Quaternions are stored (w, x, y, z).

#pragma once

#include <cmath>
#include <span>

namespace walkin {

/// Norm below which a direction is considered degenerate (meters).
inline constexpr double kDegenerateNorm = 1e-9;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3() = default;
  constexpr Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  constexpr Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  constexpr Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  constexpr Vec3& operator*=(double s) {
    x *= s;
    y *= s;
    z *= s;
    return *this;
  }
  constexpr bool operator==(const Vec3&) const = default;

  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  constexpr double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  /// Unit vector in the same direction; throws GeometryError when the norm is
  /// not above kDegenerateNorm.
  Vec3 normalized() const;

  static constexpr Vec3 zero() { return {0.0, 0.0, 0.0}; }
  static constexpr Vec3 unit_x() { return {1.0, 0.0, 0.0}; }
  static constexpr Vec3 unit_y() { return {0.0, 1.0, 0.0}; }
  static constexpr Vec3 unit_z() { return {0.0, 0.0, 1.0}; }
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

inline double distance(const Vec3& a, const Vec3& b) { return (a - b).norm(); }

/// Unit quaternion (w, x, y, z). Constructors do not normalize; use
/// normalized() after accumulating many products.
struct UnitQuat {
  double w = 1.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr UnitQuat() = default;
  constexpr UnitQuat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static constexpr UnitQuat identity() { return {}; }
  /// Rotation of `angle` radians about `axis` (normalized internally).
  static UnitQuat from_axis_angle(const Vec3& axis, double angle);

  constexpr UnitQuat operator*(const UnitQuat& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z, w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x, w * o.z + x * o.y - y * o.x + z * o.w};
  }
  constexpr bool operator==(const UnitQuat&) const = default;

  constexpr UnitQuat conjugate() const { return {w, -x, -y, -z}; }
  constexpr UnitQuat inverse() const { return conjugate(); }
  constexpr double dot(const UnitQuat& o) const { return w * o.w + x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  UnitQuat normalized() const;
  /// Same rotation with w >= 0 (first nonzero of w, x, y, z made positive).
  UnitQuat canonical() const;
  bool is_finite() const {
    return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }

  constexpr Vec3 rotate(const Vec3& v) const {
    // v + 2 q_v x (q_v x v + w v)
    const Vec3 qv{x, y, z};
    const Vec3 t = qv.cross(v) * 2.0;
    return v + t * w + qv.cross(t);
  }

  /// Rotation angle in [0, pi].
  double angle() const;
};

/// Angle of the relative rotation a^-1 b, in [0, pi]; insensitive to sign.
double angular_distance(const UnitQuat& a, const UnitQuat& b);

/// Shortest-arc spherical interpolation. t outside [0, 1] extrapolates along
/// the same great circle.
UnitQuat slerp(const UnitQuat& a, const UnitQuat& b, double t);

struct RigidTransform {
  UnitQuat rotation;
  Vec3 translation;

  static constexpr RigidTransform identity() { return {}; }

  constexpr RigidTransform operator*(const RigidTransform& o) const {
    return {rotation * o.rotation, translation + rotation.rotate(o.translation)};
  }
  constexpr Vec3 apply(const Vec3& p) const { return translation + rotation.rotate(p); }
  constexpr RigidTransform inverse() const {
    const UnitQuat inv = rotation.inverse();
    return {inv, -inv.rotate(translation)};
  }
};

/// Plane {p : normal . p = offset}. signed_distance is positive on the side
/// the normal points to.
struct Plane {
  Vec3 normal{0.0, 0.0, 1.0};
  double offset = 0.0;

  double signed_distance(const Vec3& p) const { return normal.dot(p) - offset; }
  Vec3 project(const Vec3& p) const { return p - normal * signed_distance(p); }
};

/// Angle between two vectors in [0, pi], via atan2(|a x b|, a . b).
/// Throws GeometryError if either norm is <= kDegenerateNorm.
double angle_between(const Vec3& a, const Vec3& b);

/// Minimal rotation taking direction a onto direction b. For antiparallel
/// input (angle > pi - 1e-6) the axis is normalize(a x +Y), or normalize(a x
/// +X) when a is vertical.
UnitQuat rotation_between(const Vec3& a, const Vec3& b);

/// Total-least-squares plane through >= 3 points. The normal is the
/// eigenvector of the smallest covariance eigenvalue, signed to have positive
/// dot with +Z (ties broken by +X, then +Y).
/// Throws GeometryError for fewer than 3 points or collinear input.
Plane fit_plane(std::span<const Vec3> points);

}  // namespace walkin
