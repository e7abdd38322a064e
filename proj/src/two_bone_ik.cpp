// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "walkin/retarget.hpp"

namespace walkin {

namespace {

constexpr double kCoincident = 1e-6;

// Unit vector orthogonal to `dir` in the direction of `hint`, if any.
std::optional<Vec3> orthogonal_part(const Vec3& hint, const Vec3& dir) {
  const Vec3 perp = hint - dir * hint.dot(dir);
  if (!(perp.norm() > 1e-9)) return std::nullopt;
  return perp.normalized();
}

Vec3 any_orthogonal(const Vec3& dir) {
  const Vec3 helper = std::abs(dir.y) < 0.9 ? Vec3::unit_y() : Vec3::unit_x();
  return dir.cross(helper).normalized();
}

}  // namespace

void refresh_subtree(const SkeletonModel& skeleton, const PoseState& pose,
                     std::vector<RigidTransform>& world, std::size_t top) {
  std::vector<bool> inside(skeleton.size(), false);
  inside[top] = true;
  for (std::size_t i = top; i < skeleton.size(); ++i) {
    const Joint& j = skeleton.joint(i);
    if (i != top && !(j.parent && inside[*j.parent])) continue;
    inside[i] = true;
    const RigidTransform& parent = j.parent ? world[*j.parent] : pose.root_world;
    world[i] = parent * RigidTransform{pose.local_rotations[i], j.bind_local.translation};
  }
}

TwoBoneSolution solve_two_bone(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& target,
                               const Vec3& pole) {
  const double l1 = distance(a, b);
  const double l2 = distance(b, c);
  const Vec3 to_target = target - a;
  const double d = to_target.norm();

  TwoBoneSolution s{b, c, 0.0, false};
  if (d < kCoincident) {
    s.degenerate = true;
    return s;
  }
  const Vec3 dir = to_target / d;
  s.reach_deficit = std::max({0.0, d - (l1 + l2), std::abs(l1 - l2) - d});

  // Reachable distance closest to the target.
  const double dc = std::clamp(d, std::abs(l1 - l2), l1 + l2);
  const double cos_beta = std::clamp((l1 * l1 + dc * dc - l2 * l2) / (2.0 * l1 * dc), -1.0, 1.0);
  const double sin_beta = std::sqrt(std::max(0.0, 1.0 - cos_beta * cos_beta));

  std::optional<Vec3> perp = orthogonal_part(pole, dir);
  if (!perp) perp = orthogonal_part(b - a, dir);
  if (!perp) perp = any_orthogonal(dir);

  s.mid = a + (dir * cos_beta + *perp * sin_beta) * l1;
  s.end = a + dir * dc;
  return s;
}

TwoBoneChain chain_of(const SkeletonModel& skeleton, JointRole upper, JointRole mid, JointRole end) {
  return {skeleton.index_of(upper), skeleton.index_of(mid), skeleton.index_of(end)};
}

LimbResult two_bone_ik(const SkeletonModel& skeleton, PoseState& pose,
                       std::vector<RigidTransform>& world, const TwoBoneChain& chain,
                       const EndEffectorTarget& target, const Vec3& pole_hint) {
  const Vec3 a = world[chain.upper].translation;
  const Vec3 b = world[chain.mid].translation;
  const Vec3 c = world[chain.end].translation;
  const TwoBoneSolution sol = solve_two_bone(a, b, c, target.position, pole_hint);

  LimbResult result{sol.reach_deficit, 0.0, sol.degenerate};
  if (!sol.degenerate) {
    // Swing the upper bone onto the new mid, then the lower bone onto the
    // new end. Both deltas are world-frame.
    const UnitQuat upper_delta = rotation_between(b - a, sol.mid - a);
    const UnitQuat lower_delta = rotation_between(upper_delta.rotate(c - b), sol.end - sol.mid);

    const auto parent_world = [&](std::size_t i) {
      const auto p = skeleton.joint(i).parent;
      return p ? world[*p] : pose.root_world;
    };

    const UnitQuat upper_world = (upper_delta * world[chain.upper].rotation).normalized();
    const UnitQuat mid_world = (lower_delta * upper_delta * world[chain.mid].rotation).normalized();
    pose.local_rotations[chain.upper] =
        (parent_world(chain.upper).rotation.inverse() * upper_world).normalized();
    pose.local_rotations[chain.mid] = (upper_world.inverse() * mid_world).normalized();
    pose.local_rotations[chain.end] = (mid_world.inverse() * target.rotation).normalized();
    refresh_subtree(skeleton, pose, world, chain.upper);
  }

  result.flexion = flexion_angle(world[chain.upper].translation, world[chain.mid].translation,
                                 world[chain.end].translation);
  return result;
}

}  // namespace walkin
