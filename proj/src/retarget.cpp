// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include "walkin/retarget.hpp"

#include <stdexcept>

#include "walkin/error.hpp"

namespace walkin {

std::string_view to_string(OffsetMode mode) {
  return mode == OffsetMode::exact ? "exact" : "fixed";
}

OffsetMode offset_mode_from_string(std::string_view name) {
  if (name == "exact") return OffsetMode::exact;
  if (name == "fixed") return OffsetMode::fixed;
  throw std::invalid_argument("unknown offset mode '" + std::string(name) + "' (expected exact or fixed)");
}

Vec3 effector_position(const Vec3& p_t, const UnitQuat& R_t, const PartOffsets& part) {
  return p_t + (R_t * part.R0_T.inverse()).rotate(part.v0);
}

UnitQuat effector_rotation(const UnitQuat& R_t, const PartOffsets& part) {
  return (R_t * part.R0_T.inverse() * part.R0_J).normalized();
}

SpineBend spine_bend(const Vec3& hmd_p, const Vec3& root_tracker_p, const Vec3& w0) {
  const Vec3 wt = hmd_p - root_tracker_p;
  if (!(wt.norm() > kDegenerateNorm)) {
    throw GeometryError("spine bend: HMD and root tracker coincide");
  }
  return {angle_between(w0, wt), rotation_between(w0, wt)};
}

namespace {

EndEffectorTarget part_target(const RigidTransform& tracker, const PartOffsets& part,
                              JointRole role, OffsetMode mode) {
  if (mode == OffsetMode::fixed) return {role, tracker.translation, tracker.rotation};
  return {role, effector_position(tracker.translation, tracker.rotation, part),
          effector_rotation(tracker.rotation, part)};
}

// Sets joint i's world rotation, keeping its position, and updates the
// subtree below it.
void set_world_rotation(const SkeletonModel& skeleton, PoseState& pose,
                        std::vector<RigidTransform>& world, std::size_t i, const UnitQuat& rot) {
  const auto p = skeleton.joint(i).parent;
  const UnitQuat parent = p ? world[*p].rotation : pose.root_world.rotation;
  pose.local_rotations[i] = (parent.inverse() * rot).normalized();
  refresh_subtree(skeleton, pose, world, i);
}

}  // namespace

SolvedPose solve_frame(const DeviceFrame& frame, const CalibrationProfile& profile,
                       const SkeletonModel& skeleton, OffsetMode mode) {
  validate_frame(frame);
  const auto devices = poses_by_role(frame, profile.role_map);

  SolvedPose out;
  out.pose = skeleton.bind_pose();

  // Root placement.
  const PartOffsets& root_part = profile.part(BodyPart::root);
  const EndEffectorTarget root =
      part_target(pose_of(devices, DeviceRole::tracker_root), root_part, JointRole::root, mode);
  const std::size_t root_index = skeleton.index_of(JointRole::root);
  const RigidTransform root_bind = skeleton.joint(root_index).bind_local;
  out.pose.root_world = RigidTransform{root.rotation, root.position} * root_bind.inverse();
  out.world = forward_kinematics(skeleton, out.pose);

  // Spine bend, measured in the frame that moves with the root so the
  // result does not depend on where the user stands or faces.
  const UnitQuat root_delta = (root.rotation * root_part.R0_J.inverse()).normalized();
  const Vec3 hmd_p = pose_of(devices, DeviceRole::hmd).translation;
  const Vec3 root_p = pose_of(devices, DeviceRole::tracker_root).translation;
  const SpineBend bend = spine_bend(root_delta.inverse().rotate(hmd_p - root_p), Vec3::zero(), profile.w0);
  out.alpha = bend.alpha;
  const std::size_t spine = skeleton.index_of(JointRole::spine);
  const UnitQuat spine_delta = root_delta * bend.rotation * root_delta.inverse();
  set_world_rotation(skeleton, out.pose, out.world, spine,
                     (spine_delta * out.world[spine].rotation).normalized());

  // Head follows the HMD.
  const UnitQuat hmd_r = pose_of(devices, DeviceRole::hmd).rotation;
  const UnitQuat head_rot = mode == OffsetMode::exact
                                ? (hmd_r * profile.head_R0_T.inverse() * profile.head_R0_J).normalized()
                                : hmd_r;
  set_world_rotation(skeleton, out.pose, out.world, skeleton.index_of(JointRole::head), head_rot);

  // Legs: knees bend forward.
  const Vec3 forward = out.pose.root_world.rotation.rotate({0.0, 0.0, -1.0});
  const EndEffectorTarget ankle_l = part_target(pose_of(devices, DeviceRole::tracker_foot_left),
                                                profile.part(BodyPart::left_foot), JointRole::ankle_l, mode);
  const EndEffectorTarget ankle_r = part_target(pose_of(devices, DeviceRole::tracker_foot_right),
                                                profile.part(BodyPart::right_foot), JointRole::ankle_r, mode);
  out.leg_l = two_bone_ik(skeleton, out.pose, out.world,
                          chain_of(skeleton, JointRole::hip_l, JointRole::knee_l, JointRole::ankle_l),
                          ankle_l, forward);
  out.leg_r = two_bone_ik(skeleton, out.pose, out.world,
                          chain_of(skeleton, JointRole::hip_r, JointRole::knee_r, JointRole::ankle_r),
                          ankle_r, forward);

  // Arms: the wrist goes where the held controller puts it; elbows point
  // down and back.
  const Vec3 elbow_pole = out.pose.root_world.rotation.rotate(Vec3{0.0, -1.0, 1.0}.normalized());
  auto wrist_target = [&](DeviceRole controller, const RigidTransform& palm, JointRole wrist) {
    const RigidTransform t = pose_of(devices, controller) * palm.inverse();
    return EndEffectorTarget{wrist, t.translation, t.rotation.normalized()};
  };
  out.arm_l = two_bone_ik(
      skeleton, out.pose, out.world,
      chain_of(skeleton, JointRole::shoulder_l, JointRole::elbow_l, JointRole::wrist_l),
      wrist_target(DeviceRole::controller_left, profile.wrist_palm_offset_l, JointRole::wrist_l),
      elbow_pole);
  out.arm_r = two_bone_ik(
      skeleton, out.pose, out.world,
      chain_of(skeleton, JointRole::shoulder_r, JointRole::elbow_r, JointRole::wrist_r),
      wrist_target(DeviceRole::controller_right, profile.wrist_palm_offset_r, JointRole::wrist_r),
      elbow_pole);
  out.controller_detached_l = out.arm_l.reach_deficit > kDetachTolerance;
  out.controller_detached_r = out.arm_r.reach_deficit > kDetachTolerance;
  return out;
}

RigidTransform attached_controller(const SolvedPose& solved, const SkeletonModel& skeleton,
                                   const CalibrationProfile& profile, bool left) {
  const std::size_t wrist = skeleton.index_of(left ? JointRole::wrist_l : JointRole::wrist_r);
  return solved.world[wrist] * (left ? profile.wrist_palm_offset_l : profile.wrist_palm_offset_r);
}

}  // namespace walkin
