// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

// Synthetic six-device sessions driven by a known skeleton. The generating
// skeleton's joint transforms are recorded as ground truth.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "walkin/session.hpp"
#include "walkin/skeleton.hpp"

namespace walkin {

/// Rigid placement of one device on a body segment (segment-local frame).
struct MountOffset {
  JointRole segment = JointRole::root;
  RigidTransform offset;
};

/// One mount per device role, indexed by DeviceRole.
struct MountOffsets {
  std::array<MountOffset, kDevicesPerFrame> by_role;

  const MountOffset& operator[](DeviceRole r) const { return by_role[static_cast<std::size_t>(r)]; }
  MountOffset& operator[](DeviceRole r) { return by_role[static_cast<std::size_t>(r)]; }
};

/// Typical mounting: HMD 6 cm above and 8 cm in front of the head joint,
/// root tracker 10 cm behind the pelvis, foot trackers on the instep,
/// controllers held at the given palm anchors (wrist-local).
MountOffsets default_mounts(const RigidTransform& palm_left, const RigidTransform& palm_right);

/// Like default_mounts but with the root and foot trackers exactly at their
/// joints.
MountOffsets zero_tracker_mounts(const RigidTransform& palm_left, const RigidTransform& palm_right);

struct NoiseModel {
  /// Isotropic Gaussian position noise, meters.
  double position_sigma = 0.0;
  /// Small-angle rotation noise, radians (Gaussian angle, uniform axis).
  double rotation_sigma = 0.0;
  std::uint64_t seed = 0;
};

struct ScriptFrame {
  double t = 0.0;
  PoseState pose;
};

using MotionScript = std::vector<ScriptFrame>;

inline constexpr double kScriptFrameRate = 30.0;

/// Built-in parametric scripts: "tpose", "squat", "arms", "free".
/// Throws ScriptError for unknown names.
MotionScript builtin_script(const SkeletonModel& skeleton, std::string_view name);

/// JSONL script: {"t": s, "root": {"translation", "rotation"},
/// "rotations": {joint_name: [w,x,y,z]}} per line; unspecified joints keep
/// their bind rotation.
MotionScript read_script_file(const SkeletonModel& skeleton, const std::filesystem::path& path);

struct SyntheticSession {
  Session session;
  GroundTruth truth;
  /// Generator's device id for each role (indexed by DeviceRole).
  std::array<std::string, kDevicesPerFrame> device_ids;
};

/// Device pose = FK(segment) * mount (+ noise). Frame 0 is the calibration
/// frame. The session carries no role map; roles are identified from frame 0.
/// Throws ScriptError if the script is empty, not time-ordered or does not
/// start in T-pose (every joint within 1 degree of bind).
SyntheticSession generate_synthetic_session(const SkeletonModel& skeleton,
                                            const MotionScript& script,
                                            const MountOffsets& mounts,
                                            const NoiseModel& noise = {});

/// Noise-free device poses for one set of joint world transforms.
std::array<RigidTransform, kDevicesPerFrame> device_poses(const SkeletonModel& skeleton,
                                                          const std::vector<RigidTransform>& world,
                                                          const MountOffsets& mounts);

}  // namespace walkin
