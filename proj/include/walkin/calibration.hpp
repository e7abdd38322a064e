// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

// Walk-in calibration: uniform avatar scaling from the HMD height and capture
// of the exact per-user tracker-to-joint offsets at the calibration frame.

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "walkin/math3d.hpp"
#include "walkin/session.hpp"
#include "walkin/skeleton.hpp"

namespace walkin {

/// Body parts driven by a tracker through captured offsets.
enum class BodyPart { root, left_foot, right_foot };

inline constexpr std::array kBodyParts{BodyPart::root, BodyPart::left_foot, BodyPart::right_foot};

std::string_view to_string(BodyPart part);
DeviceRole device_for(BodyPart part);
JointRole joint_for(BodyPart part);

/// Offsets captured for one tracker/joint pair at t = 0.
struct PartOffsets {
  /// Joint minus tracker position, world frame at t = 0.
  Vec3 v0;
  UnitQuat R0_T;
  UnitQuat R0_J;
  Vec3 p0_T;
  Vec3 p0_J;
};

inline constexpr int kProfileFormat = 1;

struct CalibrationProfile {
  double scale = 1.0;
  std::array<PartOffsets, 3> parts;
  /// HMD minus root-tracker position at t = 0.
  Vec3 w0;
  /// HMD and head-joint world rotations at t = 0.
  UnitQuat head_R0_T;
  UnitQuat head_R0_J;
  /// Controller frame expressed in the wrist frame: rotation captured at t = 0,
  /// translation = palm anchor (the controller center sits under the palm).
  RigidTransform wrist_palm_offset_l;
  RigidTransform wrist_palm_offset_r;
  RoleMap role_map;
  /// Avatar model-space placement in the world during calibration.
  RigidTransform placement;

  const PartOffsets& part(BodyPart p) const { return parts[static_cast<std::size_t>(p)]; }
  PartOffsets& part(BodyPart p) { return parts[static_cast<std::size_t>(p)]; }
};

struct ScaleResult {
  double scale = 1.0;
  std::optional<std::string> warning;
};

/// hmd_height / eye_height. Heights outside [0.5, 2.5] m carry a warning;
/// non-positive heights throw std::invalid_argument.
ScaleResult compute_scale(double hmd_height, const SkeletonModel& skeleton);

struct CaptureOptions {
  /// Palm anchors in wrist-local frames (the reference hand model's).
  RigidTransform palm_left{UnitQuat::identity(), {-0.095, -0.045, 0.0}};
  RigidTransform palm_right{UnitQuat::identity(), {0.095, -0.045, 0.0}};
  /// A tracker farther than this from its joint means the walk-in failed.
  double max_offset = 0.5;
};

/// Captures the offsets from a T-pose frame with the (already scaled)
/// skeleton placed at `placement`. Throws MisalignmentError naming the part
/// when a tracker is too far from its joint.
CalibrationProfile capture_profile(const DeviceFrame& frame, const RoleMap& roles,
                                   const SkeletonModel& scaled_skeleton,
                                   const RigidTransform& placement,
                                   const CaptureOptions& options = {});

/// Human-readable invariant violations; empty when the profile is valid.
std::vector<std::string> validate_profile(const CalibrationProfile& profile,
                                          double max_offset = 0.5);

nlohmann::json profile_to_json(const CalibrationProfile& profile);
CalibrationProfile profile_from_json(const nlohmann::json& doc);
void save_profile(const CalibrationProfile& profile, const std::filesystem::path& path);
CalibrationProfile load_profile(const std::filesystem::path& path);

struct CalibrationOptions {
  RoleIdConfig roles;
  CaptureOptions capture;
  RigidTransform placement;
};

struct CalibrationResult {
  CalibrationProfile profile;
  std::vector<std::string> diagnostics;
};

/// Full walk-in flow on the session's calibration frame: role
/// identification, scaling from the HMD height, offset capture.
/// Throws CalibrationError (or a subclass) on failure.
CalibrationResult calibrate(const Session& session, const SkeletonModel& skeleton,
                            const CalibrationOptions& options = {});

}  // namespace walkin
