// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

// Per-frame full-body solve from six tracked devices.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "walkin/calibration.hpp"
#include "walkin/math3d.hpp"
#include "walkin/session.hpp"
#include "walkin/skeleton.hpp"

namespace walkin {

enum class OffsetMode {
  /// Offsets captured at calibration.
  exact,
  /// Tracker pose used directly as the joint pose.
  fixed,
};

std::string_view to_string(OffsetMode mode);
/// Throws std::invalid_argument for anything but "exact" or "fixed".
OffsetMode offset_mode_from_string(std::string_view name);

struct EndEffectorTarget {
  JointRole role = JointRole::root;
  Vec3 position;
  UnitQuat rotation;
};

/// p_t(J) = p_t(T) + R_t(T) R_0(T)^-1 v_0
Vec3 effector_position(const Vec3& p_t, const UnitQuat& R_t, const PartOffsets& part);
/// R_t(J) = R_t(T) R_0(T)^-1 R_0(J)
UnitQuat effector_rotation(const UnitQuat& R_t, const PartOffsets& part);

struct SpineBend {
  /// Angle between w_0 and w_t.
  double alpha = 0.0;
  /// Minimal rotation taking w_0 onto w_t.
  UnitQuat rotation;
};

/// w_t = hmd - root_tracker. Throws GeometryError when w_t is degenerate.
SpineBend spine_bend(const Vec3& hmd_p, const Vec3& root_tracker_p, const Vec3& w0);

/// Pure geometric two-bone solve for a chain a -> b -> c.
struct TwoBoneSolution {
  Vec3 mid;
  Vec3 end;
  /// max(0, d - (L1 + L2), |L1 - L2| - d)
  double reach_deficit = 0.0;
  /// Target coincided with the chain root; input kept.
  bool degenerate = false;
};

/// The mid joint swings toward `pole` (falling back to the current bend
/// plane). Bone lengths are taken from the input positions.
TwoBoneSolution solve_two_bone(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& target,
                               const Vec3& pole);

struct TwoBoneChain {
  std::size_t upper = 0;
  std::size_t mid = 0;
  std::size_t end = 0;
};

TwoBoneChain chain_of(const SkeletonModel& skeleton, JointRole upper, JointRole mid, JointRole end);

/// Recomputes the world transforms of `top` and all its descendants.
void refresh_subtree(const SkeletonModel& skeleton, const PoseState& pose,
                     std::vector<RigidTransform>& world, std::size_t top);

struct LimbResult {
  double reach_deficit = 0.0;
  /// Flexion at the mid joint (0 for a straight limb).
  double flexion = 0.0;
  bool degenerate = false;
};

/// Rewrites the local rotations of the chain so the end joint reaches the
/// target (and takes the target rotation). `world` must be the FK of `pose`
/// and is updated for every affected joint.
LimbResult two_bone_ik(const SkeletonModel& skeleton, PoseState& pose,
                       std::vector<RigidTransform>& world, const TwoBoneChain& chain,
                       const EndEffectorTarget& target, const Vec3& pole_hint);

/// Reach deficits above this count as a detached controller.
inline constexpr double kDetachTolerance = 1e-6;

struct SolvedPose {
  PoseState pose;
  std::vector<RigidTransform> world;
  double alpha = 0.0;
  LimbResult arm_l;
  LimbResult arm_r;
  LimbResult leg_l;
  LimbResult leg_r;
  bool controller_detached_l = false;
  bool controller_detached_r = false;

  double knee_l() const { return leg_l.flexion; }
  double knee_r() const { return leg_r.flexion; }
};

/// Solves one frame against a skeleton scaled by profile.scale.
/// Throws Error for missing roles or non-finite inputs.
SolvedPose solve_frame(const DeviceFrame& frame, const CalibrationProfile& profile,
                       const SkeletonModel& scaled_skeleton, OffsetMode mode);

/// Controller pose implied by the solved wrist (hand-attached controller).
RigidTransform attached_controller(const SolvedPose& solved, const SkeletonModel& scaled_skeleton,
                                   const CalibrationProfile& profile, bool left);

struct EffectorStats {
  double mean = 0.0;
  double max = 0.0;
};

struct SessionMetrics {
  std::size_t frames = 0;
  std::size_t failed_frames = 0;
  /// Against ground truth; absent without one.
  std::optional<EffectorStats> effector_error;
  std::optional<EffectorStats> ankle_error;
  /// Straight-leg frames (ground-truth knees below 1 degree).
  std::optional<std::size_t> straight_leg_frames;
  /// Solved knee flexion over straight-leg frames (all frames without
  /// ground truth), radians.
  EffectorStats knee_flexion;
  double knee_flexion_min = 0.0;
  EffectorStats alpha;
  std::size_t detached_l = 0;
  std::size_t detached_r = 0;
};

struct FrameFailure {
  std::size_t frame = 0;
  std::string message;
};

struct SessionSolve {
  /// One entry per session frame; failed frames hold no value.
  std::vector<std::optional<SolvedPose>> frames;
  std::vector<FrameFailure> failures;
  SessionMetrics metrics;
};

/// Solves every frame (errors recorded per frame; solving continues) and
/// summarizes against optional ground truth. Deterministic.
SessionSolve solve_session(const Session& session, const CalibrationProfile& profile,
                           const SkeletonModel& skeleton, OffsetMode mode,
                           const GroundTruth* truth = nullptr);

nlohmann::json metrics_to_json(const SessionMetrics& metrics);

}  // namespace walkin
