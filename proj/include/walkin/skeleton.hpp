// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "walkin/math3d.hpp"

namespace walkin {

enum class JointRole {
  root,
  spine,
  neck,
  head,
  shoulder_l,
  shoulder_r,
  elbow_l,
  elbow_r,
  wrist_l,
  wrist_r,
  hip_l,
  hip_r,
  knee_l,
  knee_r,
  ankle_l,
  ankle_r,
  toe_l,
  toe_r,
  finger,
  other,
};

std::string_view to_string(JointRole role);
/// Throws FormatError for unknown names.
JointRole joint_role_from_string(std::string_view name);

struct Joint {
  std::string name;
  std::optional<std::size_t> parent;
  RigidTransform bind_local;
  JointRole role = JointRole::other;
};

/// Per-frame joint state: one local rotation per joint plus the transform
/// placing the skeleton's model space in the world.
struct PoseState {
  std::vector<UnitQuat> local_rotations;
  RigidTransform root_world;
};

/// Immutable humanoid hierarchy. Joints are stored parent-before-child.
class SkeletonModel {
 public:
  /// Validates and sorts the joints. Throws FormatError when an invariant
  /// does not hold (single root, acyclic, required roles present once,
  /// positive bone lengths, toes on the floor, positive eye height).
  static SkeletonModel create(std::vector<Joint> joints, double eye_height);

  const std::vector<Joint>& joints() const { return joints_; }
  std::size_t size() const { return joints_.size(); }
  const Joint& joint(std::size_t i) const { return joints_.at(i); }
  double eye_height() const { return eye_height_; }

  std::optional<std::size_t> find(JointRole role) const;
  std::optional<std::size_t> find(std::string_view name) const;
  /// Index of a role that must exist; throws std::out_of_range otherwise.
  std::size_t index_of(JointRole role) const;

  /// Distance from the parent joint in bind pose; 0 for the root.
  double bone_length(std::size_t i) const;

  PoseState bind_pose() const;

 private:
  SkeletonModel(std::vector<Joint> joints, double eye_height)
      : joints_(std::move(joints)), eye_height_(eye_height) {}

  std::vector<Joint> joints_;
  double eye_height_ = 0.0;
};

/// World transforms for every joint, parent before child.
/// Throws std::invalid_argument if the pose size does not match.
std::vector<RigidTransform> forward_kinematics(const SkeletonModel& skeleton,
                                               const PoseState& pose);

/// Uniformly scaled copy. The pivot is the floor projection of the root, so
/// feet stay on the floor. Throws std::invalid_argument for s <= 0.
SkeletonModel scale_uniform(const SkeletonModel& skeleton, double s);

SkeletonModel load_skeleton(const nlohmann::json& doc);
SkeletonModel load_skeleton_file(const std::filesystem::path& path);
nlohmann::json skeleton_to_json(const SkeletonModel& skeleton);

/// Interior-angle complement at a mid joint: 0 for a straight limb.
double flexion_angle(const Vec3& upper, const Vec3& mid, const Vec3& end);

}  // namespace walkin
