// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include "walkin/skeleton.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <stdexcept>
#include <utility>

#include "walkin/error.hpp"
#include "walkin/json_util.hpp"

namespace walkin {

namespace {

constexpr std::array<std::pair<JointRole, std::string_view>, 20> kRoleNames{{
    {JointRole::root, "root"},
    {JointRole::spine, "spine"},
    {JointRole::neck, "neck"},
    {JointRole::head, "head"},
    {JointRole::shoulder_l, "shoulder_l"},
    {JointRole::shoulder_r, "shoulder_r"},
    {JointRole::elbow_l, "elbow_l"},
    {JointRole::elbow_r, "elbow_r"},
    {JointRole::wrist_l, "wrist_l"},
    {JointRole::wrist_r, "wrist_r"},
    {JointRole::hip_l, "hip_l"},
    {JointRole::hip_r, "hip_r"},
    {JointRole::knee_l, "knee_l"},
    {JointRole::knee_r, "knee_r"},
    {JointRole::ankle_l, "ankle_l"},
    {JointRole::ankle_r, "ankle_r"},
    {JointRole::toe_l, "toe_l"},
    {JointRole::toe_r, "toe_r"},
    {JointRole::finger, "finger"},
    {JointRole::other, "other"},
}};

constexpr std::array kRequiredRoles{
    JointRole::root,       JointRole::spine,      JointRole::head,    JointRole::wrist_l,
    JointRole::wrist_r,    JointRole::ankle_l,    JointRole::ankle_r, JointRole::knee_l,
    JointRole::knee_r,     JointRole::hip_l,      JointRole::hip_r,   JointRole::elbow_l,
    JointRole::elbow_r,    JointRole::shoulder_l, JointRole::shoulder_r,
};

// Roles that may appear at most once; finger/other may repeat.
bool is_unique_role(JointRole r) { return r != JointRole::finger && r != JointRole::other; }

constexpr double kFloorTolerance = 1e-3;

}  // namespace

std::string_view to_string(JointRole role) {
  for (const auto& [r, name] : kRoleNames) {
    if (r == role) return name;
  }
  return "other";
}

JointRole joint_role_from_string(std::string_view name) {
  for (const auto& [r, n] : kRoleNames) {
    if (n == name) return r;
  }
  throw FormatError("unknown joint role '" + std::string(name) + "'");
}

SkeletonModel SkeletonModel::create(std::vector<Joint> joints, double eye_height) {
  if (joints.empty()) throw FormatError("skeleton has no joints");
  if (!(eye_height > 0.0) || !std::isfinite(eye_height)) {
    throw FormatError("eye_height must be positive");
  }

  const std::size_t n = joints.size();
  std::size_t roots = 0;
  for (const Joint& j : joints) {
    if (!j.parent) ++roots;
    else if (*j.parent >= n) throw FormatError("joint '" + j.name + "' has an invalid parent");
  }
  if (roots != 1) {
    throw FormatError("skeleton must have exactly one root, found " + std::to_string(roots));
  }

  // Topological order (parent before child); anything left over is a cycle.
  std::vector<std::size_t> order;
  order.reserve(n);
  std::vector<bool> placed(n, false);
  while (order.size() < n) {
    bool progress = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      if (!joints[i].parent || placed[*joints[i].parent]) {
        order.push_back(i);
        placed[i] = true;
        progress = true;
      }
    }
    if (!progress) throw FormatError("skeleton hierarchy contains a cycle");
  }
  std::vector<std::size_t> new_index(n);
  for (std::size_t k = 0; k < n; ++k) new_index[order[k]] = k;
  std::vector<Joint> sorted;
  sorted.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    Joint j = std::move(joints[order[k]]);
    if (j.parent) j.parent = new_index[*j.parent];
    sorted.push_back(std::move(j));
  }

  std::map<JointRole, int> role_count;
  std::map<std::string, int> name_count;
  for (const Joint& j : sorted) {
    ++role_count[j.role];
    if (++name_count[j.name] > 1) throw FormatError("duplicate joint name '" + j.name + "'");
    if (j.parent && !(j.bind_local.translation.norm() > 0.0)) {
      throw FormatError("joint '" + j.name + "' has zero bone length");
    }
    if (!j.bind_local.translation.is_finite() || !j.bind_local.rotation.is_finite()) {
      throw FormatError("joint '" + j.name + "' has a non-finite bind transform");
    }
  }
  for (const auto& [role, count] : role_count) {
    if (is_unique_role(role) && count > 1) {
      throw FormatError("role '" + std::string(to_string(role)) + "' assigned more than once");
    }
  }
  for (JointRole r : kRequiredRoles) {
    if (role_count[r] != 1) {
      throw FormatError("required role '" + std::string(to_string(r)) + "' is missing");
    }
  }
  if (sorted.front().role != JointRole::root) {
    throw FormatError("the hierarchy root must carry the 'root' role");
  }

  SkeletonModel model(std::move(sorted), eye_height);

  // Feet must rest on the floor: the lowest joint of each foot (toe, or
  // the ankle when there is no toe) sits at height 0.
  const auto world = forward_kinematics(model, model.bind_pose());
  for (auto [ankle, toe] : {std::pair{JointRole::ankle_l, JointRole::toe_l},
                            std::pair{JointRole::ankle_r, JointRole::toe_r}}) {
    double sole = world[model.index_of(ankle)].translation.y;
    if (auto t = model.find(toe)) sole = std::min(sole, world[*t].translation.y);
    if (std::abs(sole) > kFloorTolerance) {
      throw FormatError("feet are not on the floor (sole height " + std::to_string(sole) + " m)");
    }
  }
  return model;
}

std::optional<std::size_t> SkeletonModel::find(JointRole role) const {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].role == role) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> SkeletonModel::find(std::string_view name) const {
  for (std::size_t i = 0; i < joints_.size(); ++i) {
    if (joints_[i].name == name) return i;
  }
  return std::nullopt;
}

std::size_t SkeletonModel::index_of(JointRole role) const {
  if (auto i = find(role)) return *i;
  throw std::out_of_range("skeleton has no joint with role " + std::string(to_string(role)));
}

double SkeletonModel::bone_length(std::size_t i) const {
  const Joint& j = joints_.at(i);
  return j.parent ? j.bind_local.translation.norm() : 0.0;
}

PoseState SkeletonModel::bind_pose() const {
  PoseState pose;
  pose.local_rotations.reserve(joints_.size());
  for (const Joint& j : joints_) pose.local_rotations.push_back(j.bind_local.rotation);
  return pose;
}

std::vector<RigidTransform> forward_kinematics(const SkeletonModel& skeleton,
                                               const PoseState& pose) {
  if (pose.local_rotations.size() != skeleton.size()) {
    throw std::invalid_argument("pose has " + std::to_string(pose.local_rotations.size()) +
                                " rotations, skeleton has " + std::to_string(skeleton.size()) +
                                " joints");
  }
  std::vector<RigidTransform> world(skeleton.size());
  for (std::size_t i = 0; i < skeleton.size(); ++i) {
    const Joint& j = skeleton.joint(i);
    const RigidTransform local{pose.local_rotations[i], j.bind_local.translation};
    world[i] = (j.parent ? world[*j.parent] : pose.root_world) * local;
  }
  return world;
}

SkeletonModel scale_uniform(const SkeletonModel& skeleton, double s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("scale factor must be positive");
  }
  std::vector<Joint> joints = skeleton.joints();
  for (Joint& j : joints) {
    if (j.parent) {
      j.bind_local.translation *= s;
    } else {
      j.bind_local.translation.y *= s;
    }
  }
  return SkeletonModel::create(std::move(joints), skeleton.eye_height() * s);
}

SkeletonModel load_skeleton(const nlohmann::json& doc) {
  using json_util::number_from;
  if (!doc.is_object()) throw FormatError("skeleton document must be an object");
  if (!doc.contains("eye_height")) throw FormatError("skeleton: missing 'eye_height'");
  if (!doc.contains("joints") || !doc["joints"].is_array()) {
    throw FormatError("skeleton: missing 'joints' array");
  }
  const double eye_height = number_from(doc["eye_height"], "eye_height");

  const auto& arr = doc["joints"];
  std::map<std::string, std::size_t> by_name;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const auto& jj = arr[i];
    if (!jj.is_object() || !jj.contains("name") || !jj["name"].is_string()) {
      throw FormatError("skeleton: joint " + std::to_string(i) + " has no name");
    }
    if (!by_name.emplace(jj["name"].get<std::string>(), i).second) {
      throw FormatError("skeleton: duplicate joint name '" + jj["name"].get<std::string>() + "'");
    }
  }

  std::vector<Joint> joints;
  joints.reserve(arr.size());
  for (const auto& jj : arr) {
    Joint j;
    j.name = jj["name"].get<std::string>();
    const std::string ctx = "joint '" + j.name + "'";
    if (jj.contains("parent") && !jj["parent"].is_null()) {
      if (!jj["parent"].is_string()) throw FormatError(ctx + ": parent must be a name or null");
      auto it = by_name.find(jj["parent"].get<std::string>());
      if (it == by_name.end()) throw FormatError(ctx + ": unknown parent");
      j.parent = it->second;
    }
    if (!jj.contains("role") || !jj["role"].is_string()) throw FormatError(ctx + ": missing role");
    j.role = joint_role_from_string(jj["role"].get<std::string>());
    if (!jj.contains("translation")) throw FormatError(ctx + ": missing translation");
    j.bind_local.translation = json_util::vec3_from(jj["translation"], ctx + ".translation");
    if (jj.contains("rotation")) {
      j.bind_local.rotation = json_util::quat_from(jj["rotation"], ctx + ".rotation");
    }
    joints.push_back(std::move(j));
  }
  return SkeletonModel::create(std::move(joints), eye_height);
}

SkeletonModel load_skeleton_file(const std::filesystem::path& path) {
  return load_skeleton(json_util::read_json_file(path));
}

nlohmann::json skeleton_to_json(const SkeletonModel& skeleton) {
  nlohmann::json joints = nlohmann::json::array();
  for (const Joint& j : skeleton.joints()) {
    joints.push_back({
        {"name", j.name},
        {"parent", j.parent ? nlohmann::json(skeleton.joint(*j.parent).name) : nlohmann::json()},
        {"role", to_string(j.role)},
        {"translation", json_util::to_json(j.bind_local.translation)},
        {"rotation", json_util::to_json(j.bind_local.rotation)},
    });
  }
  return {{"eye_height", skeleton.eye_height()}, {"joints", joints}};
}

double flexion_angle(const Vec3& upper, const Vec3& mid, const Vec3& end) {
  return angle_between(mid - upper, end - mid);
}

}  // namespace walkin
