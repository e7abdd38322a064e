// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include "walkin/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <tuple>

#include <json.hpp>

#include "walkin/error.hpp"
#include "walkin/json_util.hpp"

namespace walkin {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

UnitQuat rot_x(double deg) { return UnitQuat::from_axis_angle(Vec3::unit_x(), deg * kDeg); }
UnitQuat rot_y(double deg) { return UnitQuat::from_axis_angle(Vec3::unit_y(), deg * kDeg); }
UnitQuat rot_z(double deg) { return UnitQuat::from_axis_angle(Vec3::unit_z(), deg * kDeg); }

double sin2(double x) {
  const double s = std::sin(x);
  return s * s;
}

// Scripts animate by post-multiplying a delta onto the bind rotation, so the
// delta is expressed in the joint's bind frame.
class ScriptBuilder {
 public:
  explicit ScriptBuilder(const SkeletonModel& skeleton) : skel_(skeleton) {}

  PoseState bind() const { return skel_.bind_pose(); }

  void set(PoseState& pose, JointRole role, const UnitQuat& delta) const {
    const std::size_t i = skel_.index_of(role);
    pose.local_rotations[i] = skel_.joint(i).bind_local.rotation * delta;
  }

  // Hip/knee/ankle flexion that keeps the foot flat, knee flexion in degrees.
  void bend_legs(PoseState& pose, double knee_deg) const {
    const double hip = 0.5 * knee_deg;
    for (auto [h, k, a] : {std::tuple{JointRole::hip_l, JointRole::knee_l, JointRole::ankle_l},
                           std::tuple{JointRole::hip_r, JointRole::knee_r, JointRole::ankle_r}}) {
      set(pose, h, rot_x(hip));
      set(pose, k, rot_x(-knee_deg));
      set(pose, a, rot_x(knee_deg - hip));
    }
  }

  // Places the root so the left ankle lands where `yaw` carries its bind
  // position (both legs bend symmetrically, so both feet stay planted).
  void plant_feet(PoseState& pose, const UnitQuat& yaw) const {
    const std::size_t ankle = skel_.index_of(JointRole::ankle_l);
    const Vec3 bind_ankle = forward_kinematics(skel_, skel_.bind_pose())[ankle].translation;
    pose.root_world = RigidTransform::identity();
    const Vec3 local_ankle = forward_kinematics(skel_, pose)[ankle].translation;
    pose.root_world = {yaw, yaw.rotate(bind_ankle - local_ankle)};
  }

 private:
  const SkeletonModel& skel_;
};

MotionScript sample(double duration, const auto& pose_at) {
  MotionScript script;
  const auto n = static_cast<std::size_t>(std::lround(duration * kScriptFrameRate));
  for (std::size_t i = 0; i <= n; ++i) {
    const double t = static_cast<double>(i) / kScriptFrameRate;
    script.push_back({t, pose_at(t)});
  }
  return script;
}

MotionScript tpose_script(const ScriptBuilder& b) {
  return sample(1.0, [&](double) { return b.bind(); });
}

// Half a second standing, one 0-60-0 degree knee flexion over three
// seconds, half a second standing.
MotionScript squat_script(const ScriptBuilder& b) {
  return sample(4.0, [&](double t) {
    PoseState pose = b.bind();
    const double knee = (t > 0.5 && t < 3.5) ? 60.0 * sin2(std::numbers::pi * (t - 0.5) / 3.0) : 0.0;
    b.bend_legs(pose, knee);
    b.plant_feet(pose, UnitQuat::identity());
    return pose;
  });
}

// Arms come down towards the body with bent elbows, then back out to T-pose.
MotionScript arms_script(const ScriptBuilder& b) {
  return sample(3.0, [&](double t) {
    PoseState pose = b.bind();
    const double s = std::sin(std::numbers::pi * t / 3.0);
    b.set(pose, JointRole::shoulder_l, rot_z(70.0 * s));
    b.set(pose, JointRole::shoulder_r, rot_z(-70.0 * s));
    b.set(pose, JointRole::elbow_l, rot_y(-50.0 * s));
    b.set(pose, JointRole::elbow_r, rot_y(50.0 * s));
    return pose;
  });
}

// Turning, leaning, looking around, waving and a shallow squat.
MotionScript free_script(const ScriptBuilder& b) {
  return sample(6.0, [&](double t) {
    PoseState pose = b.bind();
    const double u = t / 6.0;
    const double pi = std::numbers::pi;
    b.set(pose, JointRole::spine, rot_x(-20.0 * sin2(pi * u)));
    b.set(pose, JointRole::head, rot_y(30.0 * std::sin(4.0 * pi * u)));
    b.set(pose, JointRole::shoulder_l, rot_z(40.0 * sin2(pi * u)));
    b.set(pose, JointRole::shoulder_r, rot_z(-40.0 * sin2(pi * u)));
    b.set(pose, JointRole::elbow_l, rot_y(-60.0 * sin2(2.0 * pi * u)));
    b.set(pose, JointRole::elbow_r, rot_y(60.0 * sin2(2.0 * pi * u)));
    b.bend_legs(pose, 30.0 * sin2(2.0 * pi * u));
    b.plant_feet(pose, rot_y(25.0 * std::sin(2.0 * pi * u)));
    return pose;
  });
}

void check_script(const SkeletonModel& skeleton, const MotionScript& script) {
  if (script.empty()) throw ScriptError("motion script is empty");
  for (std::size_t i = 0; i < script.size(); ++i) {
    if (script[i].pose.local_rotations.size() != skeleton.size()) {
      throw ScriptError("script frame " + std::to_string(i) + " does not match the skeleton");
    }
    if (i > 0 && !(script[i].t > script[i - 1].t)) {
      throw ScriptError("script timestamps must be strictly increasing");
    }
  }
  const PoseState& first = script.front().pose;
  const double limit = 1.0 * kDeg;
  for (std::size_t i = 0; i < skeleton.size(); ++i) {
    if (angular_distance(first.local_rotations[i], skeleton.joint(i).bind_local.rotation) > limit) {
      throw ScriptError("script must start in T-pose; joint '" + skeleton.joint(i).name +
                        "' is more than 1 degree from bind");
    }
  }
  if (first.root_world.rotation.angle() > limit) {
    throw ScriptError("script must start in T-pose; root is rotated");
  }
}

}  // namespace

MountOffsets default_mounts(const RigidTransform& palm_left, const RigidTransform& palm_right) {
  MountOffsets m;
  m[DeviceRole::hmd] = {JointRole::head, {UnitQuat::identity(), {0.0, 0.06, -0.08}}};
  m[DeviceRole::controller_left] = {JointRole::wrist_l, palm_left};
  m[DeviceRole::controller_right] = {JointRole::wrist_r, palm_right};
  m[DeviceRole::tracker_root] = {JointRole::root, {UnitQuat::identity(), {0.0, 0.0, 0.10}}};
  m[DeviceRole::tracker_foot_left] = {JointRole::ankle_l, {UnitQuat::identity(), {0.0, 0.03, -0.06}}};
  m[DeviceRole::tracker_foot_right] = {JointRole::ankle_r, {UnitQuat::identity(), {0.0, 0.03, -0.06}}};
  return m;
}

MountOffsets zero_tracker_mounts(const RigidTransform& palm_left, const RigidTransform& palm_right) {
  MountOffsets m = default_mounts(palm_left, palm_right);
  for (DeviceRole r : {DeviceRole::tracker_root, DeviceRole::tracker_foot_left,
                       DeviceRole::tracker_foot_right}) {
    m[r].offset = RigidTransform::identity();
  }
  return m;
}

MotionScript builtin_script(const SkeletonModel& skeleton, std::string_view name) {
  const ScriptBuilder b(skeleton);
  if (name == "tpose") return tpose_script(b);
  if (name == "squat") return squat_script(b);
  if (name == "arms") return arms_script(b);
  if (name == "free") return free_script(b);
  throw ScriptError("unknown motion script '" + std::string(name) +
                    "' (expected tpose, squat, arms or free)");
}

MotionScript read_script_file(const SkeletonModel& skeleton, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  MotionScript script;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      ScriptFrame frame{json_util::number_from(j.at("t"), "t"), skeleton.bind_pose()};
      if (j.contains("root")) frame.pose.root_world = json_util::transform_from(j["root"], "root");
      if (j.contains("rotations")) {
        for (const auto& [name, q] : j["rotations"].items()) {
          const auto idx = skeleton.find(name);
          if (!idx) throw FormatError("unknown joint '" + name + "'");
          frame.pose.local_rotations[*idx] = json_util::quat_from(q, name);
        }
      }
      script.push_back(std::move(frame));
    } catch (const FormatError& e) {
      throw FormatError(e.what(), line_no);
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  return script;
}

std::array<RigidTransform, kDevicesPerFrame> device_poses(const SkeletonModel& skeleton,
                                                          const std::vector<RigidTransform>& world,
                                                          const MountOffsets& mounts) {
  std::array<RigidTransform, kDevicesPerFrame> out;
  for (DeviceRole r : kAllDeviceRoles) {
    const MountOffset& m = mounts[r];
    out[static_cast<std::size_t>(r)] = world[skeleton.index_of(m.segment)] * m.offset;
  }
  return out;
}

SyntheticSession generate_synthetic_session(const SkeletonModel& skeleton,
                                            const MotionScript& script,
                                            const MountOffsets& mounts,
                                            const NoiseModel& noise) {
  check_script(skeleton, script);

  std::mt19937_64 rng(noise.seed);
  SyntheticSession out;

  // Opaque ids, shuffled so that listing order says nothing about roles.
  std::array<std::string, kDevicesPerFrame> ids{"dev-A", "dev-B", "dev-C",
                                                "dev-D", "dev-E", "dev-F"};
  std::shuffle(ids.begin(), ids.end(), rng);
  out.device_ids = ids;

  for (const Joint& j : skeleton.joints()) {
    out.truth.joint_names.push_back(j.name);
    out.truth.joint_roles.push_back(j.role);
  }

  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (const ScriptFrame& sf : script) {
    const auto world = forward_kinematics(skeleton, sf.pose);
    const auto poses = device_poses(skeleton, world, mounts);

    DeviceFrame frame;
    frame.timestamp = sf.t;
    for (std::size_t r = 0; r < kDevicesPerFrame; ++r) {
      RigidTransform pose = poses[r];
      if (noise.position_sigma > 0.0) {
        pose.translation += Vec3{gauss(rng), gauss(rng), gauss(rng)} * noise.position_sigma;
      }
      if (noise.rotation_sigma > 0.0) {
        Vec3 axis;
        do {
          axis = {uniform(rng), uniform(rng), uniform(rng)};
        } while (!(axis.norm() > 0.1) || axis.norm() > 1.0);
        pose.rotation =
            (UnitQuat::from_axis_angle(axis, gauss(rng) * noise.rotation_sigma) * pose.rotation)
                .normalized();
      }
      frame.devices.push_back({ids[r], pose});
    }
    std::sort(frame.devices.begin(), frame.devices.end(),
              [](const DevicePose& a, const DevicePose& b) { return a.id < b.id; });
    validate_frame(frame);
    out.session.frames.push_back(std::move(frame));
    out.truth.timestamps.push_back(sf.t);
    out.truth.frames.push_back(world);
  }
  out.session.calibration_frame = 0;
  return out;
}

}  // namespace walkin
