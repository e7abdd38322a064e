// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include "walkin/calibration.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "walkin/error.hpp"
#include "walkin/json_util.hpp"

namespace walkin {

using nlohmann::json;

std::string_view to_string(BodyPart part) {
  switch (part) {
    case BodyPart::root: return "root";
    case BodyPart::left_foot: return "left_foot";
    case BodyPart::right_foot: return "right_foot";
  }
  return "root";
}

DeviceRole device_for(BodyPart part) {
  switch (part) {
    case BodyPart::root: return DeviceRole::tracker_root;
    case BodyPart::left_foot: return DeviceRole::tracker_foot_left;
    case BodyPart::right_foot: return DeviceRole::tracker_foot_right;
  }
  return DeviceRole::tracker_root;
}

JointRole joint_for(BodyPart part) {
  switch (part) {
    case BodyPart::root: return JointRole::root;
    case BodyPart::left_foot: return JointRole::ankle_l;
    case BodyPart::right_foot: return JointRole::ankle_r;
  }
  return JointRole::root;
}

ScaleResult compute_scale(double hmd_height, const SkeletonModel& skeleton) {
  if (!(hmd_height > 0.0) || !std::isfinite(hmd_height)) {
    throw std::invalid_argument("HMD height must be positive");
  }
  ScaleResult r{hmd_height / skeleton.eye_height(), std::nullopt};
  if (hmd_height < 0.5 || hmd_height > 2.5) {
    std::ostringstream msg;
    msg << "implausible HMD height " << hmd_height << " m";
    r.warning = msg.str();
  }
  return r;
}

CalibrationProfile capture_profile(const DeviceFrame& frame, const RoleMap& roles,
                                   const SkeletonModel& scaled_skeleton,
                                   const RigidTransform& placement,
                                   const CaptureOptions& options) {
  const auto devices = poses_by_role(frame, roles);
  PoseState bind = scaled_skeleton.bind_pose();
  bind.root_world = placement;
  const auto world = forward_kinematics(scaled_skeleton, bind);

  CalibrationProfile profile;
  profile.role_map = roles;
  profile.placement = placement;

  for (BodyPart part : kBodyParts) {
    const RigidTransform& tracker = pose_of(devices, device_for(part));
    const RigidTransform& joint = world[scaled_skeleton.index_of(joint_for(part))];
    PartOffsets& o = profile.part(part);
    o.p0_T = tracker.translation;
    o.R0_T = tracker.rotation;
    o.p0_J = joint.translation;
    o.R0_J = joint.rotation;
    o.v0 = o.p0_J - o.p0_T;
    if (o.v0.norm() > options.max_offset) {
      std::ostringstream msg;
      msg << "walk-in misalignment: " << to_string(part) << " tracker is " << o.v0.norm()
          << " m from its joint (limit " << options.max_offset << " m)";
      throw MisalignmentError(msg.str());
    }
  }

  const RigidTransform& hmd = pose_of(devices, DeviceRole::hmd);
  profile.w0 = hmd.translation - pose_of(devices, DeviceRole::tracker_root).translation;
  profile.head_R0_T = hmd.rotation;
  profile.head_R0_J = world[scaled_skeleton.index_of(JointRole::head)].rotation;

  auto palm_offset = [&](DeviceRole controller, JointRole wrist, const RigidTransform& anchor) {
    const UnitQuat rc = pose_of(devices, controller).rotation;
    const UnitQuat rw = world[scaled_skeleton.index_of(wrist)].rotation;
    return RigidTransform{(rw.inverse() * rc).normalized(), anchor.translation};
  };
  profile.wrist_palm_offset_l =
      palm_offset(DeviceRole::controller_left, JointRole::wrist_l, options.palm_left);
  profile.wrist_palm_offset_r =
      palm_offset(DeviceRole::controller_right, JointRole::wrist_r, options.palm_right);
  return profile;
}

std::vector<std::string> validate_profile(const CalibrationProfile& profile, double max_offset) {
  std::vector<std::string> out;
  if (!(profile.scale > 0.0) || !std::isfinite(profile.scale)) {
    out.push_back("scale must be positive, got " + std::to_string(profile.scale));
  }
  auto check_quat = [&](const UnitQuat& q, const std::string& name) {
    if (!q.is_finite() || std::abs(q.norm() - 1.0) > 1e-6) {
      out.push_back(name + " is not a unit quaternion");
    }
  };
  auto check_vec = [&](const Vec3& v, const std::string& name) {
    if (!v.is_finite()) out.push_back(name + " is not finite");
  };
  for (BodyPart part : kBodyParts) {
    const PartOffsets& o = profile.part(part);
    const std::string p(to_string(part));
    check_vec(o.v0, p + ".v0");
    check_vec(o.p0_T, p + ".p0_T");
    check_vec(o.p0_J, p + ".p0_J");
    check_quat(o.R0_T, p + ".R0_T");
    check_quat(o.R0_J, p + ".R0_J");
    if (o.v0.norm() >= max_offset) {
      out.push_back("walk-in misalignment: " + p + ".v0 has length " +
                    std::to_string(o.v0.norm()) + " m");
    }
  }
  check_vec(profile.w0, "w0");
  if (!(profile.w0.y > 0.0)) out.push_back("w0 must point upwards");
  check_quat(profile.head_R0_T, "head.R0_T");
  check_quat(profile.head_R0_J, "head.R0_J");
  check_quat(profile.wrist_palm_offset_l.rotation, "wrist_palm_offset_l.rotation");
  check_quat(profile.wrist_palm_offset_r.rotation, "wrist_palm_offset_r.rotation");
  check_vec(profile.wrist_palm_offset_l.translation, "wrist_palm_offset_l.translation");
  check_vec(profile.wrist_palm_offset_r.translation, "wrist_palm_offset_r.translation");
  check_quat(profile.placement.rotation, "placement.rotation");
  if (!is_complete(profile.role_map)) out.push_back("role_map does not cover all six roles");
  return out;
}

json profile_to_json(const CalibrationProfile& profile) {
  using json_util::to_json;
  json parts = json::object();
  for (BodyPart part : kBodyParts) {
    const PartOffsets& o = profile.part(part);
    parts[std::string(to_string(part))] = {{"v0", to_json(o.v0)},     {"R0_T", to_json(o.R0_T)},
                                           {"R0_J", to_json(o.R0_J)}, {"p0_T", to_json(o.p0_T)},
                                           {"p0_J", to_json(o.p0_J)}};
  }
  json roles = json::object();
  for (const auto& [id, role] : profile.role_map) roles[id] = to_string(role);
  return {{"format", kProfileFormat},
          {"scale", profile.scale},
          {"parts", parts},
          {"w0", to_json(profile.w0)},
          {"head", {{"R0_T", to_json(profile.head_R0_T)}, {"R0_J", to_json(profile.head_R0_J)}}},
          {"wrist_palm_offset_l", to_json(profile.wrist_palm_offset_l)},
          {"wrist_palm_offset_r", to_json(profile.wrist_palm_offset_r)},
          {"role_map", roles},
          {"placement", to_json(profile.placement)}};
}

CalibrationProfile profile_from_json(const json& doc) {
  using json_util::number_from;
  using json_util::quat_from;
  using json_util::vec3_from;
  if (!doc.is_object()) throw FormatError("profile must be a JSON object");
  if (!doc.contains("format") || doc["format"] != kProfileFormat) {
    throw FormatError("unsupported profile format (expected \"format\": 1)");
  }
  try {
    CalibrationProfile p;
    p.scale = number_from(doc.at("scale"), "scale");
    for (BodyPart part : kBodyParts) {
      const std::string name(to_string(part));
      const json& j = doc.at("parts").at(name);
      PartOffsets& o = p.part(part);
      o.v0 = vec3_from(j.at("v0"), name + ".v0");
      o.R0_T = quat_from(j.at("R0_T"), name + ".R0_T");
      o.R0_J = quat_from(j.at("R0_J"), name + ".R0_J");
      o.p0_T = vec3_from(j.at("p0_T"), name + ".p0_T");
      o.p0_J = vec3_from(j.at("p0_J"), name + ".p0_J");
    }
    p.w0 = vec3_from(doc.at("w0"), "w0");
    p.head_R0_T = quat_from(doc.at("head").at("R0_T"), "head.R0_T");
    p.head_R0_J = quat_from(doc.at("head").at("R0_J"), "head.R0_J");
    p.wrist_palm_offset_l = json_util::transform_from(doc.at("wrist_palm_offset_l"), "wrist_palm_offset_l");
    p.wrist_palm_offset_r = json_util::transform_from(doc.at("wrist_palm_offset_r"), "wrist_palm_offset_r");
    for (const auto& [id, role] : doc.at("role_map").items()) {
      p.role_map[id] = device_role_from_string(role.get<std::string>());
    }
    if (doc.contains("placement")) p.placement = json_util::transform_from(doc["placement"], "placement");
    return p;
  } catch (const json::exception& e) {
    throw FormatError(std::string("profile: ") + e.what());
  }
}

void save_profile(const CalibrationProfile& profile, const std::filesystem::path& path) {
  json_util::write_json_file(path, profile_to_json(profile));
}

CalibrationProfile load_profile(const std::filesystem::path& path) {
  return profile_from_json(json_util::read_json_file(path));
}

CalibrationResult calibrate(const Session& session, const SkeletonModel& skeleton,
                            const CalibrationOptions& options) {
  if (!session.calibration_frame) {
    throw CalibrationError("session has no calibration frame marker");
  }
  const DeviceFrame& frame = session.frames.at(*session.calibration_frame);

  CalibrationResult result;
  const RoleMap roles = identify_roles(frame, options.roles);
  if (session.role_map && *session.role_map != roles) {
    throw RoleAmbiguityError("identified roles disagree with the session's role_map");
  }

  const RigidTransform& hmd = pose_of(poses_by_role(frame, roles), DeviceRole::hmd);
  const ScaleResult scale = compute_scale(hmd.translation.y, skeleton);
  if (scale.warning) result.diagnostics.push_back(*scale.warning);

  const SkeletonModel scaled = scale_uniform(skeleton, scale.scale);
  result.profile = capture_profile(frame, roles, scaled, options.placement, options.capture);
  result.profile.scale = scale.scale;

  for (std::string& d : validate_profile(result.profile, options.capture.max_offset)) {
    result.diagnostics.push_back(std::move(d));
  }
  return result;
}

}  // namespace walkin
