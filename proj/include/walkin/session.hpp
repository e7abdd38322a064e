// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "walkin/math3d.hpp"
#include "walkin/skeleton.hpp"

namespace walkin {

enum class DeviceRole {
  hmd,
  controller_left,
  controller_right,
  tracker_root,
  tracker_foot_left,
  tracker_foot_right,
};

inline constexpr std::array kAllDeviceRoles{
    DeviceRole::hmd,          DeviceRole::controller_left,   DeviceRole::controller_right,
    DeviceRole::tracker_root, DeviceRole::tracker_foot_left, DeviceRole::tracker_foot_right,
};

inline constexpr std::size_t kDevicesPerFrame = 6;

std::string_view to_string(DeviceRole role);
DeviceRole device_role_from_string(std::string_view name);

struct DevicePose {
  std::string id;
  RigidTransform pose;
};

struct DeviceFrame {
  double timestamp = 0.0;
  std::vector<DevicePose> devices;

  const DevicePose* find(std::string_view id) const;
};

/// device id -> role
using RoleMap = std::map<std::string, DeviceRole>;

/// Inverse lookup; throws Error when the map does not cover every role or a
/// mapped device is absent from the frame.
std::array<RigidTransform, kDevicesPerFrame> poses_by_role(const DeviceFrame& frame,
                                                           const RoleMap& roles);
const RigidTransform& pose_of(const std::array<RigidTransform, kDevicesPerFrame>& poses,
                              DeviceRole role);

/// True when `roles` is a bijection onto the six device roles.
bool is_complete(const RoleMap& roles);

struct Session {
  std::vector<DeviceFrame> frames;
  std::optional<RoleMap> role_map;
  std::optional<std::size_t> calibration_frame;
};

/// Recorded joint world transforms of the generating skeleton, one entry per
/// session frame.
struct GroundTruth {
  std::vector<std::string> joint_names;
  std::vector<JointRole> joint_roles;
  std::vector<double> timestamps;
  std::vector<std::vector<RigidTransform>> frames;

  std::optional<std::size_t> find(JointRole role) const;
};

/// Frame checks shared by the reader and the generator: six devices, unique
/// ids, finite poses. Throws FormatError.
void validate_frame(const DeviceFrame& frame, std::optional<std::size_t> line = std::nullopt);

// Session JSONL. One frame per line:
//   {"t": s, "devices": [{"id": str, "p": [x,y,z], "q": [w,x,y,z]}, x6]}
// with an optional first header line {"role_map": {...}, "calibration_frame": n}.
Session parse_session(std::istream& in);
Session read_session(const std::filesystem::path& path);
void write_session(const Session& session, std::ostream& out);
void write_session(const Session& session, const std::filesystem::path& path);

// Ground-truth JSONL: {"t": s, "joints": [{"name", "role", "p", "q"}]} per line.
GroundTruth parse_ground_truth(std::istream& in);
GroundTruth read_ground_truth(const std::filesystem::path& path);
void write_ground_truth(const GroundTruth& truth, std::ostream& out);
void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& path);

enum class FacingMode {
  /// User faces the declared direction (-Z by default).
  declared,
  /// Forward is re-estimated from the fitted plane; the sign is chosen so
  /// the root tracker (worn on the back) lies behind the HMD.
  estimated,
};

struct RoleIdConfig {
  /// Controllers must be within this fraction of the HMD height.
  double height_band = 0.35;
  /// Two candidates closer than this on the deciding axis are ambiguous.
  double tie_margin = 0.02;
  FacingMode facing = FacingMode::declared;
  Vec3 declared_forward{0.0, 0.0, -1.0};
};

/// Assigns the six device roles from a T-pose frame: plane fit over the
/// device positions, then height and lateral ordering on that plane.
/// Throws RoleAmbiguityError or PostureError.
RoleMap identify_roles(const DeviceFrame& frame, const RoleIdConfig& config = {});

}  // namespace walkin
