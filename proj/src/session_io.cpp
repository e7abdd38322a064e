// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "walkin/error.hpp"
#include "walkin/json_util.hpp"
#include "walkin/session.hpp"

namespace walkin {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<DeviceRole, std::string_view>, kDevicesPerFrame> kDeviceRoleNames{{
    {DeviceRole::hmd, "hmd"},
    {DeviceRole::controller_left, "controller_left"},
    {DeviceRole::controller_right, "controller_right"},
    {DeviceRole::tracker_root, "tracker_root"},
    {DeviceRole::tracker_foot_left, "tracker_foot_left"},
    {DeviceRole::tracker_foot_right, "tracker_foot_right"},
}};

std::size_t role_slot(DeviceRole role) { return static_cast<std::size_t>(role); }

// Lines without content (blank, or only a CR) are skipped; a trailing CR is
// dropped so CRLF files parse identically.
bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

bool is_blank(const std::string& s) { return s.find_first_not_of(" \t") == std::string::npos; }

json parse_line(const std::string& line, std::size_t line_no) {
  try {
    return json::parse(line);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what(), line_no);
  }
}

DeviceFrame frame_from_json(const json& j, std::size_t line_no) {
  try {
    if (!j.contains("t")) throw FormatError("missing 't'");
    if (!j.contains("devices") || !j["devices"].is_array()) throw FormatError("missing 'devices'");
    DeviceFrame frame;
    frame.timestamp = json_util::number_from(j["t"], "t");
    for (const auto& d : j["devices"]) {
      if (!d.is_object() || !d.contains("id") || !d["id"].is_string()) {
        throw FormatError("device without string 'id'");
      }
      if (!d.contains("p") || !d.contains("q")) throw FormatError("device without 'p'/'q'");
      frame.devices.push_back(
          {d["id"].get<std::string>(),
           {json_util::quat_from(d["q"], "q"), json_util::vec3_from(d["p"], "p")}});
    }
    validate_frame(frame);
    return frame;
  } catch (const FormatError& e) {
    if (e.line()) throw;
    throw FormatError(e.what(), line_no);
  }
}

json frame_to_json(const DeviceFrame& frame) {
  json devices = json::array();
  for (const DevicePose& d : frame.devices) {
    devices.push_back({{"id", d.id},
                       {"p", json_util::to_json(d.pose.translation)},
                       {"q", json_util::to_json(d.pose.rotation)}});
  }
  return {{"t", frame.timestamp}, {"devices", devices}};
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  return out;
}

}  // namespace

std::string_view to_string(DeviceRole role) { return kDeviceRoleNames[role_slot(role)].second; }

DeviceRole device_role_from_string(std::string_view name) {
  for (const auto& [r, n] : kDeviceRoleNames) {
    if (n == name) return r;
  }
  throw FormatError("unknown device role '" + std::string(name) + "'");
}

const DevicePose* DeviceFrame::find(std::string_view id) const {
  for (const DevicePose& d : devices) {
    if (d.id == id) return &d;
  }
  return nullptr;
}

bool is_complete(const RoleMap& roles) {
  if (roles.size() != kDevicesPerFrame) return false;
  std::set<DeviceRole> seen;
  for (const auto& [id, role] : roles) seen.insert(role);
  return seen.size() == kDevicesPerFrame;
}

std::array<RigidTransform, kDevicesPerFrame> poses_by_role(const DeviceFrame& frame,
                                                           const RoleMap& roles) {
  if (!is_complete(roles)) throw Error("role map does not cover all six device roles");
  std::array<RigidTransform, kDevicesPerFrame> out;
  for (const auto& [id, role] : roles) {
    const DevicePose* d = frame.find(id);
    if (!d) throw Error("device '" + id + "' (" + std::string(to_string(role)) + ") missing from frame");
    out[role_slot(role)] = d->pose;
  }
  return out;
}

const RigidTransform& pose_of(const std::array<RigidTransform, kDevicesPerFrame>& poses,
                              DeviceRole role) {
  return poses[role_slot(role)];
}

std::optional<std::size_t> GroundTruth::find(JointRole role) const {
  for (std::size_t i = 0; i < joint_roles.size(); ++i) {
    if (joint_roles[i] == role) return i;
  }
  return std::nullopt;
}

void validate_frame(const DeviceFrame& frame, std::optional<std::size_t> line) {
  if (frame.devices.size() != kDevicesPerFrame) {
    throw FormatError("expected 6 devices, found " + std::to_string(frame.devices.size()), line);
  }
  std::set<std::string> ids;
  for (const DevicePose& d : frame.devices) {
    if (!ids.insert(d.id).second) throw FormatError("duplicate device id '" + d.id + "'", line);
    if (!d.pose.translation.is_finite() || !d.pose.rotation.is_finite()) {
      throw FormatError("non-finite pose for device '" + d.id + "'", line);
    }
  }
  if (!std::isfinite(frame.timestamp)) throw FormatError("non-finite timestamp", line);
}

Session parse_session(std::istream& in) {
  Session session;
  std::string line;
  std::size_t line_no = 0;
  bool first = true;
  while (next_line(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const json j = parse_line(line, line_no);
    if (!j.is_object()) throw FormatError("expected a JSON object", line_no);
    if (first && !j.contains("t")) {
      first = false;
      try {
        if (j.contains("role_map")) {
          if (!j["role_map"].is_object()) throw FormatError("role_map must be an object");
          RoleMap roles;
          for (const auto& [id, role] : j["role_map"].items()) {
            if (!role.is_string()) throw FormatError("role_map values must be strings");
            roles[id] = device_role_from_string(role.get<std::string>());
          }
          if (!is_complete(roles)) throw FormatError("role_map is not a bijection onto six roles");
          session.role_map = std::move(roles);
        }
        if (j.contains("calibration_frame")) {
          if (!j["calibration_frame"].is_number_unsigned()) {
            throw FormatError("calibration_frame must be a non-negative integer");
          }
          session.calibration_frame = j["calibration_frame"].get<std::size_t>();
        }
      } catch (const FormatError& e) {
        throw FormatError(e.what(), line_no);
      }
      continue;
    }
    first = false;
    DeviceFrame frame = frame_from_json(j, line_no);
    if (!session.frames.empty() && !(frame.timestamp > session.frames.back().timestamp)) {
      throw FormatError("timestamps must be strictly increasing", line_no);
    }
    session.frames.push_back(std::move(frame));
  }
  if (session.calibration_frame && *session.calibration_frame >= session.frames.size()) {
    throw FormatError("calibration_frame " + std::to_string(*session.calibration_frame) +
                      " is out of range");
  }
  return session;
}

Session read_session(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_session(in);
}

void write_session(const Session& session, std::ostream& out) {
  if (session.role_map || session.calibration_frame) {
    json header = json::object();
    if (session.role_map) {
      json roles = json::object();
      for (const auto& [id, role] : *session.role_map) roles[id] = to_string(role);
      header["role_map"] = roles;
    }
    if (session.calibration_frame) header["calibration_frame"] = *session.calibration_frame;
    out << header.dump() << '\n';
  }
  for (const DeviceFrame& f : session.frames) out << frame_to_json(f).dump() << '\n';
}

void write_session(const Session& session, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_session(session, out);
}

GroundTruth parse_ground_truth(std::istream& in) {
  GroundTruth truth;
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    const json j = parse_line(line, line_no);
    try {
      if (!j.is_object() || !j.contains("t") || !j.contains("joints") || !j["joints"].is_array()) {
        throw FormatError("expected {\"t\", \"joints\"}");
      }
      const bool first = truth.frames.empty();
      std::vector<RigidTransform> poses;
      std::size_t k = 0;
      for (const auto& jj : j["joints"]) {
        if (!jj.contains("name") || !jj["name"].is_string()) throw FormatError("joint without name");
        const std::string name = jj["name"].get<std::string>();
        if (first) {
          truth.joint_names.push_back(name);
          truth.joint_roles.push_back(jj.contains("role") && jj["role"].is_string()
                                          ? joint_role_from_string(jj["role"].get<std::string>())
                                          : JointRole::other);
        } else if (k >= truth.joint_names.size() || truth.joint_names[k] != name) {
          throw FormatError("joint list differs from the first frame");
        }
        poses.push_back({json_util::quat_from(jj["q"], "q"), json_util::vec3_from(jj["p"], "p")});
        ++k;
      }
      if (!first && k != truth.joint_names.size()) {
        throw FormatError("joint list differs from the first frame");
      }
      truth.timestamps.push_back(json_util::number_from(j["t"], "t"));
      truth.frames.push_back(std::move(poses));
    } catch (const FormatError& e) {
      throw FormatError(e.what(), line_no);
    }
  }
  return truth;
}

GroundTruth read_ground_truth(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_ground_truth(in);
}

void write_ground_truth(const GroundTruth& truth, std::ostream& out) {
  for (std::size_t f = 0; f < truth.frames.size(); ++f) {
    json joints = json::array();
    for (std::size_t i = 0; i < truth.joint_names.size(); ++i) {
      joints.push_back({{"name", truth.joint_names[i]},
                        {"role", to_string(truth.joint_roles[i])},
                        {"p", json_util::to_json(truth.frames[f][i].translation)},
                        {"q", json_util::to_json(truth.frames[f][i].rotation)}});
    }
    out << json{{"t", truth.timestamps[f]}, {"joints", joints}}.dump() << '\n';
  }
}

void write_ground_truth(const GroundTruth& truth, const std::filesystem::path& path) {
  auto out = open_output(path);
  write_ground_truth(truth, out);
}

}  // namespace walkin
