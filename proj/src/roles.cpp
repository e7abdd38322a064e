// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>

#include "walkin/error.hpp"
#include "walkin/session.hpp"

namespace walkin {

namespace {

struct Candidate {
  const DevicePose* device;
  double height;   // height of the in-plane projection
  double lateral;  // signed offset along the provisional lateral axis
};

std::string names(const Candidate& a, const Candidate& b) {
  return "'" + a.device->id + "' and '" + b.device->id + "'";
}

}  // namespace

RoleMap identify_roles(const DeviceFrame& frame, const RoleIdConfig& config) {
  validate_frame(frame);

  std::vector<Vec3> points;
  points.reserve(frame.devices.size());
  for (const DevicePose& d : frame.devices) points.push_back(d.pose.translation);
  const Plane plane = fit_plane(points);

  const Vec3 up_raw = Vec3::unit_y() - plane.normal * plane.normal.y;
  if (!(up_raw.norm() > 0.5)) {
    throw PostureError("device plane is not upright; is the user standing in T-pose?");
  }
  const Vec3 up = up_raw.normalized();

  Vec3 forward = plane.normal;
  if (config.facing == FacingMode::declared) {
    const Vec3 declared = config.declared_forward.normalized();
    const double alignment = plane.normal.dot(declared);
    if (std::abs(alignment) < std::cos(std::numbers::pi / 4.0)) {
      throw PostureError("user is not facing the declared direction");
    }
    if (alignment < 0.0) forward = -forward;
  }

  Vec3 centroid;
  for (const Vec3& p : points) centroid += p;
  centroid = centroid / static_cast<double>(points.size());
  const Vec3 lateral_axis = forward.cross(up);

  std::vector<Candidate> cands;
  for (const DevicePose& d : frame.devices) {
    const Vec3 q = plane.project(d.pose.translation);
    cands.push_back({&d, q.y, (q - centroid).dot(lateral_axis)});
  }

  std::sort(cands.begin(), cands.end(),
            [](const Candidate& a, const Candidate& b) { return a.height > b.height; });
  if (cands[0].height - cands[1].height < config.tie_margin) {
    throw RoleAmbiguityError("cannot tell the HMD apart: " + names(cands[0], cands[1]) +
                             " are at the same height");
  }
  const Candidate hmd = cands[0];

  // Controllers: extreme lateral positions among devices near HMD height.
  std::vector<Candidate> band;
  std::vector<Candidate> rest;
  for (std::size_t i = 1; i < cands.size(); ++i) {
    if (std::abs(cands[i].height - hmd.height) <= config.height_band * hmd.height) {
      band.push_back(cands[i]);
    } else {
      rest.push_back(cands[i]);
    }
  }
  if (band.size() < 2) {
    throw PostureError("fewer than two devices near HMD height; arms are not raised");
  }
  std::sort(band.begin(), band.end(),
            [](const Candidate& a, const Candidate& b) { return a.lateral < b.lateral; });
  const std::size_t nb = band.size();
  if (nb > 2) {
    if (band[1].lateral - band[0].lateral < config.tie_margin) {
      throw RoleAmbiguityError("controller candidates " + names(band[0], band[1]) +
                               " are at the same lateral position");
    }
    if (band[nb - 1].lateral - band[nb - 2].lateral < config.tie_margin) {
      throw RoleAmbiguityError("controller candidates " + names(band[nb - 2], band[nb - 1]) +
                               " are at the same lateral position");
    }
  }
  Candidate ctrl_a = band.front();
  Candidate ctrl_b = band.back();
  for (std::size_t i = 1; i + 1 < nb; ++i) rest.push_back(band[i]);

  // Feet: the two lowest of what remains; the last one is the root tracker.
  if (rest.size() != 3) throw PostureError("unexpected device layout");
  std::sort(rest.begin(), rest.end(),
            [](const Candidate& a, const Candidate& b) { return a.height < b.height; });
  if (rest[2].height - rest[1].height < config.tie_margin) {
    throw RoleAmbiguityError("cannot tell the root tracker apart: " + names(rest[1], rest[2]) +
                             " are at the same height");
  }
  Candidate foot_a = rest[0];
  Candidate foot_b = rest[1];
  const Candidate root = rest[2];

  if (!(root.height < std::min(ctrl_a.height, ctrl_b.height)) ||
      !(root.height > std::max(foot_a.height, foot_b.height))) {
    throw PostureError("root tracker is not between the controllers and the feet");
  }

  if (config.facing == FacingMode::estimated) {
    // The HMD sits in front of the face, the root tracker on the lower back.
    const double depth = (hmd.device->pose.translation - root.device->pose.translation).dot(forward);
    if (std::abs(depth) < config.tie_margin) {
      throw RoleAmbiguityError("cannot determine facing: HMD " + names(hmd, root) +
                               " are at the same depth");
    }
    if (depth < 0.0) {
      for (Candidate* c : {&ctrl_a, &ctrl_b, &foot_a, &foot_b}) c->lateral = -c->lateral;
    }
  }

  if (ctrl_a.lateral > ctrl_b.lateral) std::swap(ctrl_a, ctrl_b);
  if (!(ctrl_a.lateral < 0.0) || !(ctrl_b.lateral > 0.0)) {
    throw PostureError("controllers are not on opposite sides of the body");
  }
  if (foot_a.lateral > foot_b.lateral) std::swap(foot_a, foot_b);
  if (foot_b.lateral - foot_a.lateral < config.tie_margin) {
    throw RoleAmbiguityError("cannot tell left from right foot: " + names(foot_a, foot_b) +
                             " are at the same lateral position");
  }

  RoleMap roles;
  roles[hmd.device->id] = DeviceRole::hmd;
  roles[ctrl_a.device->id] = DeviceRole::controller_left;
  roles[ctrl_b.device->id] = DeviceRole::controller_right;
  roles[root.device->id] = DeviceRole::tracker_root;
  roles[foot_a.device->id] = DeviceRole::tracker_foot_left;
  roles[foot_b.device->id] = DeviceRole::tracker_foot_right;
  return roles;
}

}  // namespace walkin
