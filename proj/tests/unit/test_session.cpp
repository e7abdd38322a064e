// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <sstream>
#include <string>

#include "helpers.hpp"
#include "walkin/error.hpp"
#include "walkin/session.hpp"
#include "walkin/synthetic.hpp"

using namespace walkin;
using namespace walkin::test;

namespace {

std::string to_text(const Session& s) {
  std::ostringstream out;
  write_session(s, out);
  return out.str();
}

SyntheticSession generate(const std::string& script, NoiseModel noise = {}) {
  const SkeletonModel& skel = reference_skeleton();
  return generate_synthetic_session(skel, builtin_script(skel, script), reference_mounts(), noise);
}

const RigidTransform& device(const SyntheticSession& s, std::size_t frame, DeviceRole role) {
  return s.session.frames[frame].find(s.device_ids[static_cast<std::size_t>(role)])->pose;
}

}  // namespace

TEST_CASE("session JSONL round trip") {
  SyntheticSession gen = generate("arms", {0.01, 0.01, 3});
  gen.session.role_map = RoleMap{};
  for (DeviceRole r : kAllDeviceRoles) (*gen.session.role_map)[gen.device_ids[static_cast<std::size_t>(r)]] = r;

  const std::string text = to_text(gen.session);
  std::istringstream in(text);
  const Session back = parse_session(in);
  REQUIRE(back.frames.size() == gen.session.frames.size());
  CHECK(back.calibration_frame == gen.session.calibration_frame);
  CHECK(back.role_map == gen.session.role_map);
  for (std::size_t i = 0; i < back.frames.size(); ++i) {
    CHECK(back.frames[i].timestamp == gen.session.frames[i].timestamp);
    for (std::size_t k = 0; k < 6; ++k) {
      const DevicePose& a = back.frames[i].devices[k];
      const DevicePose& b = gen.session.frames[i].devices[k];
      CHECK(a.id == b.id);
      CHECK((a.pose.translation - b.pose.translation).norm() < 1e-15);
      CHECK(angular_distance(a.pose.rotation, b.pose.rotation) < 1e-7);
    }
  }
  // Writing what was read gives the same bytes.
  CHECK(to_text(back) == text);
}

TEST_CASE("CRLF and LF parse identically") {
  const std::string lf = to_text(generate("tpose").session);
  std::string crlf;
  for (char c : lf) {
    if (c == '\n') crlf += '\r';
    crlf += c;
  }
  std::istringstream a(lf), b(crlf);
  CHECK(to_text(parse_session(a)) == to_text(parse_session(b)));
}

TEST_CASE("session parse errors carry the line number") {
  const std::string text = to_text(generate("tpose").session);
  std::istringstream lines(text);
  std::string header, f1, f2;
  std::getline(lines, header);
  std::getline(lines, f1);
  std::getline(lines, f2);

  SUBCASE("five devices") {
    nlohmann::json j = nlohmann::json::parse(f2);
    j["devices"].erase(j["devices"].begin());
    std::istringstream in(header + "\n" + f1 + "\n" + j.dump() + "\n");
    try {
      parse_session(in);
      FAIL("expected a FormatError");
    } catch (const FormatError& e) {
      CHECK(e.line() == 3);
    }
  }
  SUBCASE("broken JSON") {
    std::istringstream in(header + "\n" + f1 + "\n{\"t\": 0.5, \"dev\n");
    CHECK_THROWS_AS(parse_session(in), FormatError);
  }
  SUBCASE("non-increasing time") {
    std::istringstream in(header + "\n" + f1 + "\n" + f1 + "\n");
    CHECK_THROWS_AS(parse_session(in), FormatError);
  }
  SUBCASE("calibration frame out of range") {
    std::istringstream in("{\"calibration_frame\": 5}\n" + f1 + "\n");
    CHECK_THROWS_AS(parse_session(in), FormatError);
  }
  SUBCASE("non-unit quaternion") {
    nlohmann::json j = nlohmann::json::parse(f1);
    j["devices"][0]["q"] = {1.0, 1.0, 0.0, 0.0};
    std::istringstream in(j.dump() + "\n");
    CHECK_THROWS_AS(parse_session(in), FormatError);
  }
}

TEST_CASE("ground truth round trip") {
  const SyntheticSession gen = generate("squat");
  std::ostringstream out;
  write_ground_truth(gen.truth, out);
  std::istringstream in(out.str());
  const GroundTruth back = parse_ground_truth(in);
  CHECK(back.joint_names == gen.truth.joint_names);
  CHECK(back.joint_roles == gen.truth.joint_roles);
  REQUIRE(back.frames.size() == gen.truth.frames.size());
  CHECK((back.frames[60][5].translation - gen.truth.frames[60][5].translation).norm() < 1e-15);
}

TEST_CASE("synthetic generator") {
  SUBCASE("static T-pose without noise: identical frames at the bind pose") {
    const SyntheticSession gen = generate("tpose");
    const SkeletonModel& skel = reference_skeleton();
    const auto bind = forward_kinematics(skel, skel.bind_pose());
    for (std::size_t i = 1; i < gen.session.frames.size(); ++i) {
      for (std::size_t k = 0; k < 6; ++k) {
        CHECK(gen.session.frames[i].devices[k].pose.translation ==
              gen.session.frames[0].devices[k].pose.translation);
      }
      for (std::size_t j = 0; j < skel.size(); ++j) {
        CHECK((gen.truth.frames[i][j].translation - bind[j].translation).norm() < 1e-12);
      }
    }
    CHECK(gen.session.calibration_frame == 0u);
    CHECK(!gen.session.role_map);
  }

  SUBCASE("device poses follow the mounts") {
    const SyntheticSession gen = generate("tpose");
    CHECK((device(gen, 0, DeviceRole::hmd).translation - Vec3{0, 1.68, -0.08}).norm() < 1e-12);
    CHECK((device(gen, 0, DeviceRole::tracker_root).translation - Vec3{0, 1.0, 0.1}).norm() < 1e-12);
    CHECK((device(gen, 0, DeviceRole::controller_right).translation - Vec3{0.805, 1.395, 0}).norm() < 1e-12);
    CHECK((device(gen, 0, DeviceRole::tracker_foot_left).translation - Vec3{-0.09, 0.11, -0.06}).norm() < 1e-12);
  }

  SUBCASE("squat: root tracker goes down and comes back") {
    const SyntheticSession gen = generate("squat");
    const std::size_t n = gen.session.frames.size();
    const double start = device(gen, 0, DeviceRole::tracker_root).translation.y;
    const double middle = device(gen, n / 2, DeviceRole::tracker_root).translation.y;
    const double end = device(gen, n - 1, DeviceRole::tracker_root).translation.y;
    CHECK(middle < start - 0.05);
    CHECK(std::abs(end - start) < 1e-9);
    for (std::size_t i = 1; i <= n / 2; ++i) {
      CHECK(device(gen, i, DeviceRole::tracker_root).translation.y <=
            device(gen, i - 1, DeviceRole::tracker_root).translation.y + 1e-12);
    }
    // Feet stay planted.
    for (std::size_t i = 0; i < n; ++i) {
      CHECK((device(gen, i, DeviceRole::tracker_foot_left).translation -
             device(gen, 0, DeviceRole::tracker_foot_left).translation).norm() < 1e-9);
    }
  }

  SUBCASE("arms: controllers come in, then abduct back out") {
    const SyntheticSession gen = generate("arms");
    const std::size_t n = gen.session.frames.size();
    auto lateral = [&](std::size_t i) {
      return std::abs(device(gen, i, DeviceRole::controller_right).translation.x -
                      device(gen, i, DeviceRole::tracker_root).translation.x);
    };
    CHECK(lateral(n / 2) < lateral(0) - 0.2);
    for (std::size_t i = n / 2 + 1; i < n; ++i) CHECK(lateral(i) >= lateral(i - 1) - 1e-12);
  }

  SUBCASE("seeded noise is deterministic and seed dependent") {
    const std::string a = to_text(generate("free", {0.01, 0.02, 42}).session);
    const std::string b = to_text(generate("free", {0.01, 0.02, 42}).session);
    const std::string c = to_text(generate("free", {0.01, 0.02, 43}).session);
    CHECK(a == b);
    CHECK(a != c);
  }

  SUBCASE("scripts must start in T-pose") {
    const SkeletonModel& skel = reference_skeleton();
    MotionScript script = builtin_script(skel, "tpose");
    script[0].pose.local_rotations[skel.index_of(JointRole::elbow_l)] =
        UnitQuat::from_axis_angle(Vec3::unit_y(), 2 * kDeg);
    CHECK_THROWS_AS(generate_synthetic_session(skel, script, reference_mounts()), ScriptError);
    CHECK_THROWS_AS(builtin_script(skel, "cartwheel"), ScriptError);
    CHECK_THROWS_AS(generate_synthetic_session(skel, {}, reference_mounts()), ScriptError);
  }
}
