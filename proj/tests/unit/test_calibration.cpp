// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <filesystem>
#include <random>

#include "helpers.hpp"
#include "walkin/calibration.hpp"
#include "walkin/error.hpp"
#include "walkin/synthetic.hpp"

using namespace walkin;
using namespace walkin::test;

namespace {

SyntheticSession tpose_session(const MountOffsets& mounts, NoiseModel noise = {}) {
  const SkeletonModel& skel = reference_skeleton();
  return generate_synthetic_session(skel, builtin_script(skel, "tpose"), mounts, noise);
}

SkeletonModel with_eye_height(double eye) {
  nlohmann::json doc = skeleton_to_json(reference_skeleton());
  doc["eye_height"] = eye;
  return load_skeleton(doc);
}

}  // namespace

TEST_CASE("compute_scale") {
  CHECK(compute_scale(1.60, with_eye_height(1.75)).scale == doctest::Approx(0.9142857142857143));
  CHECK(compute_scale(1.68, reference_skeleton()).scale == doctest::Approx(1.0));
  CHECK(compute_scale(1.80, with_eye_height(1.50)).scale == doctest::Approx(1.2));
  CHECK(!compute_scale(1.80, reference_skeleton()).warning);
  CHECK(compute_scale(0.4, reference_skeleton()).warning);
  CHECK(compute_scale(2.6, reference_skeleton()).warning);
  CHECK_THROWS_AS(compute_scale(0.0, reference_skeleton()), std::invalid_argument);
}

TEST_CASE("same-proportions user: v0 equals the mount displacement") {
  const SyntheticSession s = tpose_session(reference_mounts());
  const CalibrationResult r = calibrate(s.session, reference_skeleton(), reference_calibration());
  CHECK(r.diagnostics.empty());
  CHECK(r.profile.scale == doctest::Approx(1.0));
  // Mount offsets are joint-local with identity bind rotations, so the
  // joint-minus-tracker displacement is minus the mount translation.
  const MountOffsets m = reference_mounts();
  CHECK((r.profile.part(BodyPart::root).v0 + m[DeviceRole::tracker_root].offset.translation).norm() < 1e-12);
  CHECK((r.profile.part(BodyPart::left_foot).v0 + m[DeviceRole::tracker_foot_left].offset.translation).norm() < 1e-12);
  CHECK((r.profile.part(BodyPart::right_foot).v0 + m[DeviceRole::tracker_foot_right].offset.translation).norm() < 1e-12);
  CHECK((r.profile.w0 - Vec3{0, 0.68, -0.18}).norm() < 1e-12);
  CHECK(r.profile.wrist_palm_offset_r.rotation.angle() < 1e-12);
  CHECK((r.profile.wrist_palm_offset_r.translation - reference_right_hand().palm_anchor.translation).norm() < 1e-15);
  CHECK(is_complete(r.profile.role_map));
}

TEST_CASE("trackers exactly at the joints give v0 = 0") {
  const SyntheticSession s = tpose_session(
      zero_tracker_mounts(reference_left_hand().palm_anchor, reference_right_hand().palm_anchor));
  const CalibrationResult r = calibrate(s.session, reference_skeleton(), reference_calibration());
  for (BodyPart p : kBodyParts) CHECK(r.profile.part(p).v0.norm() < 1e-12);
}

TEST_CASE("longer-legs avatar: root v0 picks up the hip-height difference") {
  const SyntheticSession s = tpose_session(reference_mounts());
  const CalibrationResult r = calibrate(s.session, long_legs_skeleton(), reference_calibration());
  const auto hip_y = [](const SkeletonModel& m) {
    return forward_kinematics(m, m.bind_pose())[m.index_of(JointRole::hip_l)].translation.y;
  };
  const double expected = hip_y(long_legs_skeleton()) - hip_y(reference_skeleton());
  CHECK(r.profile.part(BodyPart::root).v0.y == doctest::Approx(expected).epsilon(1e-12));
  CHECK(expected > 0.05);
}

TEST_CASE("misalignment names the part") {
  MountOffsets m = reference_mounts();
  m[DeviceRole::tracker_foot_right].offset.translation = {0.0, 0.0, 0.6};
  const SyntheticSession s = tpose_session(m);
  try {
    calibrate(s.session, reference_skeleton(), reference_calibration());
    FAIL("expected MisalignmentError");
  } catch (const MisalignmentError& e) {
    CHECK(std::string(e.what()).find("right_foot") != std::string::npos);
  }
}

TEST_CASE("missing calibration frame") {
  SyntheticSession s = tpose_session(reference_mounts());
  s.session.calibration_frame.reset();
  CHECK_THROWS_AS(calibrate(s.session, reference_skeleton()), CalibrationError);
}

TEST_CASE("capture is equivariant under a global rigid motion") {
  std::mt19937_64 rng(17);
  const SyntheticSession s = tpose_session(reference_mounts());
  const CalibrationResult base = calibrate(s.session, reference_skeleton(), reference_calibration());
  const SkeletonModel scaled = scale_uniform(reference_skeleton(), base.profile.scale);
  for (int trial = 0; trial < 20; ++trial) {
    const RigidTransform g = random_rigid(rng);
    DeviceFrame f = s.session.frames[0];
    for (DevicePose& d : f.devices) d.pose = g * d.pose;
    const CalibrationProfile p = capture_profile(f, base.profile.role_map, scaled, g, reference_calibration().capture);
    for (BodyPart part : kBodyParts) {
      CHECK((p.part(part).v0 - g.rotation.rotate(base.profile.part(part).v0)).norm() < 1e-12);
    }
    CHECK((p.w0 - g.rotation.rotate(base.profile.w0)).norm() < 1e-12);
    CHECK(angular_distance(p.wrist_palm_offset_l.rotation, base.profile.wrist_palm_offset_l.rotation) < 1e-7);
  }
}

TEST_CASE("validate_profile") {
  const SyntheticSession s = tpose_session(reference_mounts());
  const CalibrationProfile good = calibrate(s.session, reference_skeleton(), reference_calibration()).profile;
  CHECK(validate_profile(good).empty());

  CalibrationProfile bad_scale = good;
  bad_scale.scale = -1.0;
  const auto d1 = validate_profile(bad_scale);
  REQUIRE(d1.size() == 1);
  CHECK(d1[0].find("scale") != std::string::npos);

  CalibrationProfile far = good;
  far.part(BodyPart::root).v0 = {0.0, 0.8, 0.0};
  const auto d2 = validate_profile(far);
  REQUIRE(d2.size() == 1);
  CHECK(d2[0].find("misalignment") != std::string::npos);

  CalibrationProfile down = good;
  down.w0 = {0.0, -0.5, 0.0};
  CHECK(!validate_profile(down).empty());
}

TEST_CASE("profile JSON round trip") {
  const SyntheticSession s = tpose_session(reference_mounts(), {0.01, 0.02, 5});
  const CalibrationProfile p = calibrate(s.session, reference_skeleton(), reference_calibration()).profile;
  const nlohmann::json j = profile_to_json(p);
  CHECK(j["format"] == 1);
  const CalibrationProfile back = profile_from_json(j);
  CHECK(back.scale == p.scale);
  CHECK(back.role_map == p.role_map);
  for (BodyPart part : kBodyParts) {
    CHECK((back.part(part).v0 - p.part(part).v0).norm() < 1e-15);
    CHECK(angular_distance(back.part(part).R0_T, p.part(part).R0_T) < 1e-7);
  }
  CHECK(profile_to_json(back).dump() == j.dump());

  nlohmann::json old = j;
  old["format"] = 2;
  CHECK_THROWS_AS(profile_from_json(old), FormatError);
  nlohmann::json missing = j;
  missing.erase("w0");
  CHECK_THROWS_AS(profile_from_json(missing), FormatError);
}
