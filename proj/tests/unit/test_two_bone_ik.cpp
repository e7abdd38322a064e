// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "walkin/retarget.hpp"

using namespace walkin;
using namespace walkin::test;

namespace {

// Interior angle at b from the law of cosines.
double law_of_cosines(double l1, double l2, double d) {
  return std::acos((l1 * l1 + l2 * l2 - d * d) / (2 * l1 * l2));
}

double interior(const Vec3& a, const Vec3& b, const Vec3& c) { return angle_between(a - b, c - b); }

}  // namespace

TEST_CASE("straight chain at full reach") {
  const Vec3 a{0, 1, 0}, b{0, 0.6, 0}, c{0, 0.2, 0};
  const TwoBoneSolution s = solve_two_bone(a, b, c, {0.8, 1, 0}, {0, 0, -1});
  CHECK(s.reach_deficit == 0.0);
  CHECK((s.end - Vec3{0.8, 1, 0}).norm() < 1e-12);
  CHECK(flexion_angle(a, s.mid, s.end) < 1e-6);
}

TEST_CASE("L1 = L2 = 0.4, d = 0.4 gives a 60 degree interior angle") {
  const Vec3 a{0, 1, 0}, b{0, 0.6, 0}, c{0, 0.2, 0};
  const TwoBoneSolution s = solve_two_bone(a, b, c, {0, 0.6, 0}, {0, 0, -1});
  CHECK(std::abs(interior(a, s.mid, s.end) - law_of_cosines(0.4, 0.4, 0.4)) < 1e-6);
  CHECK(std::abs(interior(a, s.mid, s.end) - std::numbers::pi / 3) < 1e-6);
  CHECK(s.mid.z < 0.0);  // bends toward the pole
  CHECK(s.reach_deficit == 0.0);
}

TEST_CASE("unreachable target: straight toward it with the exact deficit") {
  const Vec3 a{0, 1, 0}, b{0, 0.6, 0}, c{0, 0.2, 0};
  const TwoBoneSolution s = solve_two_bone(a, b, c, {0, 0, 0}, {0, 0, -1});
  CHECK(s.reach_deficit == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(distance(a, s.end) == doctest::Approx(0.8));
  CHECK(flexion_angle(a, s.mid, s.end) < 1e-6);
}

TEST_CASE("target inside the inner radius") {
  const Vec3 a{0, 1, 0}, b{0, 0.5, 0}, c{0, 0.2, 0};  // L1 = 0.5, L2 = 0.3
  const TwoBoneSolution s = solve_two_bone(a, b, c, {0, 0.9, 0}, {0, 0, -1});
  CHECK(s.reach_deficit == doctest::Approx(0.1));
  CHECK(distance(a, s.end) == doctest::Approx(0.2));
}

TEST_CASE("target at the chain root keeps the pose") {
  const Vec3 a{0, 1, 0}, b{0, 0.6, 0}, c{0, 0.2, 0};
  const TwoBoneSolution s = solve_two_bone(a, b, c, a, {0, 0, -1});
  CHECK(s.degenerate);
  CHECK(s.mid == b);
  CHECK(s.end == c);
}

TEST_CASE("random reachable targets on the skeleton legs") {
  const SkeletonModel& skel = reference_skeleton();
  const TwoBoneChain leg = chain_of(skel, JointRole::hip_l, JointRole::knee_l, JointRole::ankle_l);
  const double l1 = skel.bone_length(leg.mid), l2 = skel.bone_length(leg.end);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.05, 0.85);
  for (int trial = 0; trial < 500; ++trial) {
    PoseState pose = skel.bind_pose();
    pose.root_world = random_rigid(rng);
    auto world = forward_kinematics(skel, pose);
    const Vec3 hip = world[leg.upper].translation;
    const double d = u(rng);
    const EndEffectorTarget target{JointRole::ankle_l, hip + random_unit(rng) * d, random_rotation(rng)};
    const Vec3 pole = pose.root_world.rotation.rotate({0, 0, -1});
    const LimbResult r = two_bone_ik(skel, pose, world, leg, target, pole);

    CHECK(r.reach_deficit == 0.0);
    CHECK(distance(world[leg.end].translation, target.position) < 1e-4);
    CHECK(std::abs(distance(world[leg.upper].translation, world[leg.mid].translation) - l1) < 1e-12);
    CHECK(std::abs(distance(world[leg.mid].translation, world[leg.end].translation) - l2) < 1e-12);
    CHECK(std::abs(interior(hip, world[leg.mid].translation, world[leg.end].translation) -
                   law_of_cosines(l1, l2, d)) < 1e-6);
    CHECK(angular_distance(world[leg.end].rotation, target.rotation) < 1e-9);
    // The local rotations alone reproduce the same world transforms.
    const auto fk = forward_kinematics(skel, pose);
    for (std::size_t i = 0; i < skel.size(); ++i) CHECK((fk[i].translation - world[i].translation).norm() < 1e-12);
  }
}
