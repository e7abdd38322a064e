// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

// Finger posing against a capsule-shaped controller. Every finger joint
// interpolates between an open and a closed local rotation; the
// interpolation factors are descended on the distance of the joints to the
// capsule surface.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "walkin/math3d.hpp"

namespace walkin {

struct CapsuleShape {
  Vec3 s;
  Vec3 e{0.0, 1.0, 0.0};
  double r = 0.1;
  /// Optional thumb target point on the surface.
  std::optional<Vec3> button;
};

/// Throws std::invalid_argument unless r > 0 and s != e.
void validate_capsule(const CapsuleShape& shape);

/// Signed distance to the capsule surface, negative inside.
double capsule_sdf(const CapsuleShape& shape, const Vec3& p);

CapsuleShape transform_capsule(const RigidTransform& g, const CapsuleShape& shape);

enum class HandSide { left, right };

struct FingerJoint {
  UnitQuat open;
  UnitQuat closed;
  /// Length of the segment that starts at this joint.
  double length = 0.0;
};

struct FingerChain {
  std::string name;
  /// First joint position, wrist-local.
  Vec3 base;
  std::vector<FingerJoint> joints;
};

/// One hand in its wrist frame. Segments extend along `bone_axis` (+X for
/// the right hand, -X for the left) rotated by the accumulated joint
/// rotations.
struct HandModel {
  HandSide side = HandSide::right;
  /// Controller center target, wrist-local.
  RigidTransform palm_anchor;
  Vec3 bone_axis{1.0, 0.0, 0.0};
  std::vector<FingerChain> fingers;

  std::size_t parameter_count() const;
  /// Index of finger f's first parameter in a FingerParams vector.
  std::size_t parameter_offset(std::size_t f) const;
};

/// Throws FormatError when a rotation is not unit, a length is not positive
/// or a finger has no joints.
void validate_hand(const HandModel& hand);

/// Reflection across the wrist's x = 0 plane (right hand <-> left hand).
HandModel mirror_hand(const HandModel& hand);
CapsuleShape mirror_capsule(const CapsuleShape& shape);

/// Built-in right hand: five fingers of three joints, fingers along +X,
/// palm facing -Y, thumb on the -Z side.
HandModel reference_right_hand();
HandModel reference_left_hand();
/// Controller capsule in its own frame (axis along Z, centered).
CapsuleShape reference_controller();

HandModel hand_from_json(const nlohmann::json& doc);
nlohmann::json hand_to_json(const HandModel& hand);
HandModel load_hand_file(const std::filesystem::path& path);
CapsuleShape capsule_from_json(const nlohmann::json& doc);
nlohmann::json capsule_to_json(const CapsuleShape& shape);
CapsuleShape load_capsule_file(const std::filesystem::path& path);

/// Interpolation factors in [0, 1], one per finger joint, fingers in model
/// order.
using FingerParams = std::vector<double>;

/// Wrist-local local rotations of finger f for the factors `t`.
std::vector<UnitQuat> finger_rotations(const FingerChain& finger, std::span<const double> t);

/// Wrist-local positions pos_f^j: the end of each segment j.
std::vector<Vec3> finger_joint_positions(const HandModel& hand, std::size_t f,
                                         std::span<const double> t);

/// Negative distances are multiplied by `penalty` before taking |.|.
double penalized_distance(double sdf, double penalty);

struct ObjectiveOptions {
  double penalty = 10.0;
  /// Weight of the thumb-tip-to-button term; 0 disables it. Only applies to
  /// a finger named "thumb" and a capsule with a button.
  double button_weight = 0.0;
};

/// d_f: sum over the finger's joints of the penalized absolute SDF (shape in
/// the wrist frame), plus the optional button term for the thumb.
double finger_objective(const HandModel& hand, std::size_t f, std::span<const double> t,
                        const CapsuleShape& shape, const ObjectiveOptions& options = {});

enum class DescentSchedule {
  /// Gauss-Seidel sweep over the finger's parameters; a step that raises
  /// the objective is rejected and that parameter's step size halved.
  sequential_safeguarded,
  /// Plain simultaneous update of all the finger's parameters.
  simultaneous,
};

struct DescentConfig {
  double eta = 0.1;
  double penalty = 10.0;
  double fd_step = 1e-3;
  int max_iters = 200;
  double converge_tol = 1e-6;
  DescentSchedule schedule = DescentSchedule::sequential_safeguarded;
  /// Thumb-button weight (0 = surface only).
  double button_weight = 0.0;
};

/// Throws std::invalid_argument unless eta, fd_step, max_iters and
/// converge_tol are positive and penalty > 1.
void validate_config(const DescentConfig& config);

/// Descent state of one finger; enough to resume, so a caller can run one
/// sweep per rendered frame.
struct FingerDescentState {
  std::vector<double> t;
  std::vector<double> step;
  double objective = 0.0;
};

FingerDescentState start_descent(const HandModel& hand, std::size_t f, std::span<const double> t0,
                                 const CapsuleShape& shape, const DescentConfig& config);

/// One update sweep. Returns the change in objective (old - new).
double descent_sweep(const HandModel& hand, std::size_t f, FingerDescentState& state,
                     const CapsuleShape& shape, const DescentConfig& config);

/// Central finite-difference gradient of d_f.
std::vector<double> objective_gradient(const HandModel& hand, std::size_t f,
                                       std::span<const double> t, const CapsuleShape& shape,
                                       const ObjectiveOptions& options, double h);

struct FingerDescentReport {
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective after every sweep, starting with the initial value.
  std::vector<double> history;
};

struct DescentResult {
  FingerParams t;
  std::vector<FingerDescentReport> fingers;
};

/// Runs every finger to convergence or max_iters. Deterministic.
DescentResult descend(const HandModel& hand, const FingerParams& t0, const CapsuleShape& shape,
                      const DescentConfig& config = {});

struct HandPose {
  FingerParams t;
  /// Local rotations per finger joint.
  std::vector<std::vector<UnitQuat>> rotations;
  std::vector<FingerDescentReport> fingers;
  /// The capsule is beyond reach of every finger; the hand is closed.
  bool out_of_reach = false;
  std::vector<std::string> diagnostics;
};

/// Grips a controller placed in the world by descending from the open hand.
HandPose pose_hand_on_controller(const HandModel& hand, const RigidTransform& wrist_world,
                                 const CapsuleShape& controller_world,
                                 const DescentConfig& config = {});

}  // namespace walkin
