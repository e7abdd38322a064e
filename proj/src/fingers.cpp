// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include "walkin/fingers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "walkin/error.hpp"

namespace walkin {

void validate_capsule(const CapsuleShape& shape) {
  if (!(shape.r > 0.0)) throw std::invalid_argument("capsule radius must be positive");
  if (!((shape.e - shape.s).norm() > 0.0)) {
    throw std::invalid_argument("capsule end points coincide");
  }
}

double capsule_sdf(const CapsuleShape& shape, const Vec3& p) {
  const Vec3 v1 = p - shape.s;
  const Vec3 v2 = shape.e - shape.s;
  const double h = std::clamp(v1.dot(v2) / v2.dot(v2), 0.0, 1.0);
  return (v1 - v2 * h).norm() - shape.r;
}

CapsuleShape transform_capsule(const RigidTransform& g, const CapsuleShape& shape) {
  CapsuleShape out{g.apply(shape.s), g.apply(shape.e), shape.r, std::nullopt};
  if (shape.button) out.button = g.apply(*shape.button);
  return out;
}

std::size_t HandModel::parameter_count() const {
  std::size_t n = 0;
  for (const FingerChain& f : fingers) n += f.joints.size();
  return n;
}

std::size_t HandModel::parameter_offset(std::size_t f) const {
  std::size_t n = 0;
  for (std::size_t i = 0; i < f; ++i) n += fingers.at(i).joints.size();
  return n;
}

void validate_hand(const HandModel& hand) {
  if (hand.fingers.empty()) throw FormatError("hand model has no fingers");
  auto unit = [](const UnitQuat& q) { return q.is_finite() && std::abs(q.norm() - 1.0) < 1e-6; };
  for (const FingerChain& f : hand.fingers) {
    if (f.joints.empty()) throw FormatError("finger '" + f.name + "' has no joints");
    for (const FingerJoint& j : f.joints) {
      if (!unit(j.open) || !unit(j.closed)) {
        throw FormatError("finger '" + f.name + "' has a non-unit rotation");
      }
      if (!(j.length > 0.0)) throw FormatError("finger '" + f.name + "' has a non-positive segment");
    }
  }
}

namespace {

Vec3 mirror(const Vec3& v) { return {-v.x, v.y, v.z}; }
// Conjugating a rotation by the x-reflection keeps the angle and maps the
// axis (a pseudovector) to (ax, -ay, -az).
UnitQuat mirror(const UnitQuat& q) { return {q.w, q.x, -q.y, -q.z}; }

}  // namespace

HandModel mirror_hand(const HandModel& hand) {
  HandModel out = hand;
  out.side = hand.side == HandSide::right ? HandSide::left : HandSide::right;
  out.palm_anchor = {mirror(hand.palm_anchor.rotation), mirror(hand.palm_anchor.translation)};
  out.bone_axis = mirror(hand.bone_axis);
  for (FingerChain& f : out.fingers) {
    f.base = mirror(f.base);
    for (FingerJoint& j : f.joints) {
      j.open = mirror(j.open);
      j.closed = mirror(j.closed);
    }
  }
  return out;
}

CapsuleShape mirror_capsule(const CapsuleShape& shape) {
  CapsuleShape out{mirror(shape.s), mirror(shape.e), shape.r, std::nullopt};
  if (shape.button) out.button = mirror(*shape.button);
  return out;
}

std::vector<UnitQuat> finger_rotations(const FingerChain& finger, std::span<const double> t) {
  if (t.size() != finger.joints.size()) {
    throw std::invalid_argument("parameter count does not match finger '" + finger.name + "'");
  }
  std::vector<UnitQuat> out;
  out.reserve(t.size());
  for (std::size_t j = 0; j < t.size(); ++j) {
    out.push_back(slerp(finger.joints[j].open, finger.joints[j].closed, t[j]));
  }
  return out;
}

std::vector<Vec3> finger_joint_positions(const HandModel& hand, std::size_t f,
                                         std::span<const double> t) {
  const FingerChain& finger = hand.fingers.at(f);
  const std::vector<UnitQuat> local = finger_rotations(finger, t);
  std::vector<Vec3> out;
  out.reserve(local.size());
  UnitQuat rot;
  Vec3 p = finger.base;
  for (std::size_t j = 0; j < local.size(); ++j) {
    rot = rot * local[j];
    p += rot.rotate(hand.bone_axis * finger.joints[j].length);
    out.push_back(p);
  }
  return out;
}

double penalized_distance(double sdf, double penalty) {
  return std::abs(sdf >= 0.0 ? sdf : penalty * sdf);
}

double finger_objective(const HandModel& hand, std::size_t f, std::span<const double> t,
                        const CapsuleShape& shape, const ObjectiveOptions& options) {
  const std::vector<Vec3> pos = finger_joint_positions(hand, f, t);
  double d = 0.0;
  for (const Vec3& p : pos) d += penalized_distance(capsule_sdf(shape, p), options.penalty);
  if (options.button_weight > 0.0 && shape.button && hand.fingers[f].name == "thumb") {
    d += options.button_weight * distance(pos.back(), *shape.button);
  }
  return d;
}

void validate_config(const DescentConfig& config) {
  if (!(config.eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (!(config.penalty > 1.0)) throw std::invalid_argument("penalty must be greater than 1");
  if (!(config.fd_step > 0.0)) throw std::invalid_argument("fd_step must be positive");
  if (config.max_iters <= 0) throw std::invalid_argument("max_iters must be positive");
  if (!(config.converge_tol > 0.0)) throw std::invalid_argument("converge_tol must be positive");
  if (config.button_weight < 0.0) throw std::invalid_argument("button_weight must be non-negative");
}

namespace {

ObjectiveOptions objective_options(const DescentConfig& config) {
  return {config.penalty, config.button_weight};
}

double partial(const HandModel& hand, std::size_t f, std::vector<double>& t, std::size_t k,
               const CapsuleShape& shape, const ObjectiveOptions& options, double h) {
  const double saved = t[k];
  t[k] = saved + h;
  const double plus = finger_objective(hand, f, t, shape, options);
  t[k] = saved - h;
  const double minus = finger_objective(hand, f, t, shape, options);
  t[k] = saved;
  return (plus - minus) / (2.0 * h);
}

// Step sizes below this cannot move a parameter measurably.
constexpr double kMinStep = 1e-12;

}  // namespace

std::vector<double> objective_gradient(const HandModel& hand, std::size_t f,
                                       std::span<const double> t, const CapsuleShape& shape,
                                       const ObjectiveOptions& options, double h) {
  std::vector<double> tt(t.begin(), t.end());
  std::vector<double> g(tt.size());
  for (std::size_t k = 0; k < tt.size(); ++k) g[k] = partial(hand, f, tt, k, shape, options, h);
  return g;
}

FingerDescentState start_descent(const HandModel& hand, std::size_t f, std::span<const double> t0,
                                 const CapsuleShape& shape, const DescentConfig& config) {
  FingerDescentState s;
  s.t.assign(t0.begin(), t0.end());
  for (double& v : s.t) v = std::clamp(v, 0.0, 1.0);
  s.step.assign(s.t.size(), config.eta);
  s.objective = finger_objective(hand, f, s.t, shape, objective_options(config));
  return s;
}

double descent_sweep(const HandModel& hand, std::size_t f, FingerDescentState& state,
                     const CapsuleShape& shape, const DescentConfig& config) {
  const ObjectiveOptions opts = objective_options(config);
  const double before = state.objective;
  if (config.schedule == DescentSchedule::simultaneous) {
    const std::vector<double> g = objective_gradient(hand, f, state.t, shape, opts, config.fd_step);
    for (std::size_t k = 0; k < g.size(); ++k) {
      state.t[k] = std::clamp(state.t[k] - config.eta * g[k], 0.0, 1.0);
    }
    state.objective = finger_objective(hand, f, state.t, shape, opts);
    return before - state.objective;
  }
  for (std::size_t k = 0; k < state.t.size(); ++k) {
    const double g = partial(hand, f, state.t, k, shape, opts, config.fd_step);
    const double saved = state.t[k];
    state.t[k] = std::clamp(saved - state.step[k] * g, 0.0, 1.0);
    const double trial = finger_objective(hand, f, state.t, shape, opts);
    if (trial > state.objective) {
      state.t[k] = saved;
      state.step[k] *= 0.5;
    } else {
      state.objective = trial;
    }
  }
  return before - state.objective;
}

DescentResult descend(const HandModel& hand, const FingerParams& t0, const CapsuleShape& shape,
                      const DescentConfig& config) {
  validate_config(config);
  validate_capsule(shape);
  if (t0.size() != hand.parameter_count()) {
    throw std::invalid_argument("parameter vector does not match the hand model");
  }
  DescentResult result;
  result.t = t0;
  for (std::size_t f = 0; f < hand.fingers.size(); ++f) {
    const std::size_t off = hand.parameter_offset(f);
    const std::size_t n = hand.fingers[f].joints.size();
    FingerDescentState state =
        start_descent(hand, f, std::span(t0).subspan(off, n), shape, config);

    FingerDescentReport report;
    report.history.push_back(state.objective);
    for (int it = 0; it < config.max_iters; ++it) {
      const std::vector<double> step_before = state.step;
      const double change = descent_sweep(hand, f, state, shape, config);
      report.iterations = it + 1;
      report.history.push_back(state.objective);
      // A sweep with a rejected step says nothing about convergence yet.
      const bool rejected = state.step != step_before;
      const double largest_step = *std::max_element(state.step.begin(), state.step.end());
      if ((!rejected && std::abs(change) < config.converge_tol) || largest_step < kMinStep) {
        report.converged = true;
        break;
      }
    }
    report.objective = state.objective;
    std::copy(state.t.begin(), state.t.end(), result.t.begin() + static_cast<std::ptrdiff_t>(off));
    result.fingers.push_back(std::move(report));
  }
  return result;
}

HandPose pose_hand_on_controller(const HandModel& hand, const RigidTransform& wrist_world,
                                 const CapsuleShape& controller_world,
                                 const DescentConfig& config) {
  validate_capsule(controller_world);
  // SDF values are rigid-motion invariant, so work in the wrist frame.
  const CapsuleShape local = transform_capsule(wrist_world.inverse(), controller_world);

  HandPose pose;
  const FingerParams open(hand.parameter_count(), 0.0);

  // A finger cannot touch a capsule farther from its knuckle than its length.
  bool reachable = false;
  for (const FingerChain& f : hand.fingers) {
    double reach = 0.0;
    for (const FingerJoint& j : f.joints) reach += j.length;
    if (capsule_sdf(local, f.base) <= reach) reachable = true;
  }

  if (!reachable) {
    pose.out_of_reach = true;
    pose.t.assign(hand.parameter_count(), 1.0);
    const ObjectiveOptions opts = objective_options(config);
    double worst = 0.0;
    for (std::size_t f = 0; f < hand.fingers.size(); ++f) {
      const auto t = std::span(pose.t).subspan(hand.parameter_offset(f), hand.fingers[f].joints.size());
      FingerDescentReport report;
      report.objective = finger_objective(hand, f, t, local, opts);
      worst = std::max(worst, report.objective);
      pose.fingers.push_back(report);
    }
    pose.diagnostics.push_back("controller out of reach; hand closed, terminal objective " +
                               std::to_string(worst));
  } else {
    DescentResult r = descend(hand, open, local, config);
    pose.t = std::move(r.t);
    pose.fingers = std::move(r.fingers);
    for (std::size_t f = 0; f < hand.fingers.size(); ++f) {
      if (!pose.fingers[f].converged) {
        pose.diagnostics.push_back("finger '" + hand.fingers[f].name + "' did not converge in " +
                                   std::to_string(config.max_iters) + " iterations");
      }
    }
  }

  for (std::size_t f = 0; f < hand.fingers.size(); ++f) {
    const auto t = std::span(pose.t).subspan(hand.parameter_offset(f), hand.fingers[f].joints.size());
    pose.rotations.push_back(finger_rotations(hand.fingers[f], t));
  }
  return pose;
}

}  // namespace walkin
