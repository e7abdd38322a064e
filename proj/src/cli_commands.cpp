// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include "walkin/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>

#include <json.hpp>

#include "walkin/calibration.hpp"
#include "walkin/error.hpp"
#include "walkin/fingers.hpp"
#include "walkin/json_util.hpp"
#include "walkin/retarget.hpp"
#include "walkin/synthetic.hpp"

namespace walkin::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Options {
  std::string skeleton;
  std::string session;
  std::string profile;
  std::string out;
  std::string truth;
  std::string mode = "exact";
  std::string script = "tpose";
  std::string script_file;
  std::string mounts = "default";
  std::string facing = "declared";
  std::string hand;
  std::string controller;
  std::uint64_t seed = 0;
  double noise = 0.0;
  double rot_noise = 0.0;
  bool no_fingers = false;
  DescentConfig descent;
};

fs::path with_suffix(const fs::path& p, const std::string& suffix) {
  fs::path out = p;
  out.replace_extension(suffix);
  return out;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

HandModel right_hand(const Options& o) {
  if (o.hand.empty()) return reference_right_hand();
  HandModel h = load_hand_file(o.hand);
  return h.side == HandSide::right ? h : mirror_hand(h);
}

CapsuleShape controller_shape(const Options& o) {
  return o.controller.empty() ? reference_controller() : load_capsule_file(o.controller);
}

// ---------------------------------------------------------------------------

int cmd_gen(const Options& o, std::ostream& out) {
  const SkeletonModel skel = load_skeleton_file(o.skeleton);
  const MotionScript script =
      o.script_file.empty() ? builtin_script(skel, o.script) : read_script_file(skel, o.script_file);
  const HandModel right = right_hand(o);
  const HandModel left = mirror_hand(right);
  if (o.mounts != "default" && o.mounts != "zero") {
    throw std::invalid_argument("--mounts must be default or zero");
  }
  const MountOffsets mounts = o.mounts == "zero" ? zero_tracker_mounts(left.palm_anchor, right.palm_anchor)
                                                 : default_mounts(left.palm_anchor, right.palm_anchor);
  const SyntheticSession gen =
      generate_synthetic_session(skel, script, mounts, {o.noise, o.rot_noise, o.seed});

  const fs::path session_path = o.out;
  const fs::path truth_path = o.truth.empty() ? with_suffix(session_path, ".truth.jsonl") : fs::path(o.truth);
  write_session(gen.session, session_path);
  write_ground_truth(gen.truth, truth_path);

  // Lateral (x) excursion of each controller over the session.
  json summary = {{"frames", gen.session.frames.size()},
                  {"duration", gen.session.frames.back().timestamp},
                  {"session", session_path.string()},
                  {"truth", truth_path.string()}};
  for (DeviceRole role : {DeviceRole::controller_left, DeviceRole::controller_right}) {
    const std::string& id = gen.device_ids[static_cast<std::size_t>(role)];
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const DeviceFrame& f : gen.session.frames) {
      const double x = f.find(id)->pose.translation.x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
    summary["lateral_excursion"][std::string(to_string(role))] = hi - lo;
  }
  out << summary.dump(2) << '\n';
  return kOk;
}

CalibrationOptions calibration_options(const Options& o) {
  CalibrationOptions c;
  if (o.facing == "declared") {
    c.roles.facing = FacingMode::declared;
  } else if (o.facing == "estimated") {
    c.roles.facing = FacingMode::estimated;
  } else {
    throw std::invalid_argument("--facing must be declared or estimated");
  }
  const HandModel right = right_hand(o);
  c.capture.palm_right = right.palm_anchor;
  c.capture.palm_left = mirror_hand(right).palm_anchor;
  return c;
}

int cmd_calibrate(const Options& o, std::ostream& out) {
  const SkeletonModel skel = load_skeleton_file(o.skeleton);
  const Session session = read_session(o.session);
  const CalibrationResult r = calibrate(session, skel, calibration_options(o));
  save_profile(r.profile, o.out);
  char line[128];
  std::snprintf(line, sizeof line, "scale %.6f", r.profile.scale);
  out << line << '\n';
  for (BodyPart part : kBodyParts) {
    const Vec3 v = r.profile.part(part).v0;
    std::snprintf(line, sizeof line, "v0 %-10s % .4f % .4f % .4f  (|v0| %.4f m)",
                  std::string(to_string(part)).c_str(), v.x, v.y, v.z, v.norm());
    out << line << '\n';
  }
  for (const std::string& d : r.diagnostics) out << "warning: " << d << '\n';
  return kOk;
}

struct SolveInputs {
  SkeletonModel skeleton;
  Session session;
  CalibrationProfile profile;
  std::optional<GroundTruth> truth;
};

SolveInputs load_solve_inputs(const Options& o) {
  SolveInputs in{load_skeleton_file(o.skeleton), read_session(o.session), load_profile(o.profile),
                 std::nullopt};
  if (!o.truth.empty()) in.truth = read_ground_truth(o.truth);
  return in;
}

json trace_line(const DeviceFrame& frame, const std::optional<SolvedPose>& solved,
                const SkeletonModel& scaled, const std::optional<std::array<HandPose, 2>>& hands) {
  using json_util::to_json;
  json line = {{"t", frame.timestamp}};
  if (!solved) {
    line["error"] = "frame could not be solved";
    return line;
  }
  json joints = json::array();
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    joints.push_back({{"name", scaled.joint(i).name},
                      {"p", to_json(solved->world[i].translation)},
                      {"q", to_json(solved->world[i].rotation)}});
  }
  line["joints"] = std::move(joints);
  line["metrics"] = {{"alpha", solved->alpha},
                     {"knee_l", solved->knee_l()},
                     {"knee_r", solved->knee_r()},
                     {"detached_l", solved->controller_detached_l},
                     {"detached_r", solved->controller_detached_r}};
  if (hands) {
    line["fingers"] = {{"left", (*hands)[0].t}, {"right", (*hands)[1].t}};
  }
  return line;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const SolveInputs in = load_solve_inputs(o);
  const OffsetMode mode = offset_mode_from_string(o.mode);
  const SessionSolve solve =
      solve_session(in.session, in.profile, in.skeleton, mode, in.truth ? &*in.truth : nullptr);
  const SkeletonModel scaled = scale_uniform(in.skeleton, in.profile.scale);

  const HandModel right = right_hand(o);
  const HandModel left = mirror_hand(right);
  const CapsuleShape controller = controller_shape(o);
  if (!o.no_fingers) validate_config(o.descent);

  std::ofstream trace(o.out, std::ios::binary);
  if (!trace) throw Error("cannot write " + o.out);
  double finger_objective_max = 0.0;
  std::size_t fingers_unconverged = 0;
  for (std::size_t i = 0; i < solve.frames.size(); ++i) {
    std::optional<std::array<HandPose, 2>> hands;
    if (!o.no_fingers && solve.frames[i]) {
      const SolvedPose& s = *solve.frames[i];
      auto grip = [&](const HandModel& hand, bool is_left) {
        const RigidTransform ctrl = attached_controller(s, scaled, in.profile, is_left);
        const JointRole wrist = is_left ? JointRole::wrist_l : JointRole::wrist_r;
        return pose_hand_on_controller(hand, s.world[scaled.index_of(wrist)],
                                       transform_capsule(ctrl, controller), o.descent);
      };
      hands = std::array<HandPose, 2>{grip(left, true), grip(right, false)};
      for (const HandPose& h : *hands) {
        for (const FingerDescentReport& r : h.fingers) {
          finger_objective_max = std::max(finger_objective_max, r.objective);
          if (!r.converged) ++fingers_unconverged;
        }
      }
    }
    trace << trace_line(in.session.frames[i], solve.frames[i], scaled, hands).dump() << '\n';
  }

  json metrics = metrics_to_json(solve.metrics);
  metrics["mode"] = to_string(mode);
  if (!o.no_fingers) {
    metrics["finger_objective_max"] = finger_objective_max;
    metrics["finger_solves_unconverged"] = fingers_unconverged;
  }
  json failures = json::array();
  for (const FrameFailure& f : solve.failures) failures.push_back({{"frame", f.frame}, {"error", f.message}});
  metrics["failures"] = failures;
  const fs::path metrics_path = with_suffix(o.out, ".metrics.json");
  json_util::write_json_file(metrics_path, metrics);
  out << metrics.dump(2) << '\n';
  return kOk;
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string compare_table(const SessionMetrics& exact, const SessionMetrics& fixed) {
  constexpr double kDeg = 180.0 / std::numbers::pi;
  struct Row {
    std::string name;
    std::function<std::string(const SessionMetrics&)> value;
  };
  auto mm = [](const std::optional<EffectorStats>& s, bool max) {
    return s ? fmt("%.2f", (max ? s->max : s->mean) * 1000.0) : std::string("n/a");
  };
  const std::vector<Row> rows = {
      {"effector error mean [mm]", [&](const SessionMetrics& m) { return mm(m.effector_error, false); }},
      {"effector error max [mm]", [&](const SessionMetrics& m) { return mm(m.effector_error, true); }},
      {"ankle error mean [mm]", [&](const SessionMetrics& m) { return mm(m.ankle_error, false); }},
      {"ankle error max [mm]", [&](const SessionMetrics& m) { return mm(m.ankle_error, true); }},
      {"knee flexion mean [deg]", [&](const SessionMetrics& m) { return fmt("%.2f", m.knee_flexion.mean * kDeg); }},
      {"knee flexion min [deg]", [&](const SessionMetrics& m) { return fmt("%.2f", m.knee_flexion_min * kDeg); }},
      {"knee flexion max [deg]", [&](const SessionMetrics& m) { return fmt("%.2f", m.knee_flexion.max * kDeg); }},
      {"spine alpha mean [deg]", [&](const SessionMetrics& m) { return fmt("%.2f", m.alpha.mean * kDeg); }},
      {"detached frames L", [&](const SessionMetrics& m) { return std::to_string(m.detached_l); }},
      {"detached frames R", [&](const SessionMetrics& m) { return std::to_string(m.detached_r); }},
  };
  std::string text;
  char line[160];
  std::snprintf(line, sizeof line, "%-26s %12s %12s\n", "metric", "exact", "fixed");
  text += line;
  for (const Row& r : rows) {
    std::snprintf(line, sizeof line, "%-26s %12s %12s\n", r.name.c_str(), r.value(exact).c_str(),
                  r.value(fixed).c_str());
    text += line;
  }
  return text;
}

int cmd_compare(const Options& o, std::ostream& out) {
  const SolveInputs in = load_solve_inputs(o);
  const GroundTruth* truth = in.truth ? &*in.truth : nullptr;
  const SessionMetrics exact =
      solve_session(in.session, in.profile, in.skeleton, OffsetMode::exact, truth).metrics;
  const SessionMetrics fixed =
      solve_session(in.session, in.profile, in.skeleton, OffsetMode::fixed, truth).metrics;

  const json doc = {{"exact", metrics_to_json(exact)}, {"fixed", metrics_to_json(fixed)}};
  json_util::write_json_file(o.out, doc);
  const std::string table = compare_table(exact, fixed);
  write_text(with_suffix(o.out, ".txt"), table);
  out << table;
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"walkin: walk-in avatar calibration and full-body retargeting"};
  app.name("walkin");
  app.require_subcommand(1);
  Options o;

  auto add_existing = [](CLI::App* cmd, const std::string& flag, std::string& target,
                         const std::string& help) {
    return cmd->add_option(flag, target, help)->required()->check(CLI::ExistingFile);
  };
  auto add_descent = [&](CLI::App* cmd) {
    cmd->add_option("--eta", o.descent.eta, "finger descent learning rate");
    cmd->add_option("--penalty", o.descent.penalty, "penetration penalty factor");
    cmd->add_option("--max-iters", o.descent.max_iters, "finger descent iteration cap");
    cmd->add_option("--hand", o.hand, "hand model JSON")->check(CLI::ExistingFile);
    cmd->add_option("--controller", o.controller, "controller capsule JSON")->check(CLI::ExistingFile);
  };

  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic session and its ground truth");
  add_existing(gen, "--skeleton", o.skeleton, "skeleton JSON of the simulated user");
  gen->add_option("--script", o.script, "tpose, squat, arms or free");
  gen->add_option("--script-file", o.script_file, "JSONL joint-pose script")->check(CLI::ExistingFile);
  gen->add_option("--noise", o.noise, "position noise sigma [m]");
  gen->add_option("--rot-noise", o.rot_noise, "rotation noise sigma [rad]");
  gen->add_option("--seed", o.seed, "noise and device-id seed");
  gen->add_option("--mounts", o.mounts, "default or zero (trackers exactly at joints)");
  gen->add_option("--truth", o.truth, "ground-truth output (default <out>.truth.jsonl)");
  gen->add_option("--hand", o.hand, "hand model JSON (palm anchors)")->check(CLI::ExistingFile);
  gen->add_option("--out", o.out, "session output")->required();

  CLI::App* cal = app.add_subcommand("calibrate", "walk-in calibration from the session's T-pose frame");
  add_existing(cal, "--skeleton", o.skeleton, "avatar skeleton JSON");
  add_existing(cal, "--session", o.session, "session JSONL");
  cal->add_option("--facing", o.facing, "declared or estimated");
  cal->add_option("--hand", o.hand, "hand model JSON (palm anchors)")->check(CLI::ExistingFile);
  cal->add_option("--out", o.out, "profile output")->required();

  CLI::App* solve = app.add_subcommand("solve", "retarget every frame of a session");
  add_existing(solve, "--skeleton", o.skeleton, "avatar skeleton JSON");
  add_existing(solve, "--session", o.session, "session JSONL");
  add_existing(solve, "--profile", o.profile, "calibration profile JSON");
  solve->add_option("--mode", o.mode, "exact or fixed")->check(CLI::IsMember({"exact", "fixed"}));
  solve->add_option("--truth", o.truth, "ground truth JSONL")->check(CLI::ExistingFile);
  solve->add_flag("--no-fingers", o.no_fingers, "skip finger posing");
  add_descent(solve);
  solve->add_option("--out", o.out, "pose trace output; metrics go to <out>.metrics.json")->required();

  CLI::App* cmp = app.add_subcommand("compare", "exact vs fixed offsets side by side");
  add_existing(cmp, "--skeleton", o.skeleton, "avatar skeleton JSON");
  add_existing(cmp, "--session", o.session, "session JSONL");
  add_existing(cmp, "--profile", o.profile, "calibration profile JSON");
  cmp->add_option("--truth", o.truth, "ground truth JSONL")->check(CLI::ExistingFile);
  cmp->add_option("--out", o.out, "metrics JSON output; table also goes to <out>.txt")->required();

  if (argc <= 1) {
    err << app.help();
    return kUsage;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kUsage;
  }

  try {
    if (*gen) return cmd_gen(o, out);
    if (*cal) return cmd_calibrate(o, out);
    if (*solve) return cmd_solve(o, out);
    if (*cmp) return cmd_compare(o, out);
  } catch (const CalibrationError& e) {
    err << "calibration failed: " << e.what() << '\n';
    return kCalibration;
  } catch (const FormatError& e) {
    err << "parse error: " << e.what() << '\n';
    return kParse;
  } catch (const ScriptError& e) {
    err << "script error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace walkin::cli
