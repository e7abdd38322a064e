// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include <numbers>

#include "walkin/error.hpp"
#include "walkin/fingers.hpp"
#include "walkin/json_util.hpp"

namespace walkin {

using nlohmann::json;

namespace {

UnitQuat curl(double deg) {
  return UnitQuat::from_axis_angle(Vec3::unit_z(), -deg * std::numbers::pi / 180.0);
}

FingerChain chain(std::string name, Vec3 base, std::array<double, 3> lengths) {
  FingerChain f{std::move(name), base, {}};
  const std::array<double, 3> closed{90.0, 110.0, 90.0};
  for (std::size_t j = 0; j < 3; ++j) f.joints.push_back({UnitQuat::identity(), curl(closed[j]), lengths[j]});
  return f;
}

}  // namespace

HandModel reference_right_hand() {
  // Knuckles sit along the front of the palm, slightly staggered so every
  // finger wraps the reference controller when it is held under the palm.
  HandModel h;
  h.side = HandSide::right;
  h.palm_anchor = {UnitQuat::identity(), {0.095, -0.045, 0.0}};
  h.bone_axis = Vec3::unit_x();
  h.fingers = {
      chain("thumb", {0.1002, -0.0061, -0.05}, {0.04, 0.032, 0.025}),
      chain("index", {0.0948, -0.0082, -0.025}, {0.045, 0.026, 0.022}),
      chain("middle", {0.0908, -0.0025, -0.005}, {0.05, 0.03, 0.024}),
      chain("ring", {0.0932, -0.0057, 0.015}, {0.047, 0.028, 0.023}),
      chain("pinky", {0.0948, -0.0149, 0.033}, {0.038, 0.022, 0.02}),
  };
  return h;
}

HandModel reference_left_hand() { return mirror_hand(reference_right_hand()); }

CapsuleShape reference_controller() {
  return {{0.0, 0.0, -0.06}, {0.0, 0.0, 0.06}, 0.032, std::nullopt};
}

HandModel hand_from_json(const json& doc) {
  using json_util::number_from;
  using json_util::quat_from;
  using json_util::vec3_from;
  try {
    HandModel h;
    const std::string side = doc.value("side", "right");
    if (side != "right" && side != "left") throw FormatError("hand side must be left or right");
    h.side = side == "right" ? HandSide::right : HandSide::left;
    h.bone_axis = doc.contains("bone_axis") ? vec3_from(doc["bone_axis"], "bone_axis").normalized()
                                            : (h.side == HandSide::right ? Vec3::unit_x() : -Vec3::unit_x());
    h.palm_anchor = json_util::transform_from(doc.at("palm_anchor"), "palm_anchor");
    for (const json& jf : doc.at("fingers")) {
      FingerChain f;
      f.name = jf.at("name").get<std::string>();
      f.base = vec3_from(jf.at("base"), f.name + ".base");
      for (const json& jj : jf.at("joints")) {
        f.joints.push_back({quat_from(jj.at("open"), f.name + ".open"),
                            quat_from(jj.at("closed"), f.name + ".closed"),
                            number_from(jj.at("length"), f.name + ".length")});
      }
      h.fingers.push_back(std::move(f));
    }
    validate_hand(h);
    return h;
  } catch (const json::exception& e) {
    throw FormatError(std::string("hand model: ") + e.what());
  }
}

json hand_to_json(const HandModel& hand) {
  using json_util::to_json;
  json fingers = json::array();
  for (const FingerChain& f : hand.fingers) {
    json joints = json::array();
    for (const FingerJoint& j : f.joints) {
      joints.push_back({{"open", to_json(j.open)}, {"closed", to_json(j.closed)}, {"length", j.length}});
    }
    fingers.push_back({{"name", f.name}, {"base", to_json(f.base)}, {"joints", joints}});
  }
  return {{"side", hand.side == HandSide::right ? "right" : "left"},
          {"bone_axis", to_json(hand.bone_axis)},
          {"palm_anchor", to_json(hand.palm_anchor)},
          {"fingers", fingers}};
}

HandModel load_hand_file(const std::filesystem::path& path) {
  return hand_from_json(json_util::read_json_file(path));
}

CapsuleShape capsule_from_json(const json& doc) {
  using json_util::vec3_from;
  if (!doc.is_object()) throw FormatError("capsule must be a JSON object");
  try {
    CapsuleShape c{vec3_from(doc.at("s"), "s"), vec3_from(doc.at("e"), "e"),
                   json_util::number_from(doc.at("r"), "r"), std::nullopt};
    if (doc.contains("button")) c.button = vec3_from(doc["button"], "button");
    if (!(c.r > 0.0) || !((c.e - c.s).norm() > 0.0)) throw FormatError("degenerate capsule");
    return c;
  } catch (const json::exception& e) {
    throw FormatError(std::string("capsule: ") + e.what());
  }
}

json capsule_to_json(const CapsuleShape& shape) {
  using json_util::to_json;
  json j = {{"s", to_json(shape.s)}, {"e", to_json(shape.e)}, {"r", shape.r}};
  if (shape.button) j["button"] = to_json(*shape.button);
  return j;
}

CapsuleShape load_capsule_file(const std::filesystem::path& path) {
  return capsule_from_json(json_util::read_json_file(path));
}

}  // namespace walkin
