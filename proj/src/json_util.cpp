// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

#include "walkin/json_util.hpp"

#include <cmath>
#include <fstream>

#include "walkin/error.hpp"

namespace walkin::json_util {

using nlohmann::json;

json to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json to_json(const UnitQuat& q) {
  const UnitQuat c = q.canonical();
  return json::array({c.w, c.x, c.y, c.z});
}

json to_json(const RigidTransform& t) {
  return json{{"translation", to_json(t.translation)}, {"rotation", to_json(t.rotation)}};
}

double number_from(const json& j, const std::string& context) {
  if (!j.is_number()) throw FormatError(context + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw FormatError(context + ": non-finite number");
  return v;
}

Vec3 vec3_from(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 3) throw FormatError(context + ": expected [x, y, z]");
  return {number_from(j[0], context), number_from(j[1], context), number_from(j[2], context)};
}

UnitQuat quat_from(const json& j, const std::string& context) {
  if (!j.is_array() || j.size() != 4) throw FormatError(context + ": expected [w, x, y, z]");
  const UnitQuat q{number_from(j[0], context), number_from(j[1], context),
                   number_from(j[2], context), number_from(j[3], context)};
  // Hand-authored files carry a few digits only; anything further off is a bug.
  if (std::abs(q.norm() - 1.0) > 1e-3) throw FormatError(context + ": quaternion is not unit");
  // Already-unit values pass through untouched so files round-trip exactly.
  return std::abs(q.norm() - 1.0) < 1e-14 ? q : q.normalized();
}

RigidTransform transform_from(const json& j, const std::string& context) {
  if (!j.is_object()) throw FormatError(context + ": expected a transform object");
  RigidTransform t;
  if (j.contains("translation")) t.translation = vec3_from(j["translation"], context + ".translation");
  if (j.contains("rotation")) t.rotation = quat_from(j["rotation"], context + ".rotation");
  return t;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace walkin::json_util
