// SPDX-FileCopyrightText: 2026 The walkin authors
// SPDX-License-Identifier: Apache-2.0

// JSON helpers shared by the file formats. Quaternions are written in
// canonical (w >= 0) form so traces compare byte for byte.

#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "walkin/math3d.hpp"

namespace walkin::json_util {

nlohmann::json to_json(const Vec3& v);
nlohmann::json to_json(const UnitQuat& q);
nlohmann::json to_json(const RigidTransform& t);

/// Throw FormatError (with `context` in the message) on shape mismatch.
Vec3 vec3_from(const nlohmann::json& j, const std::string& context);
UnitQuat quat_from(const nlohmann::json& j, const std::string& context);
RigidTransform transform_from(const nlohmann::json& j, const std::string& context);
double number_from(const nlohmann::json& j, const std::string& context);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace walkin::json_util
