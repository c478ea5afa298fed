// Scene files (JSON). See docs/scene_schema.md.

#pragma once

#include "ehh/integrands.hpp"

#include <json.hpp>

#include <string>

namespace ehh {

/// Throws SceneError with the offending field path.
Scene scene_from_json(const nlohmann::json& j);
Scene load_scene(const std::string& path);

nlohmann::json scene_to_json(const Scene& scene);

}  // namespace ehh
