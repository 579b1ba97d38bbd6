#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "scroll/types.hpp"

namespace scroll {

struct SceneSpec {
    BoundingBox box;
    std::string prompt;
};

struct ObjectSpec {
    BoundingBox box;
    std::string prompt;
    int scene = 0;  // index into Layout::scenes
};

// Scene and object boxes with prompts at background / midground /
// foreground levels. Boxes are fractional so a layout reuses across
// resolutions.
struct Layout {
    double aspect = 4.0;           // width : height
    std::string background;       // global style prompt
    std::vector<SceneSpec> scenes;
    std::vector<ObjectSpec> objects;
};

// JSON schema (field names are a wire contract):
// { "aspect": number,
//   "background": {"prompt": string},
//   "scenes":  [{"box": [x0,y0,x1,y1], "prompt": string}],
//   "objects": [{"box": [x0,y0,x1,y1], "prompt": string, "scene": int}] }
Layout layout_from_json(const nlohmann::json& j);
nlohmann::json layout_to_json(const Layout& layout);

Layout load_layout(const std::string& path);
void save_layout(const std::string& path, const Layout& layout);

// Serialized form used for files (2-space indent, trailing newline).
std::string layout_to_string(const Layout& layout);

// Checks the post-repair invariants: at least one scene, scenes sorted
// left-to-right and covering [0,1] horizontally, every object box
// intersecting its parent scene. Throws SchemaError on violation.
void validate_layout(const Layout& layout);

}  // namespace scroll
