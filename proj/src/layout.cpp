#include "scroll/layout.hpp"

#include <cmath>
#include <fstream>

#include "scroll/errors.hpp"

namespace scroll {

namespace {

BoundingBox box_from_json(const nlohmann::json& j, const char* where) {
    if (!j.is_array() || j.size() != 4)
        throw SchemaError(std::string(where) + ": \"box\" must be [x0,y0,x1,y1]");
    for (const auto& v : j)
        if (!v.is_number())
            throw SchemaError(std::string(where) + ": box coordinates must be numbers");
    BoundingBox b{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
    if (!std::isfinite(b.x0) || !std::isfinite(b.y0) || !std::isfinite(b.x1) || !std::isfinite(b.y1))
        throw SchemaError(std::string(where) + ": box coordinates must be finite");
    return b;
}

nlohmann::json box_to_json(const BoundingBox& b) {
    return nlohmann::json::array({b.x0, b.y0, b.x1, b.y1});
}

}  // namespace

Layout layout_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("layout: root must be a JSON object");

    Layout out;
    if (!j.contains("scenes") || !j["scenes"].is_array())
        throw SchemaError("layout: missing \"scenes\" array");
    if (j["scenes"].empty())
        throw SchemaError("layout: needs at least one scene");

    out.aspect = 4.0;
    if (j.contains("aspect")) {
        if (!j["aspect"].is_number()) throw SchemaError("layout: \"aspect\" must be a number");
        out.aspect = j["aspect"].get<double>();
        if (!(out.aspect > 0.0)) throw SchemaError("layout: \"aspect\" must be positive");
    }

    if (j.contains("background")) {
        const auto& bg = j["background"];
        if (!bg.is_object() || !bg.contains("prompt") || !bg["prompt"].is_string())
            throw SchemaError("layout: \"background\" must be {\"prompt\": string}");
        out.background = bg["prompt"].get<std::string>();
    }

    for (const auto& s : j["scenes"]) {
        if (!s.is_object() || !s.contains("box") || !s.contains("prompt") || !s["prompt"].is_string())
            throw SchemaError("layout: scene needs \"box\" and string \"prompt\"");
        out.scenes.push_back({box_from_json(s["box"], "scene"), s["prompt"].get<std::string>()});
    }

    if (j.contains("objects")) {
        if (!j["objects"].is_array()) throw SchemaError("layout: \"objects\" must be an array");
        for (const auto& o : j["objects"]) {
            if (!o.is_object() || !o.contains("box") || !o.contains("prompt") ||
                !o["prompt"].is_string() || !o.contains("scene") || !o["scene"].is_number_integer())
                throw SchemaError("layout: object needs \"box\", string \"prompt\", int \"scene\"");
            out.objects.push_back({box_from_json(o["box"], "object"),
                                   o["prompt"].get<std::string>(), o["scene"].get<int>()});
        }
    }
    return out;
}

nlohmann::json layout_to_json(const Layout& layout) {
    nlohmann::json j;
    j["aspect"] = layout.aspect;
    j["background"] = {{"prompt", layout.background}};
    j["scenes"] = nlohmann::json::array();
    for (const auto& s : layout.scenes)
        j["scenes"].push_back({{"box", box_to_json(s.box)}, {"prompt", s.prompt}});
    j["objects"] = nlohmann::json::array();
    for (const auto& o : layout.objects)
        j["objects"].push_back(
            {{"box", box_to_json(o.box)}, {"prompt", o.prompt}, {"scene", o.scene}});
    return j;
}

std::string layout_to_string(const Layout& layout) {
    return layout_to_json(layout).dump(2) + "\n";
}

Layout load_layout(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open layout file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("layout file " + path + ": " + e.what());
    }
    return layout_from_json(j);
}

void save_layout(const std::string& path, const Layout& layout) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write layout file: " + path);
    out << layout_to_string(layout);
    if (!out) throw IoError("failed writing layout file: " + path);
}

void validate_layout(const Layout& layout) {
    if (layout.scenes.empty()) throw SchemaError("layout: needs at least one scene");
    const double eps = 1e-9;

    double cursor = 0.0;
    double prev_center = -1.0;
    for (std::size_t i = 0; i < layout.scenes.size(); ++i) {
        const auto& b = layout.scenes[i].box;
        if (b.x0 < -eps || b.x1 > 1.0 + eps || b.y0 < -eps || b.y1 > 1.0 + eps)
            throw SchemaError("layout: scene box out of [0,1]");
        if (b.width() <= eps || b.height() <= eps)
            throw SchemaError("layout: scene box has no area");
        if (b.center_x() < prev_center - eps)
            throw SchemaError("layout: scenes not ordered left-to-right");
        prev_center = b.center_x();
        if (std::abs(b.x0 - cursor) > 1e-6)
            throw SchemaError("layout: scenes do not tile the canvas horizontally");
        cursor = b.x1;
    }
    if (std::abs(cursor - 1.0) > 1e-6)
        throw SchemaError("layout: scenes do not reach the right edge");

    for (const auto& o : layout.objects) {
        if (o.scene < 0 || o.scene >= static_cast<int>(layout.scenes.size()))
            throw SchemaError("layout: object references a missing scene");
        const auto& s = layout.scenes[o.scene].box;
        const double ix = std::min(o.box.x1, s.x1) - std::max(o.box.x0, s.x0);
        const double iy = std::min(o.box.y1, s.y1) - std::max(o.box.y0, s.y0);
        if (ix <= 0.0 || iy <= 0.0)
            throw SchemaError("layout: object box misses its parent scene");
        if (o.box.width() <= eps || o.box.height() <= eps)
            throw SchemaError("layout: object box has no area");
    }
}

}  // namespace scroll
