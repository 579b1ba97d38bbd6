#include "scroll/layout_predict.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "scroll/errors.hpp"

namespace scroll {

HttpLlmTransport::HttpLlmTransport(std::string endpoint, std::string api_key,
                                   int timeout_seconds)
    : endpoint_(std::move(endpoint)), api_key_(std::move(api_key)),
      timeout_seconds_(timeout_seconds) {
    if (endpoint_.empty())
        throw ConfigError("llm transport: endpoint is empty (set SCROLL_LLM_ENDPOINT)");
}

std::unique_ptr<HttpLlmTransport> HttpLlmTransport::from_env(int timeout_seconds) {
    const char* endpoint = std::getenv("SCROLL_LLM_ENDPOINT");
    const char* key = std::getenv("SCROLL_LLM_KEY");
    return std::make_unique<HttpLlmTransport>(endpoint ? endpoint : "", key ? key : "",
                                              timeout_seconds);
}

std::string HttpLlmTransport::send(const std::string& prompt) {
    // split "http://host:port/path"
    std::string rest = endpoint_;
    const auto scheme = rest.find("://");
    if (scheme != std::string::npos) rest = rest.substr(scheme + 3);
    std::string path = "/";
    const auto slash = rest.find('/');
    if (slash != std::string::npos) {
        path = rest.substr(slash);
        rest = rest.substr(0, slash);
    }

    httplib::Client client(rest);
    client.set_connection_timeout(timeout_seconds_, 0);
    client.set_read_timeout(timeout_seconds_, 0);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    const nlohmann::json body = {{"prompt", prompt}};
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res)
        throw TransportError("llm transport: cannot reach " + endpoint_);
    if (res->status != 200)
        throw TransportError("llm transport: HTTP " + std::to_string(res->status) +
                             " from " + endpoint_);
    return res->body;
}

void validate_story_request(const StoryRequest& req) {
    if (req.story.empty())
        throw ConfigError("story request: story text is empty");
    if (!(req.aspect > 0.0))
        throw ConfigError("story request: aspect must be positive");
    if (req.max_scenes < 1 || req.max_scenes > 12)
        throw ConfigError("story request: max scenes must lie in [1, 12]");
    if (req.mode == LayoutMode::fixture && req.fixture_path.empty())
        throw ConfigError("story request: fixture mode needs a fixture file");
}

std::string build_prompt(const StoryRequest& req) {
    validate_story_request(req);
    std::ostringstream os;
    os << "You segment a story into an image layout for one very wide picture.\n"
       << "Split the story into scenes in narrative order and pick the key objects of "
          "each scene. Scenes must tile the canvas left-to-right in story order, "
          "covering the full width; each scene spans the full height. Use at most "
       << req.max_scenes << " scenes. The canvas aspect ratio (width:height) is "
       << req.aspect << ".\n\n"
       << "Answer with exactly one JSON object, no prose, matching this schema:\n"
       << "{\"aspect\": number, \"background\": {\"prompt\": string}, "
          "\"scenes\": [{\"box\": [x0, y0, x1, y1], \"prompt\": string}], "
          "\"objects\": [{\"box\": [x0, y0, x1, y1], \"prompt\": string, \"scene\": int}]}\n"
       << "Box coordinates are fractions of the canvas in [0,1] with x0 < x1 and "
          "y0 < y1. \"scene\" is the index of the object's parent scene. You may also "
          "add optional \"genre\" and \"style\" string fields.\n\n"
       << "Example 1.\nStory: A lone sailboat leaves the harbor at dawn and glides "
          "toward a lighthouse on the cliffs.\nAnswer:\n"
       << "{\"aspect\": 4.0, \"background\": {\"prompt\": \"soft dawn light, calm sea\"}, "
          "\"scenes\": [{\"box\": [0.0, 0.0, 0.5, 1.0], \"prompt\": \"a harbor at dawn\"}, "
          "{\"box\": [0.5, 0.0, 1.0, 1.0], \"prompt\": \"a lighthouse on high cliffs\"}], "
          "\"objects\": [{\"box\": [0.15, 0.45, 0.35, 0.8], \"prompt\": \"a lone sailboat\", "
          "\"scene\": 0}]}\n\n"
       << "Example 2.\nStory: Deep in the forest a fox finds a glowing lantern, follows "
          "fireflies across a stream, and rests under an ancient oak.\nAnswer:\n"
       << "{\"aspect\": 4.0, \"background\": {\"prompt\": \"dusky woodland, storybook "
          "style\"}, \"scenes\": [{\"box\": [0.0, 0.0, 0.34, 1.0], \"prompt\": \"a dark "
          "forest clearing\"}, {\"box\": [0.34, 0.0, 0.67, 1.0], \"prompt\": \"a stream "
          "with fireflies\"}, {\"box\": [0.67, 0.0, 1.0, 1.0], \"prompt\": \"an ancient "
          "oak tree\"}], \"objects\": [{\"box\": [0.05, 0.5, 0.2, 0.9], \"prompt\": \"a "
          "red fox\", \"scene\": 0}, {\"box\": [0.1, 0.35, 0.22, 0.6], \"prompt\": \"a "
          "glowing lantern\", \"scene\": 0}]}\n\n"
       << "Story: " << req.story << "\nAnswer:\n";
    return os.str();
}

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

BoundingBox clamp_box(const BoundingBox& b) {
    BoundingBox out;
    out.x0 = clamp01(std::min(b.x0, b.x1));
    out.x1 = clamp01(std::max(b.x0, b.x1));
    out.y0 = clamp01(std::min(b.y0, b.y1));
    out.y1 = clamp01(std::max(b.y0, b.y1));
    return out;
}

double overlap_area(const BoundingBox& a, const BoundingBox& b) {
    const double ix = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    const double iy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    return ix > 0.0 && iy > 0.0 ? ix * iy : 0.0;
}

}  // namespace

Layout repair_layout(const Layout& layout) {
    constexpr double kMinSize = 1e-9;
    Layout out;
    out.aspect = layout.aspect > 0.0 ? layout.aspect : 4.0;
    out.background = layout.background;

    // clamp scene boxes, drop the degenerate, remember original indices
    struct Scene {
        SceneSpec spec;
        int original;
    };
    std::vector<Scene> scenes;
    for (std::size_t i = 0; i < layout.scenes.size(); ++i) {
        SceneSpec s = layout.scenes[i];
        s.box = clamp_box(s.box);
        if (s.box.width() > kMinSize) scenes.push_back({s, static_cast<int>(i)});
    }
    if (scenes.empty())
        throw SchemaError("repair: no scene with usable width");

    std::stable_sort(scenes.begin(), scenes.end(), [](const Scene& a, const Scene& b) {
        return a.spec.box.center_x() < b.spec.box.center_x();
    });

    // stretch into a contiguous horizontal tiling: boundaries at the
    // midpoint of each gap or overlap, clamped monotone
    const std::size_t n = scenes.size();
    std::vector<double> bounds(n + 1);
    bounds[0] = 0.0;
    bounds[n] = 1.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double raw = 0.5 * (scenes[i - 1].spec.box.x1 + scenes[i].spec.box.x0);
        bounds[i] = std::clamp(raw, bounds[i - 1], 1.0);
    }

    std::vector<int> scene_map(layout.scenes.size(), -1);
    for (std::size_t i = 0; i < n; ++i) {
        if (bounds[i + 1] - bounds[i] <= kMinSize) continue;  // squeezed out
        SceneSpec s = scenes[i].spec;
        s.box = {bounds[i], 0.0, bounds[i + 1], 1.0};  // full-height strip
        scene_map[scenes[i].original] = static_cast<int>(out.scenes.size());
        out.scenes.push_back(s);
    }
    if (out.scenes.empty())
        throw SchemaError("repair: no scene with usable width");

    // objects keep an intersecting parent, otherwise move to the scene
    // they overlap most; orphans with no overlap anywhere are dropped
    for (const auto& obj : layout.objects) {
        ObjectSpec o = obj;
        o.box = clamp_box(o.box);
        if (o.box.width() <= kMinSize || o.box.height() <= kMinSize) continue;

        int parent = -1;
        if (o.scene >= 0 && o.scene < static_cast<int>(scene_map.size()))
            parent = scene_map[o.scene];
        if (parent >= 0 && overlap_area(o.box, out.scenes[parent].box) <= 0.0)
            parent = -1;
        if (parent < 0) {
            double best = 0.0;
            for (std::size_t s = 0; s < out.scenes.size(); ++s) {
                const double a = overlap_area(o.box, out.scenes[s].box);
                if (a > best) {
                    best = a;
                    parent = static_cast<int>(s);
                }
            }
            if (best <= 0.0) continue;  // misses every scene
        }
        o.scene = parent;
        out.objects.push_back(o);
    }
    return out;
}

std::string extract_json_object(const std::string& text) {
    const std::size_t start = text.find('{');
    if (start == std::string::npos) return {};
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '{')
            ++depth;
        else if (c == '}') {
            --depth;
            if (depth == 0) return text.substr(start, i - start + 1);
        }
    }
    return {};
}

PredictResult predict_layout(const StoryRequest& req, LlmTransport* transport) {
    validate_story_request(req);

    if (req.mode == LayoutMode::fixture) {
        PredictResult out;
        out.layout = repair_layout(load_layout(req.fixture_path));
        return out;
    }

    if (!transport)
        throw ConfigError("predict_layout: llm mode needs a transport");

    constexpr int kMaxAttempts = 3;
    const std::string base_prompt = build_prompt(req);
    const std::string correction =
        "\nYour previous answer was not a valid layout JSON object. Answer again with "
        "exactly one JSON object matching the schema, and nothing else.\n";

    PredictResult out;
    std::string prompt = base_prompt;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        RawLayoutResponse raw;
        raw.text = transport->send(prompt);

        const std::string json_text = extract_json_object(raw.text);
        if (!json_text.empty()) {
            try {
                const nlohmann::json j = nlohmann::json::parse(json_text);
                Layout parsed = layout_from_json(j);
                raw.parse_ok = true;
                if (j.contains("genre") && j["genre"].is_string())
                    raw.genre_hint = j["genre"].get<std::string>();
                if (j.contains("style") && j["style"].is_string())
                    raw.style_hint = j["style"].get<std::string>();
                out.responses.push_back(raw);
                out.layout = repair_layout(parsed);
                validate_layout(out.layout);
                return out;
            } catch (const SchemaError&) {
                raw.parse_ok = false;
            } catch (const nlohmann::json::exception&) {
                raw.parse_ok = false;
            }
        }
        out.responses.push_back(raw);
        prompt = base_prompt + correction;
    }

    std::vector<std::string> raw_texts;
    raw_texts.reserve(out.responses.size());
    for (const auto& r : out.responses) raw_texts.push_back(r.text);
    throw PredictionError("layout prediction failed after " +
                              std::to_string(kMaxAttempts) + " attempts",
                          std::move(raw_texts));
}

}  // namespace scroll
