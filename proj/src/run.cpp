#include "scroll/run.hpp"

#include <cstdlib>
#include <fstream>
#include <memory>

#include "scroll/backend_http.hpp"
#include "scroll/errors.hpp"
#include "scroll/tensor_io.hpp"

namespace scroll {

void validate_run_config(const RunConfig& config) {
    if (config.layout_path.empty())
        throw ConfigError("--layout is required");
    if (config.out_prefix.empty())
        throw ConfigError("--out is required");
    if (config.steps < 1)
        throw ConfigError("--steps must be a positive integer");
    if (config.width < 1 || config.height < 1)
        throw ConfigError("--width and --height must be positive");
    if (config.threads < 1)
        throw ConfigError("--threads must be >= 1");
    if (config.scale < 1)
        throw ConfigError("scale must be >= 1");
    if (config.backend != "toy" && config.backend != "external")
        throw ConfigError("--backend must be toy or external");
    if (!config.ref_path.empty() && (!(config.ref_strength > 0.0) || config.ref_strength > 1.0))
        throw ConfigError("--ref-strength must lie in (0,1]");
    validate_blend_policy(config.policy);
}

nlohmann::json run_config_to_json(const RunConfig& c) {
    nlohmann::json j;
    j["layout"] = c.layout_path;
    j["out"] = c.out_prefix;
    j["width"] = c.width;
    j["height"] = c.height;
    j["steps"] = c.steps;
    j["seed"] = c.seed;
    j["edge"] = {{"kind", to_string(c.edge.kind)},
                 {"margin", c.edge.margin},
                 {"sigma", c.edge.sigma},
                 {"floor", c.edge.floor}};
    j["strides"] = c.strides;
    j["policy"] = {{"fg_fraction", c.policy.fg_fraction},
                   {"bg_every", c.policy.bg_every},
                   {"object_overlap_threshold", c.policy.object_overlap_threshold},
                   {"strengthen_weight", c.policy.strengthen_weight}};
    j["backend"] = c.backend;
    j["backend_endpoint"] = c.backend_endpoint;
    j["ref"] = c.ref_path;
    j["ref_strength"] = c.ref_strength;
    j["threads"] = c.threads;
    j["scale"] = c.scale;
    return j;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    try {
        c.layout_path = j.value("layout", c.layout_path);
        c.out_prefix = j.value("out", c.out_prefix);
        c.width = j.value("width", c.width);
        c.height = j.value("height", c.height);
        c.steps = j.value("steps", c.steps);
        c.seed = j.value("seed", c.seed);
        if (j.contains("edge")) {
            const auto& e = j["edge"];
            c.edge.kind = edge_kind_from_string(e.value("kind", to_string(c.edge.kind)));
            c.edge.margin = e.value("margin", c.edge.margin);
            c.edge.sigma = e.value("sigma", c.edge.sigma);
            c.edge.floor = e.value("floor", c.edge.floor);
        }
        c.strides = j.value("strides", c.strides);
        if (j.contains("policy")) {
            const auto& p = j["policy"];
            c.policy.fg_fraction = p.value("fg_fraction", c.policy.fg_fraction);
            c.policy.bg_every = p.value("bg_every", c.policy.bg_every);
            c.policy.object_overlap_threshold =
                p.value("object_overlap_threshold", c.policy.object_overlap_threshold);
            c.policy.strengthen_weight =
                p.value("strengthen_weight", c.policy.strengthen_weight);
        }
        c.backend = j.value("backend", c.backend);
        c.backend_endpoint = j.value("backend_endpoint", c.backend_endpoint);
        c.ref_path = j.value("ref", c.ref_path);
        c.ref_strength = j.value("ref_strength", c.ref_strength);
        c.threads = j.value("threads", c.threads);
        c.scale = j.value("scale", c.scale);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file " + path + ": " + e.what());
    }
    return run_config_from_json(j);
}

GenerateConfig generate_config_from(const RunConfig& config, const Denoiser& denoiser) {
    GenerateConfig g;
    g.dims = {config.height, config.width};
    g.steps = config.steps;
    g.seed = config.seed;
    g.edge = config.edge;
    g.strides = config.strides.empty() ? default_stride_schedule(denoiser.window())
                                       : parse_stride_schedule(config.strides);
    g.policy = config.policy;
    g.threads = config.threads;
    if (!config.ref_path.empty())
        g.reference = ReferenceInit{read_image(config.ref_path), config.ref_strength};
    return g;
}

LatentCanvas generate_canvas(const RunConfig& config) {
    validate_run_config(config);
    const Layout layout = load_layout(config.layout_path);
    validate_layout(layout);

    std::unique_ptr<Denoiser> denoiser;
    if (config.backend == "toy") {
        denoiser = std::make_unique<ToyDenoiser>();
    } else {
        std::string endpoint = config.backend_endpoint;
        if (endpoint.empty()) {
            const char* env = std::getenv("SCROLL_BACKEND_ENDPOINT");
            endpoint = env ? env : "";
        }
        denoiser = std::make_unique<HttpDenoiser>(endpoint, WindowSize{64, 64}, 4);
    }

    const ToyEmbedder embedder;
    const LayerPrompts layers = build_layer_prompts(layout, embedder, config.policy);
    const GenerateConfig g = generate_config_from(config, *denoiser);
    return generate(layout, layers, g, *denoiser);
}

RunOutputs run_generation(const RunConfig& config) {
    const LatentCanvas canvas = generate_canvas(config);

    RunOutputs out;
    out.tensor_path = config.out_prefix + ".tensor";
    out.png_path = config.out_prefix + ".png";
    out.meta_path = config.out_prefix + ".meta.json";

    write_tensor(out.tensor_path, canvas);
    write_png(out.png_path, canvas_to_image(canvas, config.scale));

    std::ofstream meta(out.meta_path, std::ios::binary);
    if (!meta) throw IoError("cannot write meta file: " + out.meta_path);
    meta << run_config_to_json(config).dump(2) << "\n";
    if (!meta) throw IoError("failed writing meta file: " + out.meta_path);
    return out;
}

}  // namespace scroll
