#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "scroll/denoiser.hpp"
#include "scroll/fusion.hpp"

namespace scroll {

// Fully resolved generation run. Serialized as <prefix>.meta.json;
// re-running from that file reproduces the tensor byte-for-byte.
struct RunConfig {
    std::string layout_path;
    std::string out_prefix;
    int width = 256;   // latent cols
    int height = 64;   // latent rows
    int steps = 50;
    std::uint64_t seed = 0;
    EdgeProfile edge{};
    std::string strides;  // "f0:f1:s,..."; empty means the default schedule
    BlendPolicy policy{};
    std::string backend = "toy";  // toy | external
    std::string backend_endpoint;
    std::string ref_path;
    double ref_strength = 0.6;
    int threads = 1;
    int scale = 8;  // latent -> pixel export factor
};

void validate_run_config(const RunConfig& config);

nlohmann::json run_config_to_json(const RunConfig& config);
RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

struct RunOutputs {
    std::string tensor_path;
    std::string png_path;
    std::string meta_path;
};

// The end-to-end pipeline behind `scroll run`: load layout, embed the
// prompt layers, generate, and write <prefix>.tensor / .png /
// .meta.json.
RunOutputs run_generation(const RunConfig& config);

// Pieces reused by tests and the acceptance suite.
GenerateConfig generate_config_from(const RunConfig& config, const Denoiser& denoiser);
LatentCanvas generate_canvas(const RunConfig& config);

}  // namespace scroll
