#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "scroll/errors.hpp"
#include "scroll/layout_predict.hpp"
#include "scroll/metrics.hpp"
#include "scroll/run.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitBackend = 3;
constexpr int kExitIo = 4;
constexpr int kExitPrediction = 5;

int fail(int code, const std::string& message) {
    std::cerr << "error: " << message << "\n";
    return code;
}

int run_command(const scroll::RunConfig& config) {
    try {
        scroll::validate_run_config(config);
    } catch (const scroll::Error& e) {
        return fail(kExitConfig, e.what());
    }
    try {
        const auto out = scroll::run_generation(config);
        std::cout << out.tensor_path << "\n" << out.png_path << "\n" << out.meta_path << "\n";
        return 0;
    } catch (const scroll::ConfigError& e) {
        return fail(kExitConfig, e.what());
    } catch (const scroll::SchemaError& e) {
        return fail(kExitConfig, e.what());
    } catch (const scroll::BackendError& e) {
        return fail(kExitBackend, e.what());
    } catch (const scroll::IoError& e) {
        return fail(kExitIo, e.what());
    } catch (const scroll::Error& e) {
        return fail(kExitConfig, e.what());
    }
}

int metrics_command(const std::string& image_path, const std::string& layout_path,
                    const std::string& gt_path, const std::string& out_path,
                    int strip_width) {
    try {
        const scroll::ImageF image = scroll::to_float(scroll::read_image(image_path));
        const scroll::Layout layout = scroll::load_layout(layout_path);

        std::optional<scroll::ImageF> gt;
        if (!gt_path.empty()) gt = scroll::to_float(scroll::read_image(gt_path));

        const scroll::ToyEmbedder embedder;
        const scroll::SeamSmoothnessScorer scorer;
        const scroll::MetricReport report = scroll::compute_report(
            image, layout, gt ? &*gt : nullptr, embedder, scorer, strip_width);

        const std::string text = scroll::report_to_json(report).dump(2) + "\n";
        std::cout << text;
        const std::string path = out_path.empty() ? image_path + ".metrics.json" : out_path;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw scroll::IoError("cannot write report: " + path);
        out << text;
        return 0;
    } catch (const scroll::SchemaError& e) {
        return fail(kExitConfig, e.what());
    } catch (const scroll::ConfigError& e) {
        return fail(kExitConfig, e.what());
    } catch (const scroll::Error& e) {
        return fail(kExitIo, e.what());
    }
}

int layout_command(const std::string& story_path, const std::string& mode,
                   const std::string& fixture, const std::string& out_path,
                   const std::string& endpoint, double aspect, int max_scenes,
                   int timeout_seconds) {
    scroll::StoryRequest req;
    req.aspect = aspect;
    req.max_scenes = max_scenes;
    req.fixture_path = fixture;
    if (mode == "fixture")
        req.mode = scroll::LayoutMode::fixture;
    else if (mode == "llm")
        req.mode = scroll::LayoutMode::llm;
    else
        return fail(kExitConfig, "--mode must be fixture or llm");

    {
        std::ifstream story(story_path, std::ios::binary);
        if (!story) return fail(kExitIo, "cannot open story file: " + story_path);
        std::ostringstream text;
        text << story.rdbuf();
        req.story = text.str();
    }

    const std::string out =
        out_path.empty() ? story_path + ".layout.json" : out_path;

    try {
        std::unique_ptr<scroll::LlmTransport> transport;
        if (req.mode == scroll::LayoutMode::llm) {
            if (!endpoint.empty())
                transport = std::make_unique<scroll::HttpLlmTransport>(
                    endpoint, std::getenv("SCROLL_LLM_KEY") ? std::getenv("SCROLL_LLM_KEY") : "",
                    timeout_seconds);
            else
                transport = scroll::HttpLlmTransport::from_env(timeout_seconds);
        }
        const auto result = scroll::predict_layout(req, transport.get());
        scroll::save_layout(out, result.layout);
        std::cout << result.layout.scenes.size() << " scenes\n";
        return 0;
    } catch (const scroll::PredictionError& e) {
        // dump every raw response beside the output path for audit
        for (std::size_t i = 0; i < e.raw_responses().size(); ++i) {
            std::ofstream raw(out + ".raw" + std::to_string(i) + ".txt", std::ios::binary);
            raw << e.raw_responses()[i];
        }
        return fail(kExitPrediction, e.what());
    } catch (const scroll::TransportError& e) {
        return fail(kExitPrediction, e.what());
    } catch (const scroll::ConfigError& e) {
        return fail(kExitConfig, e.what());
    } catch (const scroll::Error& e) {
        return fail(kExitIo, e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"scroll: wide-canvas latent generation, metrics, and layout prediction"};
    app.require_subcommand(1);

    // ---- run ----
    auto* run = app.add_subcommand("run", "generate a canvas from a layout");
    scroll::RunConfig config;
    config.threads = static_cast<int>(std::thread::hardware_concurrency());
    if (config.threads < 1) config.threads = 1;
    std::string config_path, edge_kind = "cosine", strides;

    run->add_option("--config", config_path, "meta.json from a previous run; flags override");
    auto* layout_opt = run->add_option("--layout", config.layout_path, "layout JSON file");
    auto* out_opt = run->add_option("--out", config.out_prefix, "output path prefix");
    auto* steps_opt = run->add_option("--steps", config.steps, "denoising steps");
    auto* seed_opt = run->add_option("--seed", config.seed, "master seed");
    auto* width_opt = run->add_option("--width", config.width, "latent canvas width");
    auto* height_opt = run->add_option("--height", config.height, "latent canvas height");
    auto* edge_opt = run->add_option("--edge", edge_kind, "edge profile: linear|cosine|gaussian");
    auto* margin_opt = run->add_option("--edge-margin", config.edge.margin, "edge margin in cells");
    auto* sigma_opt = run->add_option("--edge-sigma", config.edge.sigma, "gaussian sigma in cells");
    auto* strides_opt = run->add_option("--strides", strides, "schedule f0:f1:s,...");
    auto* fg_opt = run->add_option("--fg-fraction", config.policy.fg_fraction,
                                   "foreground phase fraction");
    auto* bg_opt = run->add_option("--bg-every", config.policy.bg_every,
                                   "background conditioning every k-th step");
    auto* backend_opt = run->add_option("--backend", config.backend, "toy|external");
    auto* endpoint_opt = run->add_option("--backend-endpoint", config.backend_endpoint,
                                         "external backend URL");
    auto* ref_opt = run->add_option("--ref", config.ref_path, "reference image");
    auto* refs_opt = run->add_option("--ref-strength", config.ref_strength,
                                     "reference noising strength in (0,1]");
    auto* threads_opt = run->add_option("--threads", config.threads, "worker threads");
    auto* scale_opt = run->add_option("--scale", config.scale, "latent->pixel export factor");

    // ---- metrics ----
    auto* metrics = app.add_subcommand("metrics", "score an image against its layout");
    std::string m_image, m_layout, m_gt, m_out, m_embedder = "toy";
    int m_strip = 64;
    metrics->add_option("--image", m_image, "image to score")->required();
    metrics->add_option("--layout", m_layout, "layout JSON file")->required();
    metrics->add_option("--ground-truth", m_gt, "ground-truth image");
    metrics->add_option("--embedder", m_embedder, "embedder (toy)")
        ->check(CLI::IsMember({"toy"}));
    metrics->add_option("--out", m_out, "report path (default <image>.metrics.json)");
    metrics->add_option("--strip-width", m_strip, "boundary strip width in pixels");

    // ---- layout ----
    auto* layout = app.add_subcommand("layout", "predict a layout from a story");
    std::string l_story, l_mode = "fixture", l_fixture, l_out, l_endpoint;
    double l_aspect = 4.0;
    int l_max_scenes = 6, l_timeout = 30;
    layout->add_option("--story", l_story, "story text file")->required();
    layout->add_option("--mode", l_mode, "fixture|llm");
    layout->add_option("--fixture", l_fixture, "layout JSON fixture (fixture mode)");
    layout->add_option("--out", l_out, "output path (default <story>.layout.json)");
    layout->add_option("--endpoint", l_endpoint, "LLM endpoint (default SCROLL_LLM_ENDPOINT)");
    layout->add_option("--aspect", l_aspect, "canvas aspect ratio");
    layout->add_option("--max-scenes", l_max_scenes, "scene budget");
    layout->add_option("--timeout", l_timeout, "transport timeout in seconds");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }

    if (run->parsed()) {
        if (!config_path.empty()) {
            // start from the saved config; explicit flags win
            scroll::RunConfig loaded;
            try {
                loaded = scroll::load_run_config(config_path);
            } catch (const scroll::Error& e) {
                return fail(kExitIo, e.what());
            }
            if (!*layout_opt) config.layout_path = loaded.layout_path;
            if (!*out_opt) config.out_prefix = loaded.out_prefix;
            if (!*steps_opt) config.steps = loaded.steps;
            if (!*seed_opt) config.seed = loaded.seed;
            if (!*width_opt) config.width = loaded.width;
            if (!*height_opt) config.height = loaded.height;
            if (!*edge_opt) edge_kind = to_string(loaded.edge.kind);
            if (!*margin_opt) config.edge.margin = loaded.edge.margin;
            if (!*sigma_opt) config.edge.sigma = loaded.edge.sigma;
            config.edge.floor = loaded.edge.floor;
            if (!*strides_opt) strides = loaded.strides;
            if (!*fg_opt) config.policy.fg_fraction = loaded.policy.fg_fraction;
            if (!*bg_opt) config.policy.bg_every = loaded.policy.bg_every;
            config.policy.object_overlap_threshold = loaded.policy.object_overlap_threshold;
            config.policy.strengthen_weight = loaded.policy.strengthen_weight;
            if (!*backend_opt) config.backend = loaded.backend;
            if (!*endpoint_opt) config.backend_endpoint = loaded.backend_endpoint;
            if (!*ref_opt) config.ref_path = loaded.ref_path;
            if (!*refs_opt) config.ref_strength = loaded.ref_strength;
            if (!*threads_opt) config.threads = loaded.threads;
            if (!*scale_opt) config.scale = loaded.scale;
        }
        try {
            config.edge.kind = scroll::edge_kind_from_string(edge_kind);
        } catch (const scroll::Error& e) {
            return fail(kExitConfig, e.what());
        }
        config.strides = strides;
        return run_command(config);
    }
    if (metrics->parsed())
        return metrics_command(m_image, m_layout, m_gt, m_out, m_strip);
    return layout_command(l_story, l_mode, l_fixture, l_out, l_endpoint, l_aspect,
                          l_max_scenes, l_timeout);
}
