#include "scroll/denoiser.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "scroll/errors.hpp"

namespace scroll {

ToyDenoiser::ToyDenoiser(Params params) : params_(params) {
    if (params_.window.height < 1 || params_.window.width < 1)
        throw ConfigError("toy denoiser: window must be at least 1x1");
    if (params_.channels < 1)
        throw ConfigError("toy denoiser: channels must be >= 1");
}

double ToyDenoiser::gain(int t, int total_steps) const {
    const double f = static_cast<double>(t) / total_steps;
    return params_.eta0 * (1.0 - f) + params_.eta1 * f;
}

double ToyDenoiser::noise_scale(int t, int total_steps) const {
    const double f = static_cast<double>(t) / total_steps;
    return params_.nu0 * (1.0 - f);
}

std::vector<float> ToyDenoiser::target_for(const Embedding& conditioning) const {
    // stable hash of the embedding's quantized coordinates
    std::uint64_t h = 0x5ca1ab1e0ddba11ull;
    for (double x : conditioning.v)
        h = mix64(h, static_cast<std::uint64_t>(
                         static_cast<std::int64_t>(std::llround(x * 1024.0))));

    Rng rng(h);
    const int H = params_.window.height;
    const int W = params_.window.width;
    const int C = params_.channels;

    // base level per channel, pushed away from zero so distinct prompts
    // get visibly distinct patterns
    std::vector<double> base(C);
    for (int ch = 0; ch < C; ++ch) {
        const double u = rng.uniform() * 2.0 - 1.0;
        base[ch] = (u < 0 ? -1.0 : 1.0) * (0.45 + 0.45 * std::abs(u));
    }

    // two sinusoid layers: one oriented stripe set plus smoother noise
    const double f1r = 1.0 + 3.0 * rng.uniform();
    const double f1c = 1.0 + 3.0 * rng.uniform();
    const double f2r = 0.5 + 1.0 * rng.uniform();
    const double f2c = 0.5 + 1.0 * rng.uniform();
    std::vector<double> phase1(C), phase2(C);
    for (int ch = 0; ch < C; ++ch) phase1[ch] = rng.uniform() * 6.283185307179586;
    for (int ch = 0; ch < C; ++ch) phase2[ch] = rng.uniform() * 6.283185307179586;
    const double a1 = 0.18;
    const double a2 = 0.10;

    std::vector<float> target(static_cast<std::size_t>(H) * W * C);
    const double tau = 6.283185307179586;
    for (int r = 0; r < H; ++r)
        for (int c = 0; c < W; ++c)
            for (int ch = 0; ch < C; ++ch) {
                const double s1 =
                    std::sin(tau * (f1r * r / H + f1c * c / W) + phase1[ch]);
                const double s2 =
                    std::sin(tau * (f2r * r / H + f2c * c / W) + phase2[ch]);
                const double v = std::clamp(base[ch] + a1 * s1 + a2 * s2, -0.97, 0.97);
                target[(static_cast<std::size_t>(r) * W + c) * C + ch] =
                    static_cast<float>(v);
            }
    return target;
}

void ToyDenoiser::step(std::span<float> tile, int t, int total_steps,
                       const Embedding& conditioning, Rng& rng) const {
    const std::size_t expected = static_cast<std::size_t>(params_.window.height) *
                                 params_.window.width * params_.channels;
    if (tile.size() != expected)
        throw DimensionError("toy denoiser: tile size does not match window");
    if (total_steps < 1 || t < 0 || t >= total_steps)
        throw ConfigError("toy denoiser: step index out of range");

    const std::vector<float> target = target_for(conditioning);
    const double eta = gain(t, total_steps);
    const double nu = noise_scale(t, total_steps);
    for (std::size_t i = 0; i < tile.size(); ++i) {
        double v = tile[i] + eta * (target[i] - tile[i]);
        if (nu > 0.0) v += nu * rng.normal();
        tile[i] = static_cast<float>(v);
    }
}

InitState init_noise(CanvasDims dims, int channels, std::uint64_t seed) {
    LatentCanvas canvas(dims.height, dims.width, channels);
    Rng rng(mix64(seed, 0x696e6974ull));  // init stream
    for (float& v : canvas.data) v = static_cast<float>(rng.normal());
    return {std::move(canvas), 0};
}

InitState init_from_reference(const ReferenceInit& ref, CanvasDims dims, int channels,
                              int total_steps, std::uint64_t seed) {
    if (!(ref.strength > 0.0) || ref.strength > 1.0)
        throw ConfigError("reference init: strength must lie in (0,1]");
    if (total_steps < 1)
        throw ConfigError("reference init: total steps must be >= 1");

    const int t0 = std::clamp(
        static_cast<int>(std::lround(ref.strength * total_steps)), 1, total_steps);
    const double beta = static_cast<double>(t0) / total_steps;
    const double alpha = 1.0 - beta;

    LatentCanvas canvas = image_to_canvas(ref.reference, dims, channels);
    Rng rng(mix64(seed, 0x696e6974ull));
    for (float& v : canvas.data)
        v = static_cast<float>(alpha * v + beta * rng.normal());
    return {std::move(canvas), total_steps - t0};
}

StrideSchedule default_stride_schedule(WindowSize window) {
    const int coarse = std::max(1, window.height / 2);
    const int fine = std::max(1, window.height / 4);
    return {{{0.0, 0.5, coarse}, {0.5, 1.0, fine}}};
}

namespace {

void run_windows(int count, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    const int workers = std::min(threads, count);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        });
    for (auto& th : pool) th.join();
}

}  // namespace

LatentCanvas generate(const Layout& layout, const LayerPrompts& layers,
                      const GenerateConfig& config, const Denoiser& denoiser) {
    if (config.steps < 1) throw ConfigError("generate: steps must be >= 1");
    if (config.threads < 1) throw ConfigError("generate: threads must be >= 1");
    const WindowSize window = denoiser.window();
    const int channels = denoiser.channels();
    if (config.dims.height < window.height || config.dims.width < window.width)
        throw ConfigError("generate: canvas smaller than one window");
    validate_blend_policy(config.policy);
    validate_stride_schedule(config.strides, window);
    if (layers.mg.size() != layout.scenes.size() || layers.fg.size() != layout.objects.size())
        throw ConfigError("generate: layer prompts inconsistent with layout");

    InitState init =
        config.reference
            ? init_from_reference(*config.reference, config.dims, channels, config.steps,
                                  config.seed)
            : init_noise(config.dims, channels, config.seed);
    LatentCanvas canvas = std::move(init.canvas);

    const std::vector<double> edge = edge_matrix(config.edge, window);
    std::map<int, WindowPlan> plans;  // per-stride cache

    for (int t = init.first_step; t < config.steps; ++t) {
        const int stride = stride_for_step(config.strides, t, config.steps);
        auto it = plans.find(stride);
        if (it == plans.end())
            it = plans.emplace(stride, plan_windows(config.dims, window, stride)).first;
        const WindowPlan& plan = it->second;

        std::vector<std::vector<float>> tiles(plan.windows.size());
        std::string failure;
        std::mutex failure_mutex;
        run_windows(plan.count(), config.threads, [&](int i) {
            try {
                const WindowRect& rect = plan.windows[i];
                const Embedding& y = select_embedding(rect, t, config.steps, layout,
                                                      config.dims, layers, config.policy);
                std::vector<float> tile = canvas.extract(rect);
                Rng rng = substream(config.seed, static_cast<std::uint64_t>(t),
                                    static_cast<std::uint64_t>(i));
                denoiser.step(tile, t, config.steps, y, rng);
                tiles[i] = std::move(tile);
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (failure.empty())
                    failure = "step " + std::to_string(t) + ", window " + std::to_string(i) +
                              ": " + e.what();
            }
        });
        if (!failure.empty()) throw BackendError(failure);

        FuseResult fused = fuse_step(canvas, plan, edge, window, tiles);
        canvas = std::move(fused.canvas);
        if (!canvas.all_finite())
            throw BackendError("step " + std::to_string(t) + ": non-finite canvas values");
    }
    return canvas;
}

}  // namespace scroll
