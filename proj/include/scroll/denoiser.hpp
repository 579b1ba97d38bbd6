#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "scroll/blend.hpp"
#include "scroll/fusion.hpp"
#include "scroll/image.hpp"
#include "scroll/layout.hpp"
#include "scroll/rng.hpp"
#include "scroll/types.hpp"

namespace scroll {

// One reverse-diffusion step on a standard-size tile, conditioned on a
// prompt embedding. Implementations must be deterministic given
// (tile, t, T, embedding, rng state) and safe to call concurrently
// across windows.
class Denoiser {
public:
    virtual ~Denoiser() = default;

    // Denoises the tile in place. `tile` holds window().height x
    // window().width x channels() floats, row-major, channel-innermost.
    virtual void step(std::span<float> tile, int t, int total_steps,
                      const Embedding& conditioning, Rng& rng) const = 0;

    virtual int channels() const = 0;
    virtual WindowSize window() const = 0;
};

// Analytic stand-in for a trained denoiser. Each embedding hashes to a
// procedural target pattern; every step moves the tile toward that
// target with a gain that grows over the run while injected noise
// decays to zero:
//   tile += eta(t) * (target - tile) + nu(t) * g
//   eta(t) = eta0*(1 - t/T) + eta1*(t/T),  nu(t) = nu0*(1 - t/T)
class ToyDenoiser : public Denoiser {
public:
    struct Params {
        double eta0 = 0.08;
        double eta1 = 0.35;
        double nu0 = 0.05;
        WindowSize window{64, 64};
        int channels = 3;
    };

    ToyDenoiser() = default;
    explicit ToyDenoiser(Params params);

    void step(std::span<float> tile, int t, int total_steps,
              const Embedding& conditioning, Rng& rng) const override;

    int channels() const override { return params_.channels; }
    WindowSize window() const override { return params_.window; }
    const Params& params() const { return params_; }

    // The pattern a given embedding converges to; exposed so tests can
    // compare region statistics against an independent oracle.
    std::vector<float> target_for(const Embedding& conditioning) const;

    double gain(int t, int total_steps) const;
    double noise_scale(int t, int total_steps) const;

private:
    Params params_;
};

// SDEdit-style initialization: a reference image partially noised so
// denoising keeps its colors and layout.
struct ReferenceInit {
    Image reference;
    double strength = 0.6;  // in (0,1]; the fraction of steps re-run
};

struct InitState {
    LatentCanvas canvas;
    int first_step = 0;  // generation runs t = first_step .. T-1
};

InitState init_noise(CanvasDims dims, int channels, std::uint64_t seed);

// Noises the encoded reference by beta = t0/T where t0 = round(s*T):
// canvas = (1 - t0/T) * latent + (t0/T) * g. The run then executes the
// remaining t0 steps. strength 1 discards the reference entirely.
InitState init_from_reference(const ReferenceInit& ref, CanvasDims dims, int channels,
                              int total_steps, std::uint64_t seed);

struct GenerateConfig {
    CanvasDims dims{64, 256};
    int steps = 50;
    std::uint64_t seed = 0;
    EdgeProfile edge;
    StrideSchedule strides;
    BlendPolicy policy;
    int threads = 1;
    std::optional<ReferenceInit> reference;
};

// Default coarse-to-fine schedule for a window: stride H/2 for the
// first half of the run, H/4 for the rest.
StrideSchedule default_stride_schedule(WindowSize window);

// The full multi-layered denoising loop: per step, covers the canvas
// with sliding windows at the scheduled stride, denoises each window
// under its selected layer embedding, and fuses the edge-weighted tiles
// back into the canvas. Bitwise deterministic for a given (inputs,
// seed), independent of the thread count.
LatentCanvas generate(const Layout& layout, const LayerPrompts& layers,
                      const GenerateConfig& config, const Denoiser& denoiser);

}  // namespace scroll
