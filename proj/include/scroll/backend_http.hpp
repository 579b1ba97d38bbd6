#pragma once

#include <string>

#include "scroll/denoiser.hpp"

namespace scroll {

// Adapter for an out-of-process denoiser, e.g. a real latent-diffusion
// server. One POST per step to <endpoint>/step with a binary frame:
//
//   request  u32le h, w, c, t, T, L
//            h*w*c f32le tile (row-major, channel-innermost)
//            L     f32le conditioning embedding
//   response h*w*c f32le denoised tile
//
// The adapter ignores the rng argument; the remote owns its sampler.
class HttpDenoiser : public Denoiser {
public:
    HttpDenoiser(std::string endpoint, WindowSize window, int channels,
                 int timeout_seconds = 120);

    void step(std::span<float> tile, int t, int total_steps,
              const Embedding& conditioning, Rng& rng) const override;

    int channels() const override { return channels_; }
    WindowSize window() const override { return window_; }

private:
    std::string endpoint_;
    WindowSize window_;
    int channels_;
    int timeout_seconds_;
};

}  // namespace scroll
