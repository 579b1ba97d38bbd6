#pragma once

#include <span>
#include <string>
#include <vector>

#include "scroll/types.hpp"

namespace scroll {

// Coarse-to-fine window strides mapped onto run fractions. Entries are
// contiguous, cover [0,1), and strides never increase.
struct StrideEntry {
    double from_fraction = 0.0;
    double to_fraction = 1.0;
    int stride = 1;
};

struct StrideSchedule {
    std::vector<StrideEntry> entries;
};

// Throws ConfigError unless the entries tile [0,1) contiguously with
// non-increasing strides in [1, min(H, W)].
void validate_stride_schedule(const StrideSchedule& schedule, WindowSize window);

// Parses "f0:f1:s,f1:f2:s,..." as used by the CLI --strides flag.
StrideSchedule parse_stride_schedule(const std::string& text);
std::string stride_schedule_to_string(const StrideSchedule& schedule);

enum class EdgeKind { linear, cosine, gaussian };

EdgeKind edge_kind_from_string(const std::string& name);
std::string to_string(EdgeKind kind);

// Per-cell confidence weights applied to each denoised window before
// fusion. Weights are separable, 1 at the window center band, and
// never drop below the floor.
struct EdgeProfile {
    EdgeKind kind = EdgeKind::cosine;
    int margin = 16;       // cells, linear/cosine
    double sigma = 16.0;   // cells, gaussian
    double floor = 1e-4;
};

// H*W row-major weight grid for the given profile.
std::vector<double> edge_matrix(const EdgeProfile& profile, WindowSize window);

// The sliding-window cover of the canvas at one stride.
struct WindowPlan {
    std::vector<WindowRect> windows;
    int stride = 1;

    int count() const { return static_cast<int>(windows.size()); }
};

// Window origins at multiples of the stride, plus an edge-flush origin
// per axis when the stride does not divide evenly. Every canvas cell is
// covered. Throws DimensionError when the window exceeds the canvas.
WindowPlan plan_windows(CanvasDims dims, WindowSize window, int stride);

// The stride whose fraction interval contains t/T.
int stride_for_step(const StrideSchedule& schedule, int t, int total_steps);

struct FuseResult {
    LatentCanvas canvas;
    // Per-cell total weight (the weighted-average denominator), kept
    // for audit; always >= the edge floor on covered cells.
    std::vector<double> weight_sum;
};

// Fuses per-window denoised tiles into the next canvas state: each cell
// becomes the edge-weighted average of every tile covering it. Tiles
// are accumulated in ascending window-index order, so the result is
// bitwise deterministic.
FuseResult fuse_step(const LatentCanvas& canvas, const WindowPlan& plan,
                     std::span<const double> edge, WindowSize window,
                     const std::vector<std::vector<float>>& denoised_tiles);

}  // namespace scroll
