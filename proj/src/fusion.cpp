#include "scroll/fusion.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>

#include "scroll/errors.hpp"

namespace scroll {

void validate_stride_schedule(const StrideSchedule& schedule, WindowSize window) {
    if (schedule.entries.empty())
        throw ConfigError("stride schedule: needs at least one entry");
    const int max_stride = std::min(window.height, window.width);
    double cursor = 0.0;
    int prev_stride = max_stride;
    for (const auto& e : schedule.entries) {
        if (std::abs(e.from_fraction - cursor) > 1e-9)
            throw ConfigError("stride schedule: entries must tile [0,1) contiguously");
        if (!(e.to_fraction > e.from_fraction))
            throw ConfigError("stride schedule: empty fraction interval");
        if (e.stride < 1 || e.stride > max_stride)
            throw ConfigError("stride schedule: stride must lie in [1, min(H, W)]");
        if (e.stride > prev_stride)
            throw ConfigError("stride schedule: strides must be coarse-to-fine");
        prev_stride = e.stride;
        cursor = e.to_fraction;
    }
    if (std::abs(cursor - 1.0) > 1e-9)
        throw ConfigError("stride schedule: entries must cover [0,1)");
}

StrideSchedule parse_stride_schedule(const std::string& text) {
    StrideSchedule out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        StrideEntry e;
        char c1 = 0, c2 = 0;
        std::stringstream es(item);
        if (!(es >> e.from_fraction >> c1 >> e.to_fraction >> c2 >> e.stride) ||
            c1 != ':' || c2 != ':' || (es >> std::ws, !es.eof()))
            throw ConfigError("stride schedule: cannot parse entry \"" + item +
                              "\" (expected from:to:stride)");
        out.entries.push_back(e);
    }
    if (out.entries.empty())
        throw ConfigError("stride schedule: no entries in \"" + text + "\"");
    return out;
}

std::string stride_schedule_to_string(const StrideSchedule& schedule) {
    std::ostringstream os;
    for (std::size_t i = 0; i < schedule.entries.size(); ++i) {
        const auto& e = schedule.entries[i];
        if (i) os << ',';
        os << e.from_fraction << ':' << e.to_fraction << ':' << e.stride;
    }
    return os.str();
}

EdgeKind edge_kind_from_string(const std::string& name) {
    if (name == "linear") return EdgeKind::linear;
    if (name == "cosine") return EdgeKind::cosine;
    if (name == "gaussian") return EdgeKind::gaussian;
    throw ConfigError("unknown edge profile \"" + name + "\"");
}

std::string to_string(EdgeKind kind) {
    switch (kind) {
        case EdgeKind::linear: return "linear";
        case EdgeKind::cosine: return "cosine";
        case EdgeKind::gaussian: return "gaussian";
    }
    return "cosine";
}

namespace {

// 1-D profile along one axis. d is the cell's distance to the nearer
// edge; the profile reaches 1 once d >= margin.
std::vector<double> axis_profile(const EdgeProfile& p, int n) {
    std::vector<double> w(n, 1.0);
    switch (p.kind) {
        case EdgeKind::linear:
        case EdgeKind::cosine: {
            if (p.margin == 0) break;
            for (int i = 0; i < n; ++i) {
                const int d = std::min(i, n - 1 - i);
                if (d >= p.margin) continue;
                const double r = static_cast<double>(d) / p.margin;
                w[i] = (p.kind == EdgeKind::linear)
                           ? r
                           : 0.5 * (1.0 - std::cos(3.14159265358979323846 * r));
            }
            break;
        }
        case EdgeKind::gaussian: {
            const double center = 0.5 * (n - 1);
            double peak = 0.0;
            for (int i = 0; i < n; ++i) {
                const double u = i - center;
                w[i] = std::exp(-(u * u) / (2.0 * p.sigma * p.sigma));
                peak = std::max(peak, w[i]);
            }
            // rescale so the center band is exactly 1 on even-sized axes
            for (double& x : w) x /= peak;
            break;
        }
    }
    return w;
}

}  // namespace

std::vector<double> edge_matrix(const EdgeProfile& profile, WindowSize window) {
    if (window.height < 1 || window.width < 1)
        throw DimensionError("edge_matrix: window must be at least 1x1");
    if (!(profile.floor > 0.0) || profile.floor > 1.0)
        throw ConfigError("edge_matrix: floor must lie in (0, 1]");
    if (profile.kind != EdgeKind::gaussian) {
        if (profile.margin < 0)
            throw ConfigError("edge_matrix: margin must be non-negative");
        if (2 * profile.margin > std::min(window.height, window.width))
            throw ConfigError("edge_matrix: margin exceeds half the window side");
    } else if (!(profile.sigma > 0.0)) {
        throw ConfigError("edge_matrix: sigma must be positive");
    }

    const std::vector<double> pr = axis_profile(profile, window.height);
    const std::vector<double> pc = axis_profile(profile, window.width);
    std::vector<double> w(static_cast<std::size_t>(window.height) * window.width);
    for (int r = 0; r < window.height; ++r)
        for (int c = 0; c < window.width; ++c)
            w[static_cast<std::size_t>(r) * window.width + c] =
                std::max(profile.floor, pr[r] * pc[c]);
    return w;
}

WindowPlan plan_windows(CanvasDims dims, WindowSize window, int stride) {
    if (window.height > dims.height || window.width > dims.width)
        throw DimensionError("plan_windows: window larger than canvas");
    if (window.height < 1 || window.width < 1)
        throw DimensionError("plan_windows: window must be at least 1x1");
    if (stride < 1) throw DimensionError("plan_windows: stride must be >= 1");
    // consecutive origins must overlap or touch, or cells fall through
    if (stride > std::min(window.height, window.width))
        throw DimensionError("plan_windows: stride exceeds the window side");

    auto origins = [stride](int canvas, int win) {
        std::vector<int> o;
        const int last = canvas - win;
        for (int p = 0; p <= last; p += stride) o.push_back(p);
        if (o.back() != last) o.push_back(last);  // edge-flush extra window
        return o;
    };

    WindowPlan plan;
    plan.stride = stride;
    for (int top : origins(dims.height, window.height))
        for (int left : origins(dims.width, window.width))
            plan.windows.push_back({top, left, window.height, window.width});
    return plan;
}

int stride_for_step(const StrideSchedule& schedule, int t, int total_steps) {
    if (total_steps < 1 || t < 0 || t >= total_steps)
        throw ConfigError("stride_for_step: step index out of range");
    const double f = static_cast<double>(t) / total_steps;
    for (const auto& e : schedule.entries)
        if (f >= e.from_fraction && f < e.to_fraction) return e.stride;
    return schedule.entries.back().stride;
}

FuseResult fuse_step(const LatentCanvas& canvas, const WindowPlan& plan,
                     std::span<const double> edge, WindowSize window,
                     const std::vector<std::vector<float>>& denoised_tiles) {
    const int H = window.height;
    const int W = window.width;
    const int C = canvas.channels;
    if (plan.windows.size() != denoised_tiles.size())
        throw DimensionError("fuse_step: one tile per window required");
    if (edge.size() != static_cast<std::size_t>(H) * W)
        throw DimensionError("fuse_step: edge grid does not match window size");

    const std::size_t tile_len = static_cast<std::size_t>(H) * W * C;
    for (const auto& t : denoised_tiles)
        if (t.size() != tile_len)
            throw DimensionError("fuse_step: tile size does not match window");

    std::vector<double> num(canvas.size(), 0.0);
    std::vector<double> den(static_cast<std::size_t>(canvas.height) * canvas.width, 0.0);

    for (std::size_t i = 0; i < plan.windows.size(); ++i) {
        const WindowRect& rect = plan.windows[i];
        if (rect.height != H || rect.width != W)
            throw DimensionError("fuse_step: plan window size mismatch");
        if (rect.bottom() > canvas.height || rect.right() > canvas.width)
            throw DimensionError("fuse_step: window outside canvas");
        const std::vector<float>& tile = denoised_tiles[i];
        for (int r = 0; r < H; ++r) {
            const int cr = rect.top + r;
            for (int c = 0; c < W; ++c) {
                const int cc = rect.left + c;
                const double w = edge[static_cast<std::size_t>(r) * W + c];
                const std::size_t cell = static_cast<std::size_t>(cr) * canvas.width + cc;
                den[cell] += w;
                const std::size_t src = (static_cast<std::size_t>(r) * W + c) * C;
                double* dst = &num[cell * C];
                const float* s = &tile[src];
                for (int ch = 0; ch < C; ++ch) dst[ch] += w * s[ch];
            }
        }
    }

    FuseResult out;
    out.canvas = LatentCanvas(canvas.height, canvas.width, C);
    // Any covering window contributes at least the edge floor, so a
    // denominator below min(edge) means an uncovered cell.
    const double min_weight = *std::min_element(edge.begin(), edge.end());
    for (std::size_t cell = 0; cell < den.size(); ++cell) {
        if (!(den[cell] >= min_weight))
            throw DimensionError("fuse_step: uncovered canvas cell");
        for (int ch = 0; ch < C; ++ch)
            out.canvas.data[cell * C + ch] = static_cast<float>(num[cell * C + ch] / den[cell]);
    }
    out.weight_sum = std::move(den);
    return out;
}

}  // namespace scroll
