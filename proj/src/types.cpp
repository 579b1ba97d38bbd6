#include "scroll/types.hpp"

#include <algorithm>
#include <cmath>

#include "scroll/errors.hpp"

namespace scroll {

WindowRect intersect(const WindowRect& a, const WindowRect& b) {
    const int top = std::max(a.top, b.top);
    const int left = std::max(a.left, b.left);
    const int bottom = std::min(a.bottom(), b.bottom());
    const int right = std::min(a.right(), b.right());
    if (bottom <= top || right <= left) return {top, left, 0, 0};
    return {top, left, bottom - top, right - left};
}

WindowRect region_of(const BoundingBox& box, CanvasDims dims) {
    if (dims.height <= 0 || dims.width <= 0)
        throw DimensionError("region_of: canvas dims must be positive");

    auto rnd = [](double x) { return static_cast<int>(std::lround(x)); };

    int top = rnd(box.y0 * dims.height);
    int left = rnd(box.x0 * dims.width);
    int h = std::max(1, rnd((box.y1 - box.y0) * dims.height));
    int w = std::max(1, rnd((box.x1 - box.x0) * dims.width));

    top = std::clamp(top, 0, dims.height - 1);
    left = std::clamp(left, 0, dims.width - 1);
    h = std::clamp(h, 1, dims.height - top);
    w = std::clamp(w, 1, dims.width - left);
    return {top, left, h, w};
}

BoundingBox box_of(const WindowRect& rect, CanvasDims dims) {
    if (dims.height <= 0 || dims.width <= 0)
        throw DimensionError("box_of: canvas dims must be positive");
    return {static_cast<double>(rect.left) / dims.width,
            static_cast<double>(rect.top) / dims.height,
            static_cast<double>(rect.right()) / dims.width,
            static_cast<double>(rect.bottom()) / dims.height};
}

bool LatentCanvas::all_finite() const {
    for (float v : data)
        if (!std::isfinite(v)) return false;
    return true;
}

std::vector<float> LatentCanvas::extract(const WindowRect& rect) const {
    if (rect.top < 0 || rect.left < 0 || rect.bottom() > height || rect.right() > width)
        throw DimensionError("extract: window outside canvas");
    std::vector<float> tile(static_cast<std::size_t>(rect.height) * rect.width * channels);
    std::size_t k = 0;
    for (int r = rect.top; r < rect.bottom(); ++r) {
        const float* row = &data[(static_cast<std::size_t>(r) * width + rect.left) * channels];
        const std::size_t n = static_cast<std::size_t>(rect.width) * channels;
        std::copy(row, row + n, tile.begin() + k);
        k += n;
    }
    return tile;
}

double Embedding::norm() const {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

bool Embedding::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double dot(const Embedding& a, const Embedding& b) {
    if (a.dim() != b.dim())
        throw DimensionError("dot: embedding dimensions differ");
    double s = 0.0;
    for (int i = 0; i < a.dim(); ++i) s += a.v[i] * b.v[i];
    return s;
}

double cosine(const Embedding& a, const Embedding& b) {
    const double na = a.norm();
    const double nb = b.norm();
    if (na <= 0.0 || nb <= 0.0)
        throw DimensionError("cosine: zero-norm embedding");
    // rounding can push a self-comparison a hair past 1
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

Embedding normalized(Embedding e) {
    const double n = e.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw DimensionError("normalized: embedding norm must be positive and finite");
    for (double& x : e.v) x /= n;
    return e;
}

}  // namespace scroll
