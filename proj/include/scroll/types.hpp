#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace scroll {

struct CanvasDims {
    int height = 0;  // latent rows H'
    int width = 0;   // latent cols W'
};

struct WindowSize {
    int height = 0;  // H
    int width = 0;   // W
};

// Rectangle in latent cell coordinates, fully inside its canvas.
struct WindowRect {
    int top = 0;
    int left = 0;
    int height = 0;
    int width = 0;

    int bottom() const { return top + height; }   // exclusive
    int right() const { return left + width; }    // exclusive
    long long area() const { return 1ll * height * width; }

    bool contains(int row, int col) const {
        return row >= top && row < bottom() && col >= left && col < right();
    }

    bool operator==(const WindowRect&) const = default;
};

// Intersection; empty rectangles come back with zero height/width.
WindowRect intersect(const WindowRect& a, const WindowRect& b);

// Fractional box relative to the full canvas, x0 < x1 and y0 < y1.
struct BoundingBox {
    double x0 = 0.0;
    double y0 = 0.0;
    double x1 = 1.0;
    double y1 = 1.0;

    double width() const { return x1 - x0; }
    double height() const { return y1 - y0; }
    double area() const { return width() * height(); }
    double center_x() const { return 0.5 * (x0 + x1); }

    bool operator==(const BoundingBox&) const = default;
};

// Fractional box -> latent rectangle. Degenerate boxes clamp to 1x1;
// the result always lies inside the canvas.
WindowRect region_of(const BoundingBox& box, CanvasDims dims);

// Inverse mapping; region_of(box_of(r)) == r for any valid rectangle.
BoundingBox box_of(const WindowRect& rect, CanvasDims dims);

// The nontypical aspect-ratio latent being denoised. Row-major,
// channel-innermost: data[(r * width + c) * channels + ch].
struct LatentCanvas {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> data;

    LatentCanvas() = default;
    LatentCanvas(int h, int w, int c)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, 0.0f) {}

    float& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    float at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }

    CanvasDims dims() const { return {height, width}; }
    std::size_t size() const { return data.size(); }

    bool all_finite() const;

    // Copies the window region into a dense H*W*C tile.
    std::vector<float> extract(const WindowRect& rect) const;
};

// Unit-norm prompt or image embedding.
struct Embedding {
    std::vector<double> v;

    int dim() const { return static_cast<int>(v.size()); }
    double norm() const;
    bool all_finite() const;

    bool operator==(const Embedding&) const = default;
};

double dot(const Embedding& a, const Embedding& b);
double cosine(const Embedding& a, const Embedding& b);

// Normalizes in place; throws DimensionError when the norm is not
// positive and finite.
Embedding normalized(Embedding e);

// Denoising step index. Step 0 is the noisiest step; the fraction
// t/T grows monotonically toward 1 as the run proceeds.
struct TimestepSchedule {
    int total = 0;
    int current = 0;

    double fraction() const { return static_cast<double>(current) / total; }
};

}  // namespace scroll
