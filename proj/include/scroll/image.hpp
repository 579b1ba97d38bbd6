#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scroll/types.hpp"

namespace scroll {

// 8-bit pixel image, row-major, channel-innermost. 1, 3, or 4 channels.
struct Image {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;

    Image() = default;
    Image(int h, int w, int c)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, 0) {}

    std::uint8_t& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    std::uint8_t at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
};

// Float image; metrics operate on values in [0,1].
struct ImageF {
    int height = 0;
    int width = 0;
    int channels = 0;
    std::vector<float> data;

    ImageF() = default;
    ImageF(int h, int w, int c)
        : height(h), width(w), channels(c),
          data(static_cast<std::size_t>(h) * w * c, 0.0f) {}

    float& at(int r, int c, int ch) {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }
    float at(int r, int c, int ch) const {
        return data[(static_cast<std::size_t>(r) * width + c) * channels + ch];
    }

    CanvasDims dims() const { return {height, width}; }
};

// PNG via libpng; PPM/PGM (binary P5/P6) as a plain-text-header fallback.
Image read_image(const std::string& path);
void write_png(const std::string& path, const Image& image);
void write_ppm(const std::string& path, const Image& image);

// Reads only the PNG header; avoids decoding when just checking shape.
struct PngInfo {
    int height = 0;
    int width = 0;
};
PngInfo read_png_info(const std::string& path);

ImageF to_float(const Image& image);   // u8 -> [0,1]
Image to_u8(const ImageF& image);      // clamps to [0,1] then scales

ImageF crop(const ImageF& image, const WindowRect& rect);
ImageF resize_bilinear(const ImageF& image, int height, int width);

// Mean across channels.
ImageF grayscale(const ImageF& image);

// Latent [-1,1] -> u8 pixels with a fixed clamp (no per-image range),
// upscaled by `scale` with nearest-neighbor sampling.
Image canvas_to_image(const LatentCanvas& canvas, int scale);

// Pixel image -> latent values in [-1,1] at the requested latent dims
// (bilinear resample + rescale). The toy path's reference encoder.
LatentCanvas image_to_canvas(const Image& image, CanvasDims dims, int channels);

}  // namespace scroll
