#include "scroll/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <fstream>
#include <memory>

#include "scroll/errors.hpp"

namespace scroll {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

Image read_png(const std::string& path) {
    FilePtr fp(std::fopen(path.c_str(), "rb"));
    if (!fp) throw IoError("cannot open image: " + path);

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("png: out of memory");
    }
    std::vector<png_bytep> rows;
    Image out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("png: failed reading " + path);
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int bit_depth = png_get_bit_depth(png, info);
    const int color_type = png_get_color_type(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_read_update_info(png, info);

    const int channels = png_get_channels(png, info);
    out = Image(static_cast<int>(h), static_cast<int>(w), channels);
    rows.resize(h);
    const std::size_t stride = static_cast<std::size_t>(w) * channels;
    for (png_uint_32 r = 0; r < h; ++r) rows[r] = out.data.data() + r * stride;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return out;
}

Image read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P5" && magic != "P6") throw IoError("unsupported image format: " + path);
    const int channels = magic == "P6" ? 3 : 1;

    auto next_int = [&in, &path] {
        // skip whitespace and '#' comments
        for (;;) {
            int c = in.peek();
            if (c == '#') {
                std::string line;
                std::getline(in, line);
            } else if (std::isspace(c)) {
                in.get();
            } else {
                break;
            }
        }
        int v = 0;
        if (!(in >> v)) throw IoError("malformed PNM header: " + path);
        return v;
    };

    const int w = next_int();
    const int h = next_int();
    const int maxval = next_int();
    if (w <= 0 || h <= 0 || maxval != 255) throw IoError("unsupported PNM variant: " + path);
    in.get();  // single whitespace after header

    Image out(h, w, channels);
    in.read(reinterpret_cast<char*>(out.data.data()), static_cast<std::streamsize>(out.data.size()));
    if (in.gcount() != static_cast<std::streamsize>(out.data.size()))
        throw IoError("truncated PNM data: " + path);
    return out;
}

bool has_png_signature(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + path);
    unsigned char sig[8] = {};
    in.read(reinterpret_cast<char*>(sig), 8);
    return in.gcount() == 8 && png_sig_cmp(sig, 0, 8) == 0;
}

}  // namespace

Image read_image(const std::string& path) {
    if (has_png_signature(path)) return read_png(path);
    return read_pnm(path);
}

void write_png(const std::string& path, const Image& image) {
    if (image.height <= 0 || image.width <= 0)
        throw DimensionError("write_png: empty image");
    if (image.channels != 1 && image.channels != 3 && image.channels != 4)
        throw DimensionError("write_png: channels must be 1, 3, or 4");

    FilePtr fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot write image: " + path);

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("png: out of memory");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw IoError("png: out of memory");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("png: failed writing " + path);
    }
    png_init_io(png, fp.get());
    const int color = image.channels == 1   ? PNG_COLOR_TYPE_GRAY
                      : image.channels == 3 ? PNG_COLOR_TYPE_RGB
                                            : PNG_COLOR_TYPE_RGBA;
    png_set_IHDR(png, info, image.width, image.height, 8, color, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    const std::size_t stride = static_cast<std::size_t>(image.width) * image.channels;
    for (int r = 0; r < image.height; ++r)
        png_write_row(png, const_cast<png_bytep>(image.data.data() + r * stride));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

void write_ppm(const std::string& path, const Image& image) {
    if (image.channels != 1 && image.channels != 3)
        throw DimensionError("write_ppm: channels must be 1 or 3");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write image: " + path);
    out << (image.channels == 3 ? "P6" : "P5") << '\n'
        << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.data.data()),
              static_cast<std::streamsize>(image.data.size()));
    if (!out) throw IoError("failed writing image: " + path);
}

PngInfo read_png_info(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + path);
    unsigned char buf[24] = {};
    in.read(reinterpret_cast<char*>(buf), 24);
    if (in.gcount() != 24 || png_sig_cmp(buf, 0, 8) != 0)
        throw IoError("not a PNG file: " + path);
    auto be32 = [&buf](int off) {
        return (static_cast<std::uint32_t>(buf[off]) << 24) |
               (static_cast<std::uint32_t>(buf[off + 1]) << 16) |
               (static_cast<std::uint32_t>(buf[off + 2]) << 8) |
               static_cast<std::uint32_t>(buf[off + 3]);
    };
    // IHDR is always the first chunk: width at offset 16, height at 20
    return {static_cast<int>(be32(20)), static_cast<int>(be32(16))};
}

ImageF to_float(const Image& image) {
    ImageF out(image.height, image.width, image.channels);
    for (std::size_t i = 0; i < image.data.size(); ++i)
        out.data[i] = static_cast<float>(image.data[i]) / 255.0f;
    return out;
}

Image to_u8(const ImageF& image) {
    Image out(image.height, image.width, image.channels);
    for (std::size_t i = 0; i < image.data.size(); ++i) {
        const float v = std::clamp(image.data[i], 0.0f, 1.0f);
        out.data[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    return out;
}

ImageF crop(const ImageF& image, const WindowRect& rect) {
    if (rect.height < 1 || rect.width < 1 || rect.top < 0 || rect.left < 0 ||
        rect.bottom() > image.height || rect.right() > image.width)
        throw DimensionError("crop: rectangle outside image");
    ImageF out(rect.height, rect.width, image.channels);
    for (int r = 0; r < rect.height; ++r) {
        const float* src = &image.data[(static_cast<std::size_t>(rect.top + r) * image.width +
                                        rect.left) * image.channels];
        std::copy(src, src + static_cast<std::size_t>(rect.width) * image.channels,
                  &out.data[static_cast<std::size_t>(r) * rect.width * image.channels]);
    }
    return out;
}

ImageF resize_bilinear(const ImageF& image, int height, int width) {
    if (height < 1 || width < 1) throw DimensionError("resize: target dims must be positive");
    ImageF out(height, width, image.channels);
    const double sr = static_cast<double>(image.height) / height;
    const double sc = static_cast<double>(image.width) / width;
    for (int r = 0; r < height; ++r) {
        const double fr = std::max(0.0, (r + 0.5) * sr - 0.5);
        const int r0 = std::min(static_cast<int>(fr), image.height - 1);
        const int r1 = std::min(r0 + 1, image.height - 1);
        const double wr = fr - r0;
        for (int c = 0; c < width; ++c) {
            const double fc = std::max(0.0, (c + 0.5) * sc - 0.5);
            const int c0 = std::min(static_cast<int>(fc), image.width - 1);
            const int c1 = std::min(c0 + 1, image.width - 1);
            const double wc = fc - c0;
            for (int ch = 0; ch < image.channels; ++ch) {
                const double v =
                    (1 - wr) * ((1 - wc) * image.at(r0, c0, ch) + wc * image.at(r0, c1, ch)) +
                    wr * ((1 - wc) * image.at(r1, c0, ch) + wc * image.at(r1, c1, ch));
                out.at(r, c, ch) = static_cast<float>(v);
            }
        }
    }
    return out;
}

ImageF grayscale(const ImageF& image) {
    if (image.channels == 1) return image;
    ImageF out(image.height, image.width, 1);
    for (int r = 0; r < image.height; ++r)
        for (int c = 0; c < image.width; ++c) {
            float s = 0.0f;
            for (int ch = 0; ch < image.channels; ++ch) s += image.at(r, c, ch);
            out.at(r, c, 0) = s / image.channels;
        }
    return out;
}

Image canvas_to_image(const LatentCanvas& canvas, int scale) {
    if (scale < 1) throw ConfigError("canvas_to_image: scale must be >= 1");
    const int C = canvas.channels;
    const int out_c = C == 1 ? 1 : 3;
    Image out(canvas.height * scale, canvas.width * scale, out_c);
    for (int r = 0; r < out.height; ++r) {
        const int lr = r / scale;
        for (int c = 0; c < out.width; ++c) {
            const int lc = c / scale;
            for (int ch = 0; ch < out_c; ++ch) {
                // channels beyond what the canvas has repeat the last one
                const float v = canvas.at(lr, lc, std::min(ch, C - 1));
                const float mapped = (std::clamp(v, -1.0f, 1.0f) + 1.0f) * 0.5f * 255.0f;
                out.at(r, c, ch) = static_cast<std::uint8_t>(std::lround(mapped));
            }
        }
    }
    return out;
}

LatentCanvas image_to_canvas(const Image& image, CanvasDims dims, int channels) {
    if (channels < 1) throw ConfigError("image_to_canvas: channels must be >= 1");
    const ImageF f = resize_bilinear(to_float(image), dims.height, dims.width);
    LatentCanvas out(dims.height, dims.width, channels);
    for (int r = 0; r < dims.height; ++r)
        for (int c = 0; c < dims.width; ++c)
            for (int ch = 0; ch < channels; ++ch) {
                const float v = f.at(r, c, ch % f.channels);
                out.at(r, c, ch) = v * 2.0f - 1.0f;
            }
    return out;
}

}  // namespace scroll
