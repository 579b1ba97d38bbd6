#include "scroll/embedder.hpp"

#include <cmath>
#include <sstream>

#include "scroll/errors.hpp"
#include "scroll/rng.hpp"

namespace scroll {

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace

Embedding ToyEmbedder::embed_text(const std::string& text) const {
    // whitespace-tokenized, order-sensitive hash chain
    std::uint64_t h = 0xcbf29ce484222325ull;
    std::istringstream ss(text);
    std::string token;
    while (ss >> token) h = mix64(fnv1a(token, h));

    Rng rng(h);
    Embedding e;
    e.v.resize(kDim);
    for (int i = 0; i < kDim; ++i) e.v[i] = rng.normal();
    return normalized(std::move(e));
}

Embedding ToyEmbedder::embed_image(const ImageF& image) const {
    if (image.height < 1 || image.width < 1)
        throw DimensionError("embed_image: empty image");

    const ImageF g = grayscale(image);
    Embedding e;
    e.v.assign(kDim, 0.0);

    // 8x8 average-pooled thumbnail, flattened row-major
    for (int tr = 0; tr < kThumb; ++tr) {
        const int r0 = tr * g.height / kThumb;
        const int r1 = std::max(r0 + 1, (tr + 1) * g.height / kThumb);
        for (int tc = 0; tc < kThumb; ++tc) {
            const int c0 = tc * g.width / kThumb;
            const int c1 = std::max(c0 + 1, (tc + 1) * g.width / kThumb);
            double sum = 0.0;
            long long n = 0;
            for (int r = std::min(r0, g.height - 1); r < std::min(r1, g.height); ++r)
                for (int c = std::min(c0, g.width - 1); c < std::min(c1, g.width); ++c) {
                    sum += g.at(r, c, 0);
                    ++n;
                }
            e.v[tr * kThumb + tc] = n > 0 ? sum / static_cast<double>(n) : 0.0;
        }
    }

    if (e.norm() < 1e-12) {
        // all-black image: fall back to a fixed unit direction
        e.v.assign(kDim, 1.0 / 8.0);
        return e;
    }
    return normalized(std::move(e));
}

}  // namespace scroll
