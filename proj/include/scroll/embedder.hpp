#pragma once

#include <string>

#include "scroll/image.hpp"
#include "scroll/types.hpp"

namespace scroll {

// Text/image embedding substrate for conditioning and for the metrics.
// Implementations return unit-norm vectors of a fixed dimension and
// must be deterministic and safe for concurrent calls.
class Embedder {
public:
    virtual ~Embedder() = default;
    virtual Embedding embed_text(const std::string& text) const = 0;
    virtual Embedding embed_image(const ImageF& image) const = 0;
    virtual int dim() const = 0;
};

// Desk-scale embedder. Text maps through a stable token hash to a
// seeded unit vector; images become an 8x8 grayscale thumbnail,
// flattened and unit-normalized. Both live in R^64.
class ToyEmbedder : public Embedder {
public:
    static constexpr int kDim = 64;
    static constexpr int kThumb = 8;

    Embedding embed_text(const std::string& text) const override;
    Embedding embed_image(const ImageF& image) const override;
    int dim() const override { return kDim; }
};

}  // namespace scroll
