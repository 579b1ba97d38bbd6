#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "scroll/embedder.hpp"
#include "scroll/image.hpp"
#include "scroll/layout.hpp"

namespace scroll {

// Aesthetic model for boundary strips. The built-in proxy is a
// seam-smoothness score, documented as a stand-in for a trained
// aesthetic predictor; absolute values are not comparable to one.
class AestheticScorer {
public:
    virtual ~AestheticScorer() = default;

    // `strip` is a vertical slice of the image; `seam_col` is the
    // column index inside the strip where two scenes meet.
    virtual double score(const ImageF& strip, int seam_col) const = 0;
};

// 10 * exp(-mean |dx|) where the gradient is taken across the seam
// column pair, averaged over rows and channels.
class SeamSmoothnessScorer : public AestheticScorer {
public:
    double score(const ImageF& strip, int seam_col) const override;
};

struct MetricReport {
    double lgis = 0.0;
    double gev = 0.0;
    std::optional<double> ea;
    double global_clip = 0.0;
    std::vector<double> local_clip;
    std::optional<double> csgt;
};

// {"lgis":…, "gev":…, "ea":…|null, "global_clip":…, "local_clip":[…],
//  "csgt":…|null}
nlohmann::json report_to_json(const MetricReport& report);

// Mean cosine similarity of each scene crop's embedding to the whole
// image's embedding; lower means more locally diverse content.
double lgis(const ImageF& image, std::span<const WindowRect> scene_rects,
            const Embedder& embedder);

// Mean per-dimension population variance over {whole image embedding}
// union {scene crop embeddings}; higher means more semantic dispersion.
double gev(const ImageF& image, std::span<const WindowRect> scene_rects,
           const Embedder& embedder);

// Mean scorer value over vertical strips centered on each internal
// scene boundary. Undefined (nullopt) with fewer than two scenes.
std::optional<double> edge_aesthetics(const ImageF& image,
                                      std::span<const WindowRect> scene_rects,
                                      const AestheticScorer& scorer, int strip_width = 64);

struct ClipScores {
    double global = 0.0;
    std::vector<double> locals;
};

// global = 100 * cos(image, joined scene prompts); one local score per
// scene crop against that scene's prompt.
ClipScores clip_scores(const ImageF& image, const Layout& layout, const Embedder& embedder);

// Cosine similarity between a generated image and its ground truth.
double csgt(const ImageF& image, const ImageF& ground_truth, const Embedder& embedder);

// Scene boxes -> pixel rectangles for the given image.
std::vector<WindowRect> scene_rects(const Layout& layout, CanvasDims image_dims);

MetricReport compute_report(const ImageF& image, const Layout& layout,
                            const ImageF* ground_truth, const Embedder& embedder,
                            const AestheticScorer& scorer, int strip_width = 64);

}  // namespace scroll
