#include "scroll/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "scroll/errors.hpp"

namespace scroll {

double SeamSmoothnessScorer::score(const ImageF& strip, int seam_col) const {
    if (seam_col < 1 || seam_col >= strip.width)
        throw DimensionError("seam score: seam column must have a left neighbor");
    double sum = 0.0;
    long long n = 0;
    for (int r = 0; r < strip.height; ++r)
        for (int ch = 0; ch < strip.channels; ++ch) {
            sum += std::abs(strip.at(r, seam_col, ch) - strip.at(r, seam_col - 1, ch));
            ++n;
        }
    return 10.0 * std::exp(-(sum / static_cast<double>(n)));
}

nlohmann::json report_to_json(const MetricReport& report) {
    nlohmann::json j;
    j["lgis"] = report.lgis;
    j["gev"] = report.gev;
    j["ea"] = report.ea ? nlohmann::json(*report.ea) : nlohmann::json(nullptr);
    j["global_clip"] = report.global_clip;
    j["local_clip"] = report.local_clip;
    j["csgt"] = report.csgt ? nlohmann::json(*report.csgt) : nlohmann::json(nullptr);
    return j;
}

double lgis(const ImageF& image, std::span<const WindowRect> rects, const Embedder& embedder) {
    if (rects.empty()) throw DimensionError("lgis: needs at least one scene rect");
    const Embedding whole = embedder.embed_image(image);
    double sum = 0.0;
    for (const auto& rect : rects)
        sum += cosine(embedder.embed_image(crop(image, rect)), whole);
    return sum / static_cast<double>(rects.size());
}

double gev(const ImageF& image, std::span<const WindowRect> rects, const Embedder& embedder) {
    if (rects.empty()) throw DimensionError("gev: needs at least one scene rect");

    std::vector<Embedding> set;
    set.push_back(embedder.embed_image(image));
    for (const auto& rect : rects) set.push_back(embedder.embed_image(crop(image, rect)));

    const int L = set.front().dim();
    const double n = static_cast<double>(set.size());
    double total = 0.0;
    for (int d = 0; d < L; ++d) {
        double mean = 0.0;
        for (const auto& e : set) mean += e.v[d];
        mean /= n;
        double var = 0.0;
        for (const auto& e : set) {
            const double dv = e.v[d] - mean;
            var += dv * dv;
        }
        total += var / n;  // population variance
    }
    return total / L;
}

std::optional<double> edge_aesthetics(const ImageF& image, std::span<const WindowRect> rects,
                                      const AestheticScorer& scorer, int strip_width) {
    if (rects.size() < 2) return std::nullopt;
    if (strip_width < 2) throw ConfigError("edge aesthetics: strip width must be >= 2");

    std::vector<WindowRect> sorted(rects.begin(), rects.end());
    std::sort(sorted.begin(), sorted.end(),
              [](const WindowRect& a, const WindowRect& b) { return a.left < b.left; });

    double sum = 0.0;
    int count = 0;
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        const int boundary = std::clamp(sorted[i].left, 1, image.width - 1);
        const int begin = std::max(0, boundary - strip_width / 2);
        const int end = std::min(image.width, boundary + (strip_width + 1) / 2);
        const WindowRect strip_rect{0, begin, image.height, end - begin};
        sum += scorer.score(crop(image, strip_rect), boundary - begin);
        ++count;
    }
    return sum / count;
}

ClipScores clip_scores(const ImageF& image, const Layout& layout, const Embedder& embedder) {
    if (layout.scenes.empty()) throw ConfigError("clip scores: layout has no scenes");

    std::string joined;
    for (const auto& s : layout.scenes) {
        if (!joined.empty()) joined += ", ";
        joined += s.prompt;
    }

    ClipScores out;
    out.global = 100.0 * cosine(embedder.embed_image(image), embedder.embed_text(joined));
    const auto rects = scene_rects(layout, image.dims());
    for (std::size_t i = 0; i < layout.scenes.size(); ++i)
        out.locals.push_back(100.0 * cosine(embedder.embed_image(crop(image, rects[i])),
                                            embedder.embed_text(layout.scenes[i].prompt)));
    return out;
}

double csgt(const ImageF& image, const ImageF& ground_truth, const Embedder& embedder) {
    return cosine(embedder.embed_image(image), embedder.embed_image(ground_truth));
}

std::vector<WindowRect> scene_rects(const Layout& layout, CanvasDims image_dims) {
    std::vector<WindowRect> rects;
    rects.reserve(layout.scenes.size());
    for (const auto& s : layout.scenes) rects.push_back(region_of(s.box, image_dims));
    return rects;
}

MetricReport compute_report(const ImageF& image, const Layout& layout,
                            const ImageF* ground_truth, const Embedder& embedder,
                            const AestheticScorer& scorer, int strip_width) {
    const auto rects = scene_rects(layout, image.dims());
    MetricReport report;
    report.lgis = lgis(image, rects, embedder);
    report.gev = gev(image, rects, embedder);
    report.ea = edge_aesthetics(image, rects, scorer, strip_width);
    const ClipScores cs = clip_scores(image, layout, embedder);
    report.global_clip = cs.global;
    report.local_clip = cs.locals;
    if (ground_truth) report.csgt = csgt(image, *ground_truth, embedder);
    return report;
}

}  // namespace scroll
