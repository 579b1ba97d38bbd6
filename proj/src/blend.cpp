#include "scroll/blend.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "scroll/errors.hpp"

namespace scroll {

void validate_blend_policy(const BlendPolicy& policy) {
    if (policy.fg_fraction < 0.0 || policy.fg_fraction > 1.0)
        throw ConfigError("blend policy: fg_fraction must lie in [0,1]");
    if (policy.bg_every < 1)
        throw ConfigError("blend policy: bg_every must be >= 1");
    if (!(policy.object_overlap_threshold > 0.0) || policy.object_overlap_threshold > 1.0)
        throw ConfigError("blend policy: overlap threshold must lie in (0,1]");
    if (!(policy.strengthen_weight > 0.0) || policy.strengthen_weight > 10.0)
        throw ConfigError("blend policy: strengthen weight must lie in (0,10]");
}

BlendChoice select_layer(const WindowRect& window, int t, int total_steps,
                         const Layout& layout, CanvasDims dims, const BlendPolicy& policy) {
    if (layout.scenes.empty())
        throw ConfigError("select_layer: layout has no scenes");
    if (total_steps < 1 || t < 0 || t >= total_steps)
        throw ConfigError("select_layer: step index out of range");

    const int k = policy.bg_every;
    if (t % k == k - 1) return {BlendLayer::background, 0};

    const double fraction = static_cast<double>(t) / total_steps;
    if (fraction < policy.fg_fraction) {
        long long best_overlap = 0;
        int best = -1;
        for (std::size_t i = 0; i < layout.objects.size(); ++i) {
            const WindowRect obj = region_of(layout.objects[i].box, dims);
            const long long ov = intersect(obj, window).area();
            if (ov <= 0) continue;
            if (static_cast<double>(ov) / static_cast<double>(obj.area()) <
                policy.object_overlap_threshold)
                continue;
            if (ov > best_overlap) {
                best_overlap = ov;
                best = static_cast<int>(i);
            }
        }
        if (best >= 0) return {BlendLayer::foreground, best};
    }

    long long best_overlap = -1;
    int best = 0;
    for (std::size_t i = 0; i < layout.scenes.size(); ++i) {
        const WindowRect scene = region_of(layout.scenes[i].box, dims);
        const long long ov = intersect(scene, window).area();
        if (ov > best_overlap) {
            best_overlap = ov;
            best = static_cast<int>(i);
        }
    }
    return {BlendLayer::midground, best};
}

const Embedding& select_embedding(const WindowRect& window, int t, int total_steps,
                                  const Layout& layout, CanvasDims dims,
                                  const LayerPrompts& layers, const BlendPolicy& policy) {
    if (layers.mg.size() != layout.scenes.size() || layers.fg.size() != layout.objects.size())
        throw ConfigError("select_embedding: layer prompts inconsistent with layout");
    const BlendChoice choice = select_layer(window, t, total_steps, layout, dims, policy);
    switch (choice.layer) {
        case BlendLayer::background: return layers.bg;
        case BlendLayer::foreground: return layers.fg[choice.index];
        case BlendLayer::midground: break;
    }
    return layers.mg[choice.index];
}

namespace {

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

void check_weight(double w, std::size_t offset) {
    if (!(w > 0.0))
        throw PromptParseError("prompt weight must be positive", offset);
    if (w > 10.0)
        throw PromptParseError("prompt weight exceeds 10", offset);
}

}  // namespace

std::vector<WeightedPromptTerm> parse_weighted_prompt(const std::string& text) {
    if (trim(text).empty())
        throw PromptParseError("empty prompt", 0);

    std::vector<WeightedPromptTerm> terms;
    std::string plain;

    auto flush_plain = [&] {
        const std::string t = trim(plain);
        if (!t.empty()) terms.push_back({t, 1.0});
        plain.clear();
    };

    std::size_t i = 0;
    const std::size_t n = text.size();
    while (i < n) {
        const char c = text[i];
        if (c == ')')
            throw PromptParseError("unmatched ')'", i);
        if (c != '(') {
            plain += c;
            ++i;
            continue;
        }

        flush_plain();
        const std::size_t open = i;
        const std::size_t close = text.find_first_of("()", i + 1);
        if (close == std::string::npos || text[close] == '(')
            throw PromptParseError("unmatched '('", close == std::string::npos ? open : close);

        std::string inner = text.substr(open + 1, close - open - 1);
        double weight = 1.0;
        const std::size_t colon = inner.rfind(':');
        if (colon != std::string::npos) {
            const std::string num = trim(std::string_view(inner).substr(colon + 1));
            std::size_t used = 0;
            double w = 0.0;
            bool ok = !num.empty();
            if (ok) {
                try {
                    w = std::stod(num, &used);
                } catch (const std::exception&) {
                    ok = false;
                }
            }
            if (ok && used == num.size()) {
                check_weight(w, open + 1 + colon + 1);
                weight = w;
                inner.resize(colon);
            }
            // otherwise the colon is part of the segment text
        }

        i = close + 1;
        while (i < n && (text[i] == '+' || text[i] == '-')) {
            weight *= text[i] == '+' ? 1.1 : 0.9;
            ++i;
        }
        check_weight(weight, open);

        const std::string seg = trim(inner);
        if (seg.empty())
            throw PromptParseError("empty prompt segment", open);
        terms.push_back({seg, weight});
    }
    flush_plain();

    if (terms.empty())
        throw PromptParseError("prompt has no segments", 0);
    return terms;
}

Embedding combine_terms(std::span<const WeightedPromptTerm> terms, const Embedder& embedder) {
    if (terms.empty())
        throw ConfigError("combine_terms: needs at least one term");

    Embedding sum;
    sum.v.assign(embedder.dim(), 0.0);
    for (const auto& term : terms) {
        const Embedding e = embedder.embed_text(term.text);
        for (int i = 0; i < sum.dim(); ++i) sum.v[i] += term.weight * e.v[i];
    }

    if (sum.norm() < 1e-9) {
        // near-cancellation: embed the concatenated text instead
        std::string joined;
        for (const auto& term : terms) {
            if (!joined.empty()) joined += ' ';
            joined += term.text;
        }
        return embedder.embed_text(joined);
    }
    return normalized(std::move(sum));
}

std::vector<WeightedPromptTerm> strengthen_object_in_scene(
    const std::string& scene_prompt, std::span<const std::string> object_prompts,
    double weight) {
    // explicit user weighting disables auto-strengthening
    if (scene_prompt.find('(') != std::string::npos)
        return parse_weighted_prompt(scene_prompt);

    std::vector<WeightedPromptTerm> terms;
    terms.push_back({trim(scene_prompt), 1.0});
    for (const auto& obj : object_prompts) {
        const std::string t = trim(obj);
        if (!t.empty()) terms.push_back({t, weight});
    }
    return terms;
}

LayerPrompts build_layer_prompts(const Layout& layout, const Embedder& embedder,
                                 const BlendPolicy& policy) {
    if (layout.scenes.empty())
        throw ConfigError("build_layer_prompts: layout has no scenes");

    LayerPrompts out;
    const std::string bg_text = layout.background.empty() ? "plain backdrop" : layout.background;
    out.bg = combine_terms(parse_weighted_prompt(bg_text), embedder);

    for (std::size_t s = 0; s < layout.scenes.size(); ++s) {
        std::vector<std::string> obj_texts;
        for (const auto& o : layout.objects)
            if (o.scene == static_cast<int>(s)) obj_texts.push_back(o.prompt);
        const auto terms = strengthen_object_in_scene(layout.scenes[s].prompt, obj_texts,
                                                      policy.strengthen_weight);
        out.mg.push_back(combine_terms(terms, embedder));
    }
    for (const auto& o : layout.objects)
        out.fg.push_back(combine_terms(parse_weighted_prompt(o.prompt), embedder));
    return out;
}

}  // namespace scroll
