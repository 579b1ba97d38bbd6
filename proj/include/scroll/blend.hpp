#pragma once

#include <span>
#include <string>
#include <vector>

#include "scroll/embedder.hpp"
#include "scroll/layout.hpp"
#include "scroll/types.hpp"

namespace scroll {

// Per-layer prompt embeddings: one background, one per scene, one per
// object. All unit-norm and of equal dimension.
struct LayerPrompts {
    Embedding bg;
    std::vector<Embedding> mg;  // per scene
    std::vector<Embedding> fg;  // per object
};

struct BlendPolicy {
    double fg_fraction = 0.15;          // foreground for the first 15% of steps
    int bg_every = 2;                   // every k-th step conditions on background
    double object_overlap_threshold = 0.5;  // overlap_area / object_area
    double strengthen_weight = 1.2;     // auto-boost for object text in scene prompts
};

void validate_blend_policy(const BlendPolicy& policy);

enum class BlendLayer { background, midground, foreground };

struct BlendChoice {
    BlendLayer layer = BlendLayer::midground;
    int index = 0;  // scene index for midground, object index for foreground
};

// The layer a window conditions on at step t:
//   - background on every bg_every-th step (t mod k == k-1),
//   - otherwise the foreground object whose rectangle overlap covers at
//     least `object_overlap_threshold` of the object, while t/T is below
//     fg_fraction (largest overlap wins, ties to the lower index),
//   - otherwise the midground scene with the largest window overlap.
BlendChoice select_layer(const WindowRect& window, int t, int total_steps,
                         const Layout& layout, CanvasDims dims, const BlendPolicy& policy);

const Embedding& select_embedding(const WindowRect& window, int t, int total_steps,
                                  const Layout& layout, CanvasDims dims,
                                  const LayerPrompts& layers, const BlendPolicy& policy);

// One prompt segment with a positive weight in (0, 10].
struct WeightedPromptTerm {
    std::string text;
    double weight = 1.0;

    bool operator==(const WeightedPromptTerm&) const = default;
};

// Prompt operator syntax, parsed left-to-right with no nesting:
//   "(segment:w)"  sets the weight to w,
//   "(segment)+"   multiplies by 1.1 per trailing '+',
//   "(segment)-"   multiplies by 0.9 per trailing '-',
// unmarked text keeps weight 1.0. Throws PromptParseError (with byte
// offset) on unbalanced parentheses or weights outside (0, 10].
std::vector<WeightedPromptTerm> parse_weighted_prompt(const std::string& text);

// Weighted sum of per-segment embeddings, renormalized. Falls back to
// embedding the concatenated text when the sum nearly cancels.
Embedding combine_terms(std::span<const WeightedPromptTerm> terms, const Embedder& embedder);

// Scene prompt at weight 1 plus each object prompt at `weight`, unless
// the scene prompt already carries explicit operators (then it is
// parsed as-is and left alone).
std::vector<WeightedPromptTerm> strengthen_object_in_scene(
    const std::string& scene_prompt, std::span<const std::string> object_prompts,
    double weight = 1.2);

// Embeds a layout's prompts into the three conditioning layers.
LayerPrompts build_layer_prompts(const Layout& layout, const Embedder& embedder,
                                 const BlendPolicy& policy);

}  // namespace scroll
