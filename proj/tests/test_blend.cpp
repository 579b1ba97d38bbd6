#include <doctest.h>

#include <cmath>
#include <map>

#include "scroll/blend.hpp"
#include "scroll/errors.hpp"

using namespace scroll;

namespace {

// Embedder mapping known strings to prescribed vectors; anything else
// falls back to a one-hot on a per-string counter.
class StubEmbedder : public Embedder {
public:
    explicit StubEmbedder(int dim = 8) : dim_(dim) {}

    void set(const std::string& text, std::vector<double> v) {
        table_[text] = normalized(Embedding{std::move(v)});
    }

    Embedding embed_text(const std::string& text) const override {
        if (auto it = table_.find(text); it != table_.end()) return it->second;
        Embedding e;
        e.v.assign(dim_, 0.0);
        auto [it, inserted] = slots_.try_emplace(text, slots_.size() % dim_);
        e.v[it->second] = 1.0;
        return e;
    }

    Embedding embed_image(const ImageF&) const override {
        Embedding e;
        e.v.assign(dim_, 0.0);
        e.v[0] = 1.0;
        return e;
    }

    int dim() const override { return dim_; }

private:
    int dim_;
    std::map<std::string, Embedding> table_;
    mutable std::map<std::string, std::size_t> slots_;
};

Layout two_scene_layout() {
    Layout layout;
    layout.aspect = 4.0;
    layout.background = "ink wash";
    layout.scenes.push_back({{0.0, 0.0, 0.5, 1.0}, "mountain"});
    layout.scenes.push_back({{0.5, 0.0, 1.0, 1.0}, "harbor"});
    layout.objects.push_back({{0.1, 0.2, 0.3, 0.8}, "pagoda", 0});
    return layout;
}

LayerPrompts distinct_layers(const Layout& layout, int dim = 8) {
    LayerPrompts layers;
    auto unit = [dim](int i) {
        Embedding e;
        e.v.assign(dim, 0.0);
        e.v[i] = 1.0;
        return e;
    };
    layers.bg = unit(0);
    for (std::size_t s = 0; s < layout.scenes.size(); ++s)
        layers.mg.push_back(unit(1 + static_cast<int>(s)));
    for (std::size_t o = 0; o < layout.objects.size(); ++o)
        layers.fg.push_back(unit(5 + static_cast<int>(o)));
    return layers;
}

}  // namespace

TEST_CASE("select: background on every k-th step regardless of window") {
    const Layout layout = two_scene_layout();
    const LayerPrompts layers = distinct_layers(layout);
    const CanvasDims dims{64, 256};
    const BlendPolicy policy;
    for (const WindowRect& win :
         {WindowRect{0, 0, 64, 64}, WindowRect{0, 96, 64, 64}, WindowRect{0, 192, 64, 64}})
        CHECK(select_embedding(win, 1, 100, layout, dims, layers, policy) == layers.bg);
}

TEST_CASE("select: foreground inside the first 15% for claimed windows") {
    const Layout layout = two_scene_layout();
    const LayerPrompts layers = distinct_layers(layout);
    const CanvasDims dims{64, 256};
    const BlendPolicy policy;
    // object 0 occupies cols [26,77) rows [13,51); the window covers it
    const WindowRect win{0, 0, 64, 96};
    CHECK(select_embedding(win, 10, 100, layout, dims, layers, policy) == layers.fg[0]);
}

TEST_CASE("select: midground for the remaining 85%") {
    const Layout layout = two_scene_layout();
    const LayerPrompts layers = distinct_layers(layout);
    const CanvasDims dims{64, 256};
    const BlendPolicy policy;
    const WindowRect right{0, 160, 64, 64};  // mostly scene 1
    CHECK(select_embedding(right, 50, 100, layout, dims, layers, policy) == layers.mg[1]);
    const WindowRect left{0, 0, 64, 64};
    CHECK(select_embedding(left, 50, 100, layout, dims, layers, policy) == layers.mg[0]);
}

TEST_CASE("select: window inside a scene-half object claims it at the threshold") {
    Layout layout = two_scene_layout();
    layout.objects[0].box = {0.0, 0.0, 0.5, 1.0};  // object rect 64x128
    const LayerPrompts layers = distinct_layers(layout);
    const BlendPolicy policy;  // threshold 0.5
    // 64x64 window fully inside the object: overlap/object_area = 0.5
    const WindowRect win{0, 32, 64, 64};
    CHECK(select_embedding(win, 10, 100, layout, {64, 256}, layers, policy) == layers.fg[0]);
}

TEST_CASE("select: fg window falls back to mg once the overlap ratio is low") {
    Layout layout = two_scene_layout();
    const CanvasDims dims{64, 256};
    const BlendPolicy policy;  // threshold 0.5
    // a window covering under half of the object's rectangle
    const WindowRect sliver{0, 0, 64, 30};
    const LayerPrompts layers = distinct_layers(layout);
    const auto& e = select_embedding(sliver, 10, 100, layout, dims, layers, policy);
    CHECK(e == layers.mg[0]);
}

TEST_CASE("select: boundary exactness at fg_fraction 0.15, T=100, k=2") {
    const Layout layout = two_scene_layout();
    const LayerPrompts layers = distinct_layers(layout);
    const CanvasDims dims{64, 256};
    const BlendPolicy policy;
    const WindowRect win{0, 0, 64, 96};
    // last fg-eligible even index is 14
    CHECK(select_embedding(win, 14, 100, layout, dims, layers, policy) == layers.fg[0]);
    CHECK(select_embedding(win, 15, 100, layout, dims, layers, policy) == layers.bg);
    CHECK(select_embedding(win, 16, 100, layout, dims, layers, policy) == layers.mg[0]);
}

TEST_CASE("select: schedule partition counts") {
    const Layout layout = two_scene_layout();
    const LayerPrompts layers = distinct_layers(layout);
    const CanvasDims dims{64, 256};
    const WindowRect win{0, 0, 64, 96};
    for (int T : {1, 10, 50, 100}) {
        for (int k : {1, 2, 3}) {
            BlendPolicy policy;
            policy.bg_every = k;
            int bg = 0, fg = 0, mg = 0;
            for (int t = 0; t < T; ++t) {
                const BlendChoice c = select_layer(win, t, T, layout, dims, policy);
                if (c.layer == BlendLayer::background) {
                    CHECK(t % k == k - 1);
                    ++bg;
                } else if (c.layer == BlendLayer::foreground) {
                    CHECK(static_cast<double>(t) / T < policy.fg_fraction);
                    ++fg;
                } else {
                    ++mg;
                }
            }
            CHECK(bg == T / k);
            CHECK(bg + fg + mg == T);
        }
    }
}

TEST_CASE("select: empty layout is a configuration error") {
    const Layout layout;
    const BlendPolicy policy;
    CHECK_THROWS_AS(select_layer({0, 0, 8, 8}, 0, 10, layout, {64, 64}, policy), ConfigError);
}

TEST_CASE("select: deterministic pure function") {
    const Layout layout = two_scene_layout();
    const LayerPrompts layers = distinct_layers(layout);
    const BlendPolicy policy;
    const WindowRect win{0, 32, 64, 64};
    const auto& a = select_embedding(win, 4, 50, layout, {64, 256}, layers, policy);
    const auto& b = select_embedding(win, 4, 50, layout, {64, 256}, layers, policy);
    CHECK(a == b);
}

TEST_CASE("parse: plain text keeps weight 1") {
    const auto terms = parse_weighted_prompt("a misty mountain");
    REQUIRE(terms.size() == 1);
    CHECK(terms[0] == WeightedPromptTerm{"a misty mountain", 1.0});
}

TEST_CASE("parse: explicit weight plus trailing text") {
    const auto terms = parse_weighted_prompt("(pine trees:1.5) by a lake");
    REQUIRE(terms.size() == 2);
    CHECK(terms[0].text == "pine trees");
    CHECK(terms[0].weight == doctest::Approx(1.5));
    CHECK(terms[1] == WeightedPromptTerm{"by a lake", 1.0});
}

TEST_CASE("parse: '+' multiplies by 1.1 per occurrence") {
    const auto terms = parse_weighted_prompt("(ink wash)++ village");
    REQUIRE(terms.size() == 2);
    CHECK(terms[0].text == "ink wash");
    CHECK(terms[0].weight == doctest::Approx(1.21));
    CHECK(terms[1] == WeightedPromptTerm{"village", 1.0});
}

TEST_CASE("parse: '-' multiplies by 0.9, mixing allowed") {
    const auto terms = parse_weighted_prompt("(fog)-");
    CHECK(terms[0].weight == doctest::Approx(0.9));
    const auto mixed = parse_weighted_prompt("(fog)+-");
    CHECK(mixed[0].weight == doctest::Approx(1.1 * 0.9));
}

TEST_CASE("parse: errors carry byte offsets") {
    CHECK_THROWS_AS(parse_weighted_prompt("(unclosed"), PromptParseError);
    CHECK_THROWS_AS(parse_weighted_prompt("text) tail"), PromptParseError);
    CHECK_THROWS_AS(parse_weighted_prompt("(x:0)"), PromptParseError);
    CHECK_THROWS_AS(parse_weighted_prompt("(x:-2)"), PromptParseError);
    CHECK_THROWS_AS(parse_weighted_prompt("(x:11)"), PromptParseError);
    CHECK_THROWS_AS(parse_weighted_prompt("   "), PromptParseError);
    CHECK_THROWS_AS(parse_weighted_prompt("(a)(b"), PromptParseError);
    try {
        parse_weighted_prompt("abc) x");
    } catch (const PromptParseError& e) {
        CHECK(e.offset() == 3);
    }
}

TEST_CASE("parse: colon without a numeric tail stays in the segment") {
    const auto terms = parse_weighted_prompt("(scene: a harbor)");
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].text == "scene: a harbor");
    CHECK(terms[0].weight == doctest::Approx(1.0));
}

TEST_CASE("combine: single unit-weight term is the embedder output") {
    StubEmbedder embedder;
    const std::vector<WeightedPromptTerm> terms{{"mountain", 1.0}};
    const Embedding e = combine_terms(terms, embedder);
    CHECK(e == embedder.embed_text("mountain"));
}

TEST_CASE("combine: identical segments stay collinear") {
    StubEmbedder embedder;
    const std::vector<WeightedPromptTerm> terms{{"mountain", 1.0}, {"mountain", 1.0}};
    const Embedding e = combine_terms(terms, embedder);
    CHECK(cosine(e, embedder.embed_text("mountain")) == doctest::Approx(1.0));
}

TEST_CASE("combine: orthogonal terms with weights (3,1)") {
    StubEmbedder embedder;
    embedder.set("a", {1, 0, 0, 0, 0, 0, 0, 0});
    embedder.set("b", {0, 1, 0, 0, 0, 0, 0, 0});
    const std::vector<WeightedPromptTerm> terms{{"a", 3.0}, {"b", 1.0}};
    const Embedding e = combine_terms(terms, embedder);
    CHECK(cosine(e, embedder.embed_text("a")) == doctest::Approx(3.0 / std::sqrt(10.0)));
    CHECK(e.norm() == doctest::Approx(1.0));
}

TEST_CASE("combine: common weight scaling does not change the result") {
    StubEmbedder embedder;
    embedder.set("a", {1, 0, 0, 0, 0, 0, 0, 0});
    embedder.set("b", {0, 0.6, 0.8, 0, 0, 0, 0, 0});
    const std::vector<WeightedPromptTerm> base{{"a", 2.0}, {"b", 0.5}};
    std::vector<WeightedPromptTerm> scaled = base;
    for (auto& t : scaled) t.weight *= 3.7;
    const Embedding e1 = combine_terms(base, embedder);
    const Embedding e2 = combine_terms(scaled, embedder);
    for (int i = 0; i < e1.dim(); ++i)
        CHECK(e1.v[i] == doctest::Approx(e2.v[i]).epsilon(1e-12));
}

TEST_CASE("combine: near-cancellation falls back to the joined text") {
    StubEmbedder embedder;
    embedder.set("a", {1, 0, 0, 0, 0, 0, 0, 0});
    embedder.set("b", {-1, 0, 0, 0, 0, 0, 0, 0});
    embedder.set("a b", {0, 0, 1, 0, 0, 0, 0, 0});
    const std::vector<WeightedPromptTerm> terms{{"a", 1.0}, {"b", 1.0}};
    const Embedding e = combine_terms(terms, embedder);
    CHECK(cosine(e, embedder.embed_text("a b")) == doctest::Approx(1.0));
}

TEST_CASE("strengthen: objects appended at weight 1.2") {
    const std::vector<std::string> objects{"a red boat"};
    const auto terms = strengthen_object_in_scene("a harbor", objects);
    REQUIRE(terms.size() == 2);
    CHECK(terms[0] == WeightedPromptTerm{"a harbor", 1.0});
    CHECK(terms[1].text == "a red boat");
    CHECK(terms[1].weight == doctest::Approx(1.2));
}

TEST_CASE("strengthen: no objects leaves the scene term alone") {
    const auto terms = strengthen_object_in_scene("a harbor", {});
    REQUIRE(terms.size() == 1);
    CHECK(terms[0] == WeightedPromptTerm{"a harbor", 1.0});
}

TEST_CASE("strengthen: explicit user weights are preserved untouched") {
    const std::vector<std::string> objects{"a red boat"};
    const auto terms = strengthen_object_in_scene("(a harbor:2)", objects);
    REQUIRE(terms.size() == 1);
    CHECK(terms[0].text == "a harbor");
    CHECK(terms[0].weight == doctest::Approx(2.0));
}

TEST_CASE("build_layer_prompts: sizes follow the layout") {
    const Layout layout = two_scene_layout();
    StubEmbedder embedder;
    const LayerPrompts layers = build_layer_prompts(layout, embedder, BlendPolicy{});
    CHECK(layers.mg.size() == 2);
    CHECK(layers.fg.size() == 1);
    CHECK(layers.bg.norm() == doctest::Approx(1.0));
}
