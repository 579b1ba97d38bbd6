#include <doctest.h>

#include "scroll/errors.hpp"
#include "scroll/rng.hpp"
#include "scroll/types.hpp"

using namespace scroll;

TEST_CASE("region_of maps the unit box to the whole canvas") {
    const WindowRect r = region_of({0, 0, 1, 1}, {64, 256});
    CHECK(r == WindowRect{0, 0, 64, 256});
}

TEST_CASE("region_of follows the stated rounding rule") {
    // box (x0=0.25, y0=0, x1=0.5, y1=1) on a 64x256 canvas
    const WindowRect r = region_of({0.25, 0.0, 0.5, 1.0}, {64, 256});
    CHECK(r == WindowRect{0, 64, 64, 64});
}

TEST_CASE("region_of clamps degenerate boxes to one cell") {
    const WindowRect r = region_of({0, 0, 0.001, 0.001}, {64, 256});
    CHECK(r == WindowRect{0, 0, 1, 1});
}

TEST_CASE("region_of never leaves the canvas") {
    Rng rng(11);
    for (int i = 0; i < 500; ++i) {
        const int h = 1 + static_cast<int>(rng.uniform() * 128);
        const int w = 1 + static_cast<int>(rng.uniform() * 512);
        double x0 = rng.uniform(), x1 = rng.uniform();
        double y0 = rng.uniform(), y1 = rng.uniform();
        if (x0 > x1) std::swap(x0, x1);
        if (y0 > y1) std::swap(y0, y1);
        const WindowRect r = region_of({x0, y0, x1 + 1e-9, y1 + 1e-9}, {h, w});
        CHECK(r.top >= 0);
        CHECK(r.left >= 0);
        CHECK(r.height >= 1);
        CHECK(r.width >= 1);
        CHECK(r.bottom() <= h);
        CHECK(r.right() <= w);
    }
}

TEST_CASE("region_of is monotone up to one cell of rounding") {
    Rng rng(12);
    for (int i = 0; i < 300; ++i) {
        const int h = 8 + static_cast<int>(rng.uniform() * 100);
        const int w = 8 + static_cast<int>(rng.uniform() * 300);
        // inner box contained in outer box
        double ox0 = rng.uniform() * 0.4, ox1 = 0.6 + rng.uniform() * 0.4;
        double oy0 = rng.uniform() * 0.4, oy1 = 0.6 + rng.uniform() * 0.4;
        double ix0 = ox0 + (ox1 - ox0) * 0.25, ix1 = ox0 + (ox1 - ox0) * 0.75;
        double iy0 = oy0 + (oy1 - oy0) * 0.25, iy1 = oy0 + (oy1 - oy0) * 0.75;
        const WindowRect outer = region_of({ox0, oy0, ox1, oy1}, {h, w});
        const WindowRect inner = region_of({ix0, iy0, ix1, iy1}, {h, w});
        CHECK(inner.top >= outer.top - 1);
        CHECK(inner.left >= outer.left - 1);
        CHECK(inner.bottom() <= outer.bottom() + 1);
        CHECK(inner.right() <= outer.right() + 1);
    }
}

TEST_CASE("rect -> box -> rect round-trip is exact") {
    Rng rng(13);
    for (int i = 0; i < 300; ++i) {
        const int h = 4 + static_cast<int>(rng.uniform() * 100);
        const int w = 4 + static_cast<int>(rng.uniform() * 300);
        const int top = static_cast<int>(rng.uniform() * h);
        const int left = static_cast<int>(rng.uniform() * w);
        const int rh = 1 + static_cast<int>(rng.uniform() * (h - top));
        const int rw = 1 + static_cast<int>(rng.uniform() * (w - left));
        const WindowRect r{top, left, rh, rw};
        CHECK(region_of(box_of(r, {h, w}), {h, w}) == r);
    }
}

TEST_CASE("intersect computes overlap rectangles") {
    const WindowRect a{0, 0, 10, 10};
    const WindowRect b{5, 5, 10, 10};
    const WindowRect c = intersect(a, b);
    CHECK(c == WindowRect{5, 5, 5, 5});
    CHECK(intersect(a, WindowRect{20, 20, 4, 4}).area() == 0);
}

TEST_CASE("embedding helpers") {
    Embedding a{{1.0, 0.0}};
    Embedding b{{0.0, 2.0}};
    CHECK(cosine(a, b) == doctest::Approx(0.0));
    CHECK(normalized(b).v[1] == doctest::Approx(1.0));
    CHECK_THROWS_AS(normalized(Embedding{{0.0, 0.0}}), DimensionError);
    CHECK_THROWS_AS(dot(a, Embedding{{1.0, 2.0, 3.0}}), DimensionError);
}

TEST_CASE("canvas extract copies a window") {
    LatentCanvas canvas(4, 6, 2);
    for (std::size_t i = 0; i < canvas.data.size(); ++i)
        canvas.data[i] = static_cast<float>(i);
    const auto tile = canvas.extract({1, 2, 2, 3});
    REQUIRE(tile.size() == 2 * 3 * 2);
    CHECK(tile[0] == canvas.at(1, 2, 0));
    CHECK(tile[1] == canvas.at(1, 2, 1));
    CHECK(tile[5] == canvas.at(1, 4, 1));
    CHECK(tile[6] == canvas.at(2, 2, 0));
    CHECK_THROWS_AS(canvas.extract({3, 0, 2, 2}), DimensionError);
}
