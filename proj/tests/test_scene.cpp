#include <doctest.h>

#include <stdexcept>

#include "agetrace/scene.hpp"

using namespace agetrace;

namespace {

FloatRaster render(SceneKind kind, int w = 32, int h = 24, std::uint64_t seed = 5,
                   std::array<double, 3> palette = {0.3, 0.5, 0.6}) {
    SceneParams p;
    p.kind = kind;
    p.palette = palette;
    RngStream rng(seed);
    return render_scene_rgb(w, h, p, 255.0, rng);
}

} // namespace

TEST_CASE("flat scenes are constant at the base level") {
    const FloatRaster f = render(SceneKind::Flat);
    for (double v : f.data) CHECK(v == doctest::Approx(0.45 * 255.0));
}

TEST_CASE("gradient scenes ramp along columns and are constant along rows") {
    const FloatRaster f = render(SceneKind::Gradient);
    for (int r = 0; r < f.height; ++r)
        for (int c = 1; c < f.width; ++c) {
            CHECK(f.at(r, c, 0) >= f.at(r, c - 1, 0));
            CHECK(f.at(r, c, 0) == doctest::Approx(f.at(0, c, 0)));
        }
    CHECK(f.at(0, f.width - 1, 0) > f.at(0, 0, 0));
}

TEST_CASE("textured scenes vary, stay in range and are seed-deterministic") {
    const FloatRaster a = render(SceneKind::Textured);
    const FloatRaster b = render(SceneKind::Textured);
    const FloatRaster c = render(SceneKind::Textured, 32, 24, 6);
    CHECK(a.data == b.data);
    CHECK(a.data != c.data);
    double lo = 1e9, hi = -1e9;
    for (double v : a.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        CHECK(v >= 0.0);
        CHECK(v <= 255.0);
    }
    CHECK(hi > lo); // not a constant field
}

TEST_CASE("biased scenes center each channel on its palette entry") {
    const std::array<double, 3> palette = {0.30, 0.50, 0.62};
    const FloatRaster f = render(SceneKind::Biased, 64, 64, 9, palette);
    for (int ch = 0; ch < 3; ++ch) {
        double sum = 0.0;
        for (int r = 0; r < f.height; ++r)
            for (int c = 0; c < f.width; ++c) sum += f.at(r, c, ch);
        const double mean = sum / (f.width * f.height);
        CHECK(mean == doctest::Approx(palette[ch] * 255.0).epsilon(0.25));
    }
}

TEST_CASE("scene kind names round trip") {
    for (SceneKind k :
         {SceneKind::Flat, SceneKind::Gradient, SceneKind::Textured, SceneKind::Biased})
        CHECK(scene_kind_from_string(to_string(k)) == k);
    CHECK_THROWS_AS(scene_kind_from_string("mystery"), std::invalid_argument);
}
