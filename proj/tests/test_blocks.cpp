#include <doctest.h>

#include <stdexcept>

#include <set>

#include "agetrace/blocks.hpp"

using namespace agetrace;

namespace {

bool overlap(const PixelCoord& a, const PixelCoord& b, int bs) {
    return a.row < b.row + bs && b.row < a.row + bs && a.col < b.col + bs && b.col < a.col + bs;
}

} // namespace

TEST_CASE("grid tiling is row-major and maximal") {
    RasterImage img(10, 10, 1, 8, 7);
    const auto blocks = crop_blocks(img, 3, CropStrategy::grid());
    REQUIRE(blocks.size() == 9);
    int i = 0;
    for (int r = 0; r <= 6; r += 3)
        for (int c = 0; c <= 6; c += 3) {
            CHECK(blocks[i].origin == PixelCoord{r, c, 0});
            CHECK(blocks[i].block.width == 3);
            CHECK(blocks[i].block.height == 3);
            ++i;
        }
}

TEST_CASE("five-crop takes the corners and the center") {
    RasterImage img(1024, 768, 1, 8, 0);
    const auto blocks = crop_blocks(img, 256, CropStrategy::five_crop());
    REQUIRE(blocks.size() == 5);
    CHECK(blocks[0].origin == PixelCoord{0, 0, 0});
    CHECK(blocks[1].origin == PixelCoord{0, 768, 0});
    CHECK(blocks[2].origin == PixelCoord{512, 0, 0});
    CHECK(blocks[3].origin == PixelCoord{512, 768, 0});
    CHECK(blocks[4].origin == PixelCoord{256, 384, 0});
}

TEST_CASE("random origins are reproducible, in-bounds and non-overlapping") {
    const auto a = random_block_origins(100, 80, 16, 8, 42);
    const auto b = random_block_origins(100, 80, 16, 8, 42);
    CHECK(a == b);
    REQUIRE(a.size() == 8);
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].row >= 0);
        CHECK(a[i].col >= 0);
        CHECK(a[i].row + 16 <= 80);
        CHECK(a[i].col + 16 <= 100);
        for (std::size_t j = i + 1; j < a.size(); ++j) CHECK(!overlap(a[i], a[j], 16));
    }
    const auto c = random_block_origins(100, 80, 16, 8, 43);
    CHECK(a != c);
}

TEST_CASE("impossible block requests are rejected up front") {
    CHECK_THROWS_AS(random_block_origins(10, 10, 8, 4, 1), std::invalid_argument);
    CHECK_THROWS_AS(random_block_origins(10, 10, 11, 1, 1), std::invalid_argument);
}

TEST_CASE("crop copies the window and validates bounds") {
    RasterImage img(6, 4, 3, 8, 0);
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 6; ++c) img.at(r, c, 1) = static_cast<std::uint16_t>(10 * r + c);
    const RasterImage w = crop(img, 1, 2, 2, 3);
    CHECK(w.width == 3);
    CHECK(w.height == 2);
    CHECK(w.at(0, 0, 1) == 12);
    CHECK(w.at(1, 2, 1) == 24);
    CHECK_THROWS_AS(crop(img, 3, 0, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(crop(img, 0, 5, 1, 2), std::invalid_argument);
}

TEST_CASE("random strategy delegates to the origin sampler") {
    RasterImage img(64, 64, 1, 8, 3);
    const auto blocks = crop_blocks(img, 8, CropStrategy::random(5, 7));
    const auto origins = random_block_origins(64, 64, 8, 5, 7);
    REQUIRE(blocks.size() == origins.size());
    for (std::size_t i = 0; i < blocks.size(); ++i) CHECK(blocks[i].origin == origins[i]);
}
