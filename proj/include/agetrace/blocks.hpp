#pragma once

#include <cstdint>
#include <vector>

#include "agetrace/raster.hpp"

namespace agetrace {

struct BlockCrop {
    RasterImage block;
    PixelCoord origin; // top-left (row, col)
};

struct CropStrategy {
    enum class Kind { Grid, FiveCrop, Random };
    Kind kind = Kind::Grid;
    int count = 0;          // Random only
    std::uint64_t seed = 0; // Random only

    static CropStrategy grid() { return {Kind::Grid, 0, 0}; }
    static CropStrategy five_crop() { return {Kind::FiveCrop, 0, 0}; }
    static CropStrategy random(int n, std::uint64_t seed) { return {Kind::Random, n, seed}; }
};

/// Non-overlapping block extraction. Grid tiles left-to-right, top-to-bottom;
/// five-crop takes the four corners plus the center; random draws `count`
/// non-overlapping origins deterministically from the seed.
std::vector<BlockCrop> crop_blocks(const RasterImage& img, int block_size, const CropStrategy& strategy);

/// Origins only, for callers that re-crop many images at fixed locations.
std::vector<PixelCoord> random_block_origins(int width, int height, int block_size,
                                             int count, std::uint64_t seed);

RasterImage crop(const RasterImage& img, int row0, int col0, int rows, int cols);

} // namespace agetrace
