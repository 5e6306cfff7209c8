#include "agetrace/blocks.hpp"

#include <stdexcept>

#include "agetrace/rng.hpp"

namespace agetrace {

RasterImage crop(const RasterImage& img, int row0, int col0, int rows, int cols) {
    if (row0 < 0 || col0 < 0 || row0 + rows > img.height || col0 + cols > img.width)
        throw std::invalid_argument("crop outside image bounds");
    RasterImage out(cols, rows, img.channels, img.bit_depth);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            for (int ch = 0; ch < img.channels; ++ch)
                out.at(r, c, ch) = img.at(row0 + r, col0 + c, ch);
    return out;
}

std::vector<PixelCoord> random_block_origins(int width, int height, int block_size,
                                             int count, std::uint64_t seed) {
    if (block_size > std::min(width, height))
        throw std::invalid_argument("block size larger than image");
    if (count <= 0)
        throw std::invalid_argument("block count must be positive");
    if (static_cast<long long>(count) * block_size * block_size >
        static_cast<long long>(width) * height)
        throw std::invalid_argument("requested blocks cannot fit without overlap");

    RngStream rng(seed, "block-origins");
    std::vector<PixelCoord> origins;
    origins.reserve(count);
    const int max_row = height - block_size;
    const int max_col = width - block_size;
    long long attempts = 0;
    const long long attempt_cap = 10000LL * count;
    while (static_cast<int>(origins.size()) < count) {
        if (++attempts > attempt_cap)
            throw std::invalid_argument("could not place non-overlapping blocks");
        const int r = static_cast<int>(rng.uniform_int(0, max_row));
        const int c = static_cast<int>(rng.uniform_int(0, max_col));
        bool overlaps = false;
        for (const auto& o : origins) {
            if (r < o.row + block_size && o.row < r + block_size &&
                c < o.col + block_size && o.col < c + block_size) {
                overlaps = true;
                break;
            }
        }
        if (!overlaps) origins.push_back({r, c, 0});
    }
    return origins;
}

std::vector<BlockCrop> crop_blocks(const RasterImage& img, int block_size, const CropStrategy& strategy) {
    if (block_size <= 0 || block_size > std::min(img.width, img.height))
        throw std::invalid_argument("block size must fit inside the image");

    std::vector<PixelCoord> origins;
    switch (strategy.kind) {
    case CropStrategy::Kind::Grid: {
        for (int r = 0; r + block_size <= img.height; r += block_size)
            for (int c = 0; c + block_size <= img.width; c += block_size)
                origins.push_back({r, c, 0});
        break;
    }
    case CropStrategy::Kind::FiveCrop: {
        const int rmax = img.height - block_size;
        const int cmax = img.width - block_size;
        origins = {{0, 0, 0}, {0, cmax, 0}, {rmax, 0, 0}, {rmax, cmax, 0}, {rmax / 2, cmax / 2, 0}};
        break;
    }
    case CropStrategy::Kind::Random:
        origins = random_block_origins(img.width, img.height, block_size, strategy.count, strategy.seed);
        break;
    }

    std::vector<BlockCrop> out;
    out.reserve(origins.size());
    for (const auto& o : origins)
        out.push_back({crop(img, o.row, o.col, block_size, block_size), o});
    return out;
}

} // namespace agetrace
