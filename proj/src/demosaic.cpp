#include "agetrace/demosaic.hpp"

#include <stdexcept>

namespace agetrace {

namespace {

// Mirror reflection keeps Bayer-site parity, so interpolation taps always
// land on same-channel sites near the borders.
inline int reflect_index(int v, int size) {
    if (v < 0) return -v;
    if (v >= size) return 2 * size - 2 - v;
    return v;
}

inline std::uint16_t avg2(int a, int b) {
    return static_cast<std::uint16_t>((a + b + 1) / 2);
}

inline std::uint16_t avg4(int a, int b, int c, int d) {
    return static_cast<std::uint16_t>((a + b + c + d + 2) / 4);
}

} // namespace

RasterImage demosaic_bilinear(const RasterImage& bayer) {
    bayer.validate();
    if (bayer.channels != 1)
        throw std::invalid_argument("demosaic expects a single-channel mosaic");
    if (bayer.width % 2 != 0 || bayer.height % 2 != 0)
        throw std::invalid_argument("demosaic expects even dimensions");

    const int w = bayer.width;
    const int h = bayer.height;
    RasterImage out(w, h, 3, bayer.bit_depth);

    auto raw = [&](int r, int c) -> int {
        return bayer.at(reflect_index(r, h), reflect_index(c, w));
    };

    for (int r = 0; r < h; ++r) {
        for (int c = 0; c < w; ++c) {
            const int site = bayer_channel(r, c);
            const int v = bayer.at(r, c);
            std::uint16_t red, green, blue;
            if (site == 0) { // red site
                red = static_cast<std::uint16_t>(v);
                green = avg4(raw(r - 1, c), raw(r + 1, c), raw(r, c - 1), raw(r, c + 1));
                blue = avg4(raw(r - 1, c - 1), raw(r - 1, c + 1), raw(r + 1, c - 1), raw(r + 1, c + 1));
            } else if (site == 2) { // blue site
                blue = static_cast<std::uint16_t>(v);
                green = avg4(raw(r - 1, c), raw(r + 1, c), raw(r, c - 1), raw(r, c + 1));
                red = avg4(raw(r - 1, c - 1), raw(r - 1, c + 1), raw(r + 1, c - 1), raw(r + 1, c + 1));
            } else if (r % 2 == 0) { // green site in a red row
                green = static_cast<std::uint16_t>(v);
                red = avg2(raw(r, c - 1), raw(r, c + 1));
                blue = avg2(raw(r - 1, c), raw(r + 1, c));
            } else { // green site in a blue row
                green = static_cast<std::uint16_t>(v);
                red = avg2(raw(r - 1, c), raw(r + 1, c));
                blue = avg2(raw(r, c - 1), raw(r, c + 1));
            }
            out.at(r, c, 0) = red;
            out.at(r, c, 1) = green;
            out.at(r, c, 2) = blue;
        }
    }
    return out;
}

} // namespace agetrace
