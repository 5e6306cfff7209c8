#include "agetrace/filters.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace agetrace {

namespace {

void check_kernel(const RasterImage& img, int kernel) {
    if (kernel != 3 && kernel != 5)
        throw std::invalid_argument("median kernel must be 3 or 5");
    if (kernel > std::min(img.width, img.height))
        throw std::invalid_argument("median kernel larger than image");
}

inline int clamp_index(int v, int hi) { return v < 0 ? 0 : (v > hi ? hi : v); }

std::uint16_t window_median(const RasterImage& img, int row, int col, int ch, int kernel) {
    std::array<std::uint16_t, 25> w{};
    const int half = kernel / 2;
    int n = 0;
    for (int dr = -half; dr <= half; ++dr) {
        const int r = clamp_index(row + dr, img.height - 1);
        for (int dc = -half; dc <= half; ++dc) {
            const int c = clamp_index(col + dc, img.width - 1);
            w[n++] = img.at(r, c, ch);
        }
    }
    auto mid = w.begin() + n / 2;
    std::nth_element(w.begin(), mid, w.begin() + n);
    return *mid;
}

} // namespace

RasterImage median_filter(const RasterImage& img, int kernel) {
    check_kernel(img, kernel);
    RasterImage out(img.width, img.height, img.channels, img.bit_depth);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            for (int ch = 0; ch < img.channels; ++ch)
                out.at(r, c, ch) = window_median(img, r, c, ch, kernel);
    return out;
}

SignedRaster residual(const RasterImage& img, int kernel) {
    check_kernel(img, kernel);
    SignedRaster out(img.width, img.height, img.channels);
    for (int r = 0; r < img.height; ++r)
        for (int c = 0; c < img.width; ++c)
            for (int ch = 0; ch < img.channels; ++ch)
                out.at(r, c, ch) = static_cast<std::int32_t>(img.at(r, c, ch)) -
                                   static_cast<std::int32_t>(window_median(img, r, c, ch, kernel));
    return out;
}

SiteResidual residual_at(const RasterImage& img, int row, int col, int channel, int kernel) {
    check_kernel(img, kernel);
    if (row < 0 || row >= img.height || col < 0 || col >= img.width ||
        channel < 0 || channel >= img.channels)
        throw std::invalid_argument("residual_at: coordinate out of bounds");
    const double med = window_median(img, row, col, channel, kernel);
    return {static_cast<double>(img.at(row, col, channel)) - med, med};
}

} // namespace agetrace
