#pragma once

#include "agetrace/raster.hpp"

namespace agetrace {

/// RGGB color filter layout: channel index (0=R, 1=G, 2=B) measured at a
/// sensor site.
inline int bayer_channel(int row, int col) {
    const bool even_row = (row % 2) == 0;
    const bool even_col = (col % 2) == 0;
    if (even_row && even_col) return 0;
    if (!even_row && !even_col) return 2;
    return 1;
}

/// Bilinear demosaic of an RGGB mosaic. Measured samples are kept at their
/// sites; the two missing channels per site are interpolated from the nearest
/// same-channel neighbors (edge replication at borders). Width and height
/// must be even.
RasterImage demosaic_bilinear(const RasterImage& bayer);

/// Sample an RGB illumination field at a sensor site through the RGGB mosaic.
inline double mosaic_sample(const FloatRaster& rgb, int row, int col) {
    return rgb.at(row, col, bayer_channel(row, col));
}

} // namespace agetrace
