#pragma once

#include "agetrace/raster.hpp"

namespace agetrace {

/// Median filter with edge replication. Kernel must be 3 or 5 and no larger
/// than the shortest image side. The full window (center included) feeds the
/// median, per channel.
RasterImage median_filter(const RasterImage& img, int kernel);

/// Median-filter residual: img - median_filter(img, kernel), stored signed
/// and never clipped.
SignedRaster residual(const RasterImage& img, int kernel);

/// Residual at a single site, plus the median-filtered value there (used as
/// the illumination proxy when fitting defect parameters).
struct SiteResidual {
    double value;  // img - median
    double illum;  // median-filtered value
};
SiteResidual residual_at(const RasterImage& img, int row, int col, int channel, int kernel);

} // namespace agetrace
