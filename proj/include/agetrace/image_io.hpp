#pragma once

#include <string>

#include "agetrace/raster.hpp"

namespace agetrace {

// Formats are inferred from the file extension: .png, .pgm (1 channel),
// .ppm (3 channels). PGM/PPM use the binary variants (P5/P6); 16-bit
// samples are big-endian per the netpbm convention. Reads and writes are
// bit-exact round trips for both depths.
RasterImage read_image(const std::string& path);
void write_image(const std::string& path, const RasterImage& img);

} // namespace agetrace
