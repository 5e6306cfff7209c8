#include "agetrace/raster.hpp"

#include <cmath>
#include <stdexcept>

namespace agetrace {

std::string to_string(FrameKind kind) {
    switch (kind) {
    case FrameKind::DarkField: return "dark-field";
    case FrameKind::BrightField: return "bright-field";
    case FrameKind::Scene: return "scene";
    }
    return "scene";
}

FrameKind frame_kind_from_string(const std::string& s) {
    if (s == "dark-field") return FrameKind::DarkField;
    if (s == "bright-field") return FrameKind::BrightField;
    if (s == "scene") return FrameKind::Scene;
    throw std::invalid_argument("unknown frame kind: " + s);
}

RasterImage::RasterImage(int w, int h, int c, int bd, std::uint16_t fill)
    : width(w), height(h), channels(c), bit_depth(bd),
      data(static_cast<std::size_t>(w) * h * c, fill) {
    validate();
}

void RasterImage::validate() const {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("raster dimensions must be positive");
    if (channels != 1 && channels != 3)
        throw std::invalid_argument("raster channels must be 1 or 3");
    if (bit_depth != 8 && bit_depth != 16)
        throw std::invalid_argument("raster bit depth must be 8 or 16");
    if (data.size() != static_cast<std::size_t>(width) * height * channels)
        throw std::invalid_argument("raster data length does not match dimensions");
    const std::uint16_t maxv = max_value();
    for (std::uint16_t v : data)
        if (v > maxv)
            throw std::invalid_argument("raster sample exceeds bit-depth range");
}

SignedRaster::SignedRaster(int w, int h, int c)
    : width(w), height(h), channels(c),
      data(static_cast<std::size_t>(w) * h * c, 0) {}

FloatRaster::FloatRaster(int w, int h, int c, double fill)
    : width(w), height(h), channels(c),
      data(static_cast<std::size_t>(w) * h * c, fill) {}

void AcquisitionMeta::validate() const {
    if (timestamp < 0.0) throw std::invalid_argument("timestamp must be >= 0");
    if (iso <= 0.0) throw std::invalid_argument("iso must be > 0");
    if (exposure_s <= 0.0) throw std::invalid_argument("exposure_s must be > 0");
    if (focal_mm <= 0.0) throw std::invalid_argument("focal_mm must be > 0");
    if (f_number <= 0.0) throw std::invalid_argument("f_number must be > 0");
}

std::uint16_t quantize_sample(double value, int bit_depth) {
    const double maxv = bit_depth == 8 ? 255.0 : 65535.0;
    if (value <= 0.0) return 0;
    if (value >= maxv) return static_cast<std::uint16_t>(maxv);
    // nearbyint under the default FP environment rounds half to even
    return static_cast<std::uint16_t>(std::nearbyint(value));
}

RasterImage quantize(const FloatRaster& f, int bit_depth) {
    RasterImage out(f.width, f.height, f.channels, bit_depth);
    for (std::size_t i = 0; i < f.data.size(); ++i)
        out.data[i] = quantize_sample(f.data[i], bit_depth);
    return out;
}

} // namespace agetrace
