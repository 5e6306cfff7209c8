#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace agetrace {

enum class FrameKind { DarkField, BrightField, Scene };

std::string to_string(FrameKind kind);
FrameKind frame_kind_from_string(const std::string& s);

/// Integral raster image. Samples are stored widened to uint16_t regardless
/// of bit depth; every value must stay within [0, 2^bit_depth - 1].
/// Layout is row-major with interleaved channels.
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 1;  // 1 or 3
    int bit_depth = 8; // 8 or 16
    std::vector<std::uint16_t> data;

    RasterImage() = default;
    RasterImage(int w, int h, int c, int bd, std::uint16_t fill = 0);

    std::uint16_t max_value() const { return bit_depth == 8 ? 255 : 65535; }

    std::size_t index(int row, int col, int ch = 0) const {
        return (static_cast<std::size_t>(row) * width + col) * channels + ch;
    }
    std::uint16_t at(int row, int col, int ch = 0) const { return data[index(row, col, ch)]; }
    std::uint16_t& at(int row, int col, int ch = 0) { return data[index(row, col, ch)]; }

    bool same_shape(const RasterImage& o) const {
        return width == o.width && height == o.height && channels == o.channels;
    }

    /// Throws std::invalid_argument if shape/data-length/range invariants are broken.
    void validate() const;
};

/// Signed raster for median-filter residuals. Values may span
/// [-(2^bd - 1), 2^bd - 1] and are never clipped.
struct SignedRaster {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::int32_t> data;

    SignedRaster() = default;
    SignedRaster(int w, int h, int c);

    std::size_t index(int row, int col, int ch = 0) const {
        return (static_cast<std::size_t>(row) * width + col) * channels + ch;
    }
    std::int32_t at(int row, int col, int ch = 0) const { return data[index(row, col, ch)]; }
    std::int32_t& at(int row, int col, int ch = 0) { return data[index(row, col, ch)]; }
};

/// Real-valued raster used for illumination fields, PRNU fields and image
/// averages before quantization.
struct FloatRaster {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<double> data;

    FloatRaster() = default;
    FloatRaster(int w, int h, int c, double fill = 0.0);

    std::size_t index(int row, int col, int ch = 0) const {
        return (static_cast<std::size_t>(row) * width + col) * channels + ch;
    }
    double at(int row, int col, int ch = 0) const { return data[index(row, col, ch)]; }
    double& at(int row, int col, int ch = 0) { return data[index(row, col, ch)]; }
};

struct PixelCoord {
    int row = 0;
    int col = 0;
    int channel = 0;

    friend auto operator<=>(const PixelCoord&, const PixelCoord&) = default;
};

/// Per-image capture context. `timestamp` counts days since the device epoch.
struct AcquisitionMeta {
    double timestamp = 0.0;
    double iso = 100.0;
    double exposure_s = 0.01;
    double focal_mm = 50.0;
    double f_number = 8.0;
    FrameKind kind = FrameKind::Scene;
    std::string device_id;

    void validate() const;
};

/// ISO amplification normalized to ISO 100.
inline double iso_gain(const AcquisitionMeta& m) { return m.iso / 100.0; }

/// Combined dark-current scale factor (gain times integration time).
/// Temperature is held constant and absorbed into the dark-current magnitude.
inline double dark_current_scale(const AcquisitionMeta& m) { return iso_gain(m) * m.exposure_s; }

/// Quantize a real sample to the raster range with round-half-even.
std::uint16_t quantize_sample(double value, int bit_depth);

/// Quantize a float raster to an integral image at the given bit depth.
RasterImage quantize(const FloatRaster& f, int bit_depth);

} // namespace agetrace
