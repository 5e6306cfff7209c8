#include "agetrace/scene.hpp"

#include <algorithm>
#include <stdexcept>

#include "agetrace/demosaic.hpp"

namespace agetrace {
namespace {

// Value noise in [-1, 1]: random lattice, bilinear interpolation between knots.
FloatRaster value_noise(int width, int height, int cell_px, RngStream& rng) {
    const int gw = width / cell_px + 2;
    const int gh = height / cell_px + 2;
    std::vector<double> knots(static_cast<std::size_t>(gw) * gh);
    for (auto& k : knots) k = rng.uniform(-1.0, 1.0);

    FloatRaster out(width, height, 1);
    for (int r = 0; r < height; ++r) {
        const double gy = static_cast<double>(r) / cell_px;
        const int y0 = static_cast<int>(gy);
        const double fy = gy - y0;
        for (int c = 0; c < width; ++c) {
            const double gx = static_cast<double>(c) / cell_px;
            const int x0 = static_cast<int>(gx);
            const double fx = gx - x0;
            const double k00 = knots[static_cast<std::size_t>(y0) * gw + x0];
            const double k01 = knots[static_cast<std::size_t>(y0) * gw + x0 + 1];
            const double k10 = knots[static_cast<std::size_t>(y0 + 1) * gw + x0];
            const double k11 = knots[static_cast<std::size_t>(y0 + 1) * gw + x0 + 1];
            const double top = k00 + (k01 - k00) * fx;
            const double bot = k10 + (k11 - k10) * fx;
            out.at(r, c) = top + (bot - top) * fy;
        }
    }
    return out;
}

} // namespace

std::string to_string(SceneKind kind) {
    switch (kind) {
    case SceneKind::Flat: return "flat";
    case SceneKind::Gradient: return "gradient";
    case SceneKind::Textured: return "textured";
    case SceneKind::Biased: return "biased";
    }
    return "flat";
}

SceneKind scene_kind_from_string(const std::string& s) {
    if (s == "flat") return SceneKind::Flat;
    if (s == "gradient") return SceneKind::Gradient;
    if (s == "textured") return SceneKind::Textured;
    if (s == "biased") return SceneKind::Biased;
    throw std::invalid_argument("unknown scene kind: " + s);
}

FloatRaster render_scene_rgb(int width, int height, const SceneParams& params,
                             double max_value, RngStream& rng) {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("scene dimensions must be positive");
    if (params.texture_cell_px <= 0)
        throw std::invalid_argument("texture cell must be positive");

    FloatRaster rgb(width, height, 3);
    const double base = params.base_level * max_value;
    const double amp = params.texture_amplitude * max_value;

    switch (params.kind) {
    case SceneKind::Flat: {
        std::fill(rgb.data.begin(), rgb.data.end(), base);
        break;
    }
    case SceneKind::Gradient: {
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c) {
                const double t = width > 1 ? static_cast<double>(c) / (width - 1) : 0.0;
                const double v = base + amp * (2.0 * t - 1.0);
                for (int ch = 0; ch < 3; ++ch) rgb.at(r, c, ch) = v;
            }
        break;
    }
    case SceneKind::Textured: {
        // Shared luminance structure plus weaker independent chroma variation.
        const FloatRaster lum = value_noise(width, height, params.texture_cell_px, rng);
        std::array<FloatRaster, 3> chroma;
        for (auto& ch : chroma)
            ch = value_noise(width, height, std::max(2, params.texture_cell_px * 2), rng);
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c)
                for (int ch = 0; ch < 3; ++ch)
                    rgb.at(r, c, ch) =
                        base + amp * (0.7 * lum.at(r, c) + 0.3 * chroma[ch].at(r, c));
        break;
    }
    case SceneKind::Biased: {
        // Class palette fixes the mean color; shared texture varies the content.
        const FloatRaster lum = value_noise(width, height, params.texture_cell_px, rng);
        for (int r = 0; r < height; ++r)
            for (int c = 0; c < width; ++c)
                for (int ch = 0; ch < 3; ++ch)
                    rgb.at(r, c, ch) = params.palette[ch] * max_value + amp * lum.at(r, c);
        break;
    }
    }

    for (auto& v : rgb.data) v = std::clamp(v, 0.0, max_value);
    return rgb;
}

FloatRaster mosaic_illumination(const FloatRaster& rgb) {
    if (rgb.channels != 3)
        throw std::invalid_argument("mosaic_illumination expects an RGB field");
    FloatRaster out(rgb.width, rgb.height, 1);
    for (int r = 0; r < rgb.height; ++r)
        for (int c = 0; c < rgb.width; ++c)
            out.at(r, c) = rgb.at(r, c, bayer_channel(r, c));
    return out;
}

} // namespace agetrace
