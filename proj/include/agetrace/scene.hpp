#pragma once

#include <array>
#include <string>

#include "agetrace/raster.hpp"
#include "agetrace/rng.hpp"

namespace agetrace {

enum class SceneKind { Flat, Gradient, Textured, Biased };

std::string to_string(SceneKind kind);
SceneKind scene_kind_from_string(const std::string& s);

// Generator parameters. Levels and amplitudes are fractions of full scale, so
// the same description works at 8 and 16 bit.
struct SceneParams {
    SceneKind kind = SceneKind::Flat;
    double base_level = 0.45;
    double texture_amplitude = 0.20;
    int texture_cell_px = 16;                       // value-noise lattice pitch
    std::array<double, 3> palette = {0.45, 0.45, 0.45}; // Biased: class mean color
};

// RGB illumination field with values in [0, max_value]. Textured/Biased draw
// from the supplied stream; Flat/Gradient ignore it.
FloatRaster render_scene_rgb(int width, int height, const SceneParams& params,
                             double max_value, RngStream& rng);

// Reduce an RGB illumination field to the single-channel field seen by the
// sensor through the color filter array (per-site channel selection).
FloatRaster mosaic_illumination(const FloatRaster& rgb);

} // namespace agetrace
