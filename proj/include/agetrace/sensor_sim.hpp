#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agetrace/raster.hpp"
#include "agetrace/rng.hpp"

namespace agetrace {

enum class SensorType { CCD, APS };

std::string to_string(SensorType t);
SensorType sensor_type_from_string(const std::string& s);

// Simulated device: geometry, defect-growth coefficients, fixed multiplicative
// response deviation field, read noise.
struct SensorProfile {
    int width = 0;
    int height = 0;
    double pixel_size_um = 2.0;
    SensorType sensor_type = SensorType::APS;
    double coeff_A = 0.0; // defects / year / mm^2 at 1 um pixels, unit ISO
    double coeff_B = 0.0; // pixel-size exponent
    double coeff_C = 0.0; // ISO exponent
    FloatRaster prnu_field; // 1-channel, |K| < 1, mean ~ 0
    double read_noise_sigma = 0.0;
    int bit_depth = 8;

    double area_mm2() const {
        return static_cast<double>(width) * height * pixel_size_um * pixel_size_um * 1e-6;
    }
    double max_value() const { return bit_depth == 8 ? 255.0 : 65535.0; }
    void validate() const;
};

// Published growth coefficients per sensor family.
struct GrowthCoefficients {
    double A, B, C;
};
GrowthCoefficients default_growth_coefficients(SensorType t);

// Build a profile with type-default growth coefficients and a seeded
// zero-mean deviation field of the given spread.
SensorProfile make_profile(int width, int height, double pixel_size_um, SensorType type,
                           int bit_depth, double prnu_sigma, double read_noise_sigma,
                           std::uint64_t seed);

enum class DefectType { Hot, PartiallyStuckHot, FullyStuck };

std::string to_string(DefectType t);
DefectType defect_type_from_string(const std::string& s);

// One in-field defect, living on a mosaic-domain site.
struct DefectRecord {
    PixelCoord coord;            // channel always 0 (site address)
    DefectType defect_type = DefectType::Hot;
    double dark_current_D = 0.0; // intensity units per second at unit gain
    double offset_c = 0.0;       // intensity units
    double onset_time = 0.0;     // days
};

// Sampling policy for per-defect parameters.
struct DefectParamModel {
    double d_min = 50.0;          // log-uniform dark-current range (per second)
    double d_max = 3000.0;
    double offset_prob = 0.65;    // P(offset_c > 0) -> partially stuck
    double offset_max_fraction = 0.25; // offset upper bound as fraction of full scale
    double fully_stuck_prob = 0.025;   // small saturated minority
};

// Defect density in defects / year / mm^2 (power law in pixel size and ISO).
double defect_density(const SensorProfile& profile, double iso);

// Density converted to a whole-sensor daily arrival rate.
double defect_rate_per_day(const SensorProfile& profile, double iso);

// Homogeneous Poisson defect timeline over [0, duration_days]: exponential
// inter-arrivals at the given nominal-ISO rate (or an explicit override),
// positions uniform over sites without replacement, parameters per the
// sampling policy. Deterministic given the seed.
std::vector<DefectRecord> sample_defect_timeline(
    const SensorProfile& profile, double duration_days, double iso_nominal,
    std::uint64_t rng_seed, std::optional<double> rate_per_day_override = std::nullopt,
    const DefectParamModel& params = {});

enum class ResponseModel { Additive, GainScaled };

std::string to_string(ResponseModel m);
ResponseModel response_model_from_string(const std::string& s);

// Response of one site to incident illumination I, in real units before
// quantization. Additive: Y = clip(I + I*K + tau*D + c + theta) with
// tau = (iso/100) * exposure_s. GainScaled: Y = clip(m*(I*Te + D*Te + c))
// with m = iso/100 (no multiplicative deviation term in this variant).
// Fully stuck sites saturate regardless of input.
double pixel_response(double illum, const DefectRecord* defect, const AcquisitionMeta& meta,
                      double K, ResponseModel model, double max_value, double theta = 0.0);

// Mosaic-domain exposure: per-site response over a single-channel illumination
// field. Pass a stream to draw read noise; null keeps theta = 0.
RasterImage render_bayer(const SensorProfile& profile, const std::vector<DefectRecord>& active,
                         const FloatRaster& illum, const AcquisitionMeta& meta,
                         ResponseModel model, RngStream* noise = nullptr);

// Full frame: mosaic-domain exposure followed by bilinear CFA interpolation.
// Dark fields use an all-zero illumination field.
RasterImage render_frame(const SensorProfile& profile, const std::vector<DefectRecord>& active,
                         const FloatRaster& illum, const AcquisitionMeta& meta,
                         ResponseModel model, RngStream* noise = nullptr);

// A dust particle resting above the sensor plane.
struct DustParticle {
    double particle_diameter_um = 10.0;
    double sensor_distance_mm = 0.5;
    double pos_row = 0.0; // sensor-plane position, pixel units
    double pos_col = 0.0;
    double deposit_time = 0.0; // days
};

inline double aperture_diameter_mm(double focal_mm, double f_number) {
    return focal_mm / f_number;
}

// Projected shadow diameter: S = D*f/(f-t) + A*t/(f-t). Requires f > t.
double dust_spot_diameter_mm(const DustParticle& particle, double focal_mm,
                             double aperture_diameter_mm);

// Darken the image under each particle deposited by meta.timestamp. Spots are
// flat-core discs with a Gaussian edge; peak attenuation grows with f-number
// as alpha_max * (1 - exp(-f_number/20)). Positions shift radially about the
// image center by f/(f-t). Deterministic.
RasterImage render_dust(const RasterImage& img, const std::vector<DustParticle>& particles,
                        const AcquisitionMeta& meta, double pixel_size_um,
                        double alpha_max = 0.6);

} // namespace agetrace
