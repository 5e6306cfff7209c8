#include "agetrace/sensor_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

#include "agetrace/demosaic.hpp"

namespace agetrace {
namespace {

constexpr double kDaysPerYear = 365.25;

} // namespace

std::string to_string(SensorType t) { return t == SensorType::CCD ? "ccd" : "aps"; }

SensorType sensor_type_from_string(const std::string& s) {
    if (s == "ccd") return SensorType::CCD;
    if (s == "aps") return SensorType::APS;
    throw std::invalid_argument("unknown sensor type: " + s);
}

std::string to_string(DefectType t) {
    switch (t) {
    case DefectType::Hot: return "hot";
    case DefectType::PartiallyStuckHot: return "partially-stuck-hot";
    case DefectType::FullyStuck: return "fully-stuck";
    }
    return "hot";
}

DefectType defect_type_from_string(const std::string& s) {
    if (s == "hot") return DefectType::Hot;
    if (s == "partially-stuck-hot") return DefectType::PartiallyStuckHot;
    if (s == "fully-stuck") return DefectType::FullyStuck;
    throw std::invalid_argument("unknown defect type: " + s);
}

std::string to_string(ResponseModel m) {
    return m == ResponseModel::Additive ? "additive" : "gain-scaled";
}

ResponseModel response_model_from_string(const std::string& s) {
    if (s == "additive") return ResponseModel::Additive;
    if (s == "gain-scaled") return ResponseModel::GainScaled;
    throw std::invalid_argument("unknown response model: " + s);
}

void SensorProfile::validate() const {
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("sensor dimensions must be positive");
    if (pixel_size_um <= 0.0)
        throw std::invalid_argument("pixel size must be positive");
    if (read_noise_sigma < 0.0)
        throw std::invalid_argument("read noise must be nonnegative");
    if (bit_depth != 8 && bit_depth != 16)
        throw std::invalid_argument("bit depth must be 8 or 16");
    if (prnu_field.width != width || prnu_field.height != height || prnu_field.channels != 1)
        throw std::invalid_argument("response deviation field must match sensor dimensions");
    for (double k : prnu_field.data)
        if (!(std::abs(k) < 1.0))
            throw std::invalid_argument("response deviation must satisfy |K| < 1");
}

GrowthCoefficients default_growth_coefficients(SensorType t) {
    if (t == SensorType::CCD) return {std::pow(10.0, -1.849), -2.25, 0.687};
    return {std::pow(10.0, -0.98), -3.03, 0.506};
}

SensorProfile make_profile(int width, int height, double pixel_size_um, SensorType type,
                           int bit_depth, double prnu_sigma, double read_noise_sigma,
                           std::uint64_t seed) {
    SensorProfile p;
    p.width = width;
    p.height = height;
    p.pixel_size_um = pixel_size_um;
    p.sensor_type = type;
    const auto gc = default_growth_coefficients(type);
    p.coeff_A = gc.A;
    p.coeff_B = gc.B;
    p.coeff_C = gc.C;
    p.read_noise_sigma = read_noise_sigma;
    p.bit_depth = bit_depth;
    p.prnu_field = FloatRaster(width, height, 1);
    RngStream rng(seed, "prnu-field");
    for (auto& k : p.prnu_field.data)
        k = std::clamp(rng.normal(0.0, prnu_sigma), -0.5, 0.5);
    p.validate();
    return p;
}

double defect_density(const SensorProfile& profile, double iso) {
    if (iso <= 0.0) throw std::invalid_argument("iso must be positive");
    return profile.coeff_A * std::pow(profile.pixel_size_um, profile.coeff_B) *
           std::pow(iso, profile.coeff_C);
}

double defect_rate_per_day(const SensorProfile& profile, double iso) {
    return defect_density(profile, iso) * profile.area_mm2() / kDaysPerYear;
}

std::vector<DefectRecord> sample_defect_timeline(
    const SensorProfile& profile, double duration_days, double iso_nominal,
    std::uint64_t rng_seed, std::optional<double> rate_per_day_override,
    const DefectParamModel& params) {
    profile.validate();
    if (duration_days <= 0.0)
        throw std::invalid_argument("duration must be positive");
    const double rate =
        rate_per_day_override ? *rate_per_day_override : defect_rate_per_day(profile, iso_nominal);
    if (rate < 0.0) throw std::invalid_argument("rate must be nonnegative");

    const double site_count = static_cast<double>(profile.width) * profile.height;
    if (rate * duration_days > 0.1 * site_count)
        throw std::invalid_argument(
            "expected defect count exceeds 10% of sites; sparse-defect model invalid");

    std::vector<DefectRecord> records;
    if (rate == 0.0) return records;

    RngStream rng(rng_seed, "defect-timeline");
    std::unordered_set<std::uint64_t> used;
    double t = rng.exponential(rate);
    while (t <= duration_days) {
        DefectRecord rec;
        rec.onset_time = t;
        // Position: uniform over sites, drawn again on collision.
        for (;;) {
            const int row = static_cast<int>(rng.uniform_int(0, profile.height - 1));
            const int col = static_cast<int>(rng.uniform_int(0, profile.width - 1));
            const std::uint64_t key =
                static_cast<std::uint64_t>(row) * profile.width + col;
            if (used.insert(key).second) {
                rec.coord = {row, col, 0};
                break;
            }
        }
        rec.dark_current_D = rng.log_uniform(params.d_min, params.d_max);
        const double u_type = rng.uniform();
        const double u_offset = rng.uniform();
        const double offset_draw = rng.uniform(0.0, params.offset_max_fraction * profile.max_value());
        if (u_type < params.fully_stuck_prob) {
            rec.defect_type = DefectType::FullyStuck;
            rec.offset_c = profile.max_value();
        } else if (u_offset < params.offset_prob) {
            rec.defect_type = DefectType::PartiallyStuckHot;
            rec.offset_c = offset_draw;
        } else {
            rec.defect_type = DefectType::Hot;
            rec.offset_c = 0.0;
        }
        records.push_back(rec);
        t += rng.exponential(rate);
    }
    return records;
}

double pixel_response(double illum, const DefectRecord* defect, const AcquisitionMeta& meta,
                      double K, ResponseModel model, double max_value, double theta) {
    if (illum < 0.0) throw std::invalid_argument("illumination must be nonnegative");
    if (defect && defect->defect_type == DefectType::FullyStuck) return max_value;

    const double D = defect ? defect->dark_current_D : 0.0;
    const double c = defect ? defect->offset_c : 0.0;
    double y;
    if (model == ResponseModel::Additive) {
        const double tau = dark_current_scale(meta);
        y = illum + illum * K + tau * D + c + theta;
    } else {
        const double m = iso_gain(meta);
        y = m * (illum * meta.exposure_s + D * meta.exposure_s + c) + theta;
    }
    return std::clamp(y, 0.0, max_value);
}

RasterImage render_bayer(const SensorProfile& profile, const std::vector<DefectRecord>& active,
                         const FloatRaster& illum, const AcquisitionMeta& meta,
                         ResponseModel model, RngStream* noise) {
    profile.validate();
    meta.validate();
    if (illum.width != profile.width || illum.height != profile.height || illum.channels != 1)
        throw std::invalid_argument("illumination field does not match sensor dimensions");

    // Site -> defect lookup.
    std::vector<const DefectRecord*> by_site(
        static_cast<std::size_t>(profile.width) * profile.height, nullptr);
    for (const auto& d : active) {
        if (d.coord.row < 0 || d.coord.row >= profile.height || d.coord.col < 0 ||
            d.coord.col >= profile.width)
            throw std::invalid_argument("defect site outside sensor");
        by_site[static_cast<std::size_t>(d.coord.row) * profile.width + d.coord.col] = &d;
    }

    const double maxv = profile.max_value();
    RasterImage out(profile.width, profile.height, 1, profile.bit_depth);
    for (int r = 0; r < profile.height; ++r) {
        for (int c = 0; c < profile.width; ++c) {
            const std::size_t site = static_cast<std::size_t>(r) * profile.width + c;
            const double theta = noise ? noise->normal(0.0, profile.read_noise_sigma) : 0.0;
            const double y = pixel_response(illum.at(r, c), by_site[site], meta,
                                            profile.prnu_field.at(r, c), model, maxv, theta);
            out.at(r, c) = quantize_sample(y, profile.bit_depth);
        }
    }
    return out;
}

RasterImage render_frame(const SensorProfile& profile, const std::vector<DefectRecord>& active,
                         const FloatRaster& illum, const AcquisitionMeta& meta,
                         ResponseModel model, RngStream* noise) {
    return demosaic_bilinear(render_bayer(profile, active, illum, meta, model, noise));
}

double dust_spot_diameter_mm(const DustParticle& particle, double focal_mm,
                             double aperture_diameter_mm) {
    if (focal_mm <= particle.sensor_distance_mm)
        throw std::invalid_argument("focal length must exceed particle distance");
    const double d = particle.particle_diameter_um * 1e-3; // mm
    const double t = particle.sensor_distance_mm;
    const double f = focal_mm;
    return d * f / (f - t) + aperture_diameter_mm * t / (f - t);
}

RasterImage render_dust(const RasterImage& img, const std::vector<DustParticle>& particles,
                        const AcquisitionMeta& meta, double pixel_size_um, double alpha_max) {
    img.validate();
    meta.validate();
    if (pixel_size_um <= 0.0) throw std::invalid_argument("pixel size must be positive");

    RasterImage out = img;
    const double cr = 0.5 * (img.height - 1);
    const double cc = 0.5 * (img.width - 1);
    const double alpha = alpha_max * (1.0 - std::exp(-meta.f_number / 20.0));

    for (const auto& p : particles) {
        if (p.deposit_time > meta.timestamp) continue;
        const double aperture = aperture_diameter_mm(meta.focal_mm, meta.f_number);
        const double spot_mm = dust_spot_diameter_mm(p, meta.focal_mm, aperture);
        const double radius_px = 0.5 * spot_mm * 1000.0 / pixel_size_um;

        // Radial projection about the image center.
        const double shift = meta.focal_mm / (meta.focal_mm - p.sensor_distance_mm);
        const double prow = cr + (p.pos_row - cr) * shift;
        const double pcol = cc + (p.pos_col - cc) * shift;
        if (prow < 0.0 || prow > img.height - 1 || pcol < 0.0 || pcol > img.width - 1)
            throw std::invalid_argument("projected dust position outside image");

        const double core = 0.6 * radius_px;
        const double rolloff = std::max(0.25 * radius_px, 0.5);
        const int r0 = std::max(0, static_cast<int>(std::floor(prow - 4.0 * radius_px)));
        const int r1 = std::min(img.height - 1, static_cast<int>(std::ceil(prow + 4.0 * radius_px)));
        const int c0 = std::max(0, static_cast<int>(std::floor(pcol - 4.0 * radius_px)));
        const int c1 = std::min(img.width - 1, static_cast<int>(std::ceil(pcol + 4.0 * radius_px)));
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) {
                const double dist = std::hypot(r - prow, c - pcol);
                double a;
                if (dist <= core) {
                    a = alpha;
                } else {
                    const double z = (dist - core) / rolloff;
                    a = alpha * std::exp(-0.5 * z * z);
                }
                if (a < 1e-4) continue;
                for (int ch = 0; ch < img.channels; ++ch) {
                    const double v = out.at(r, c, ch) * (1.0 - a);
                    out.at(r, c, ch) = quantize_sample(v, img.bit_depth);
                }
            }
        }
    }
    return out;
}

} // namespace agetrace
