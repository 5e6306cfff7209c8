#pragma once

#include <optional>
#include <string>
#include <vector>

#include "agetrace/raster.hpp"
#include "agetrace/scene.hpp"
#include "agetrace/sensor_sim.hpp"

namespace agetrace {

// An image with its capture context and an age-class label. Shared by the
// classifier trainers and the bias audit.
struct LabeledSample {
    RasterImage image;
    AcquisitionMeta meta;
    int label = 0;
};

// Sampling ranges for per-image capture settings. min == max pins a value.
struct MetaRanges {
    double iso_min = 100.0, iso_max = 400.0;
    double exposure_min_s = 0.005, exposure_max_s = 0.05;
    double focal_min_mm = 24.0, focal_max_mm = 70.0;
    double f_number_min = 2.8, f_number_max = 16.0;
    void validate() const;
};

// Device description from which a SensorProfile is built deterministically.
struct ProfileSpec {
    int width = 64;
    int height = 64;
    double pixel_size_um = 2.0;
    SensorType sensor_type = SensorType::APS;
    int bit_depth = 8;
    double prnu_sigma = 0.02;
    double read_noise_sigma = 0.0;
    std::optional<GrowthCoefficients> coefficients; // default: per sensor type
};

SensorProfile build_profile(const ProfileSpec& spec, std::uint64_t seed);

// Full description of a synthetic temporal dataset.
struct DatasetSpec {
    ProfileSpec profile;
    std::vector<double> session_times; // days, strictly increasing
    int images_per_session = 1;
    int dark_fields_per_session = 0;
    int bright_fields_per_session = 0;
    double bright_field_level = 0.6; // fraction of full scale

    SceneKind scene_kind = SceneKind::Flat;
    double scene_base_level = 0.45;
    double scene_texture_amplitude = 0.20;
    int scene_texture_cell_px = 16;

    MetaRanges meta_ranges;
    ResponseModel response_model = ResponseModel::Additive;
    double iso_nominal = 400.0;
    std::optional<double> rate_per_day_override; // bypass the density law
    DefectParamModel defect_params;
    std::vector<DefectRecord> forced_defects; // merged with the sampled timeline
    std::vector<DustParticle> dust;
    bool scene_read_noise = true; // calibration fields are always noiseless
    bool label_sessions = true;   // class_label = session index

    std::uint64_t rng_seed = 0;
    std::string dataset_id = "sim";
    std::string device_id = "device-0";

    void validate() const;
};

DatasetSpec dataset_spec_from_json_text(const std::string& text);
std::string dataset_spec_to_json_text(const DatasetSpec& spec);

struct ManifestRecord {
    std::string path; // relative to the manifest's directory
    AcquisitionMeta meta;
    int session_index = 0;
    std::optional<int> class_label;
};

struct DatasetManifest {
    std::string dataset_id;
    int schema_version = 1;
    std::vector<ManifestRecord> records;
};

struct GroundTruth {
    std::vector<DefectRecord> defects; // sorted by onset
    std::vector<DustParticle> dust;
    double rate_per_day = 0.0;
    std::uint64_t rng_seed = 0;
};

struct SynthesisResult {
    DatasetManifest manifest;
    GroundTruth truth;
    std::string out_dir;
};

// Render and write the dataset: out_dir/{images/, manifest.jsonl,
// ground_truth.json, spec_echo.json}. Byte-identical across runs with the
// same spec.
SynthesisResult synthesize_dataset(const DatasetSpec& spec, const std::string& out_dir);

// JSON-lines manifest: an optional header line ({"schema_version", ...})
// followed by one record object per line.
void save_manifest(const DatasetManifest& m, const std::string& path);
DatasetManifest load_manifest(const std::string& path);

void save_ground_truth(const GroundTruth& t, const std::string& path);
GroundTruth load_ground_truth(const std::string& path);

// Load images referenced by a manifest. kind_filter restricts to one frame
// kind; labels come from class_label when present, else session_index.
std::vector<LabeledSample> load_labeled_samples(const DatasetManifest& m,
                                                const std::string& base_dir,
                                                std::optional<FrameKind> kind_filter = std::nullopt);

} // namespace agetrace
