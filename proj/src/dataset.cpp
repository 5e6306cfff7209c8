#include "agetrace/dataset.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "agetrace/image_io.hpp"

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace agetrace {
namespace {

void check_range(double lo, double hi, const char* what) {
    if (!(lo > 0.0) || hi < lo)
        throw std::invalid_argument(std::string("invalid range for ") + what);
}

double draw_range(RngStream& rng, double lo, double hi) {
    return lo == hi ? lo : rng.uniform(lo, hi);
}

std::string frame_file_name(int session, int index, FrameKind kind) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "s%03d_i%03d_%s.png", session, index,
                  kind == FrameKind::DarkField  ? "dark"
                  : kind == FrameKind::BrightField ? "bright"
                                                   : "scene");
    return buf;
}

ordered_json meta_to_json(const AcquisitionMeta& m) {
    return ordered_json{{"timestamp", m.timestamp}, {"iso", m.iso},
                        {"exposure_s", m.exposure_s}, {"focal_mm", m.focal_mm},
                        {"f_number", m.f_number},     {"kind", to_string(m.kind)},
                        {"device_id", m.device_id}};
}

AcquisitionMeta meta_from_json(const ordered_json& j) {
    AcquisitionMeta m;
    m.timestamp = j.at("timestamp").get<double>();
    m.iso = j.at("iso").get<double>();
    m.exposure_s = j.at("exposure_s").get<double>();
    m.focal_mm = j.at("focal_mm").get<double>();
    m.f_number = j.at("f_number").get<double>();
    m.kind = frame_kind_from_string(j.at("kind").get<std::string>());
    m.device_id = j.value("device_id", std::string{});
    m.validate();
    return m;
}

ordered_json defect_to_json(const DefectRecord& d) {
    return ordered_json{{"row", d.coord.row},
                        {"col", d.coord.col},
                        {"type", to_string(d.defect_type)},
                        {"dark_current_D", d.dark_current_D},
                        {"offset_c", d.offset_c},
                        {"onset_time", d.onset_time}};
}

DefectRecord defect_from_json(const ordered_json& j) {
    DefectRecord d;
    d.coord = {j.at("row").get<int>(), j.at("col").get<int>(), 0};
    d.defect_type = defect_type_from_string(j.at("type").get<std::string>());
    d.dark_current_D = j.at("dark_current_D").get<double>();
    d.offset_c = j.at("offset_c").get<double>();
    d.onset_time = j.at("onset_time").get<double>();
    return d;
}

ordered_json dust_to_json(const DustParticle& p) {
    return ordered_json{{"particle_diameter_um", p.particle_diameter_um},
                        {"sensor_distance_mm", p.sensor_distance_mm},
                        {"pos_row", p.pos_row},
                        {"pos_col", p.pos_col},
                        {"deposit_time", p.deposit_time}};
}

DustParticle dust_from_json(const ordered_json& j) {
    DustParticle p;
    p.particle_diameter_um = j.at("particle_diameter_um").get<double>();
    p.sensor_distance_mm = j.at("sensor_distance_mm").get<double>();
    p.pos_row = j.at("pos_row").get<double>();
    p.pos_col = j.at("pos_col").get<double>();
    p.deposit_time = j.at("deposit_time").get<double>();
    return p;
}

} // namespace

void MetaRanges::validate() const {
    check_range(iso_min, iso_max, "iso");
    check_range(exposure_min_s, exposure_max_s, "exposure_s");
    check_range(focal_min_mm, focal_max_mm, "focal_mm");
    check_range(f_number_min, f_number_max, "f_number");
}

SensorProfile build_profile(const ProfileSpec& spec, std::uint64_t seed) {
    SensorProfile p = make_profile(spec.width, spec.height, spec.pixel_size_um,
                                   spec.sensor_type, spec.bit_depth, spec.prnu_sigma,
                                   spec.read_noise_sigma, seed);
    if (spec.coefficients) {
        p.coeff_A = spec.coefficients->A;
        p.coeff_B = spec.coefficients->B;
        p.coeff_C = spec.coefficients->C;
    }
    return p;
}

void DatasetSpec::validate() const {
    if (session_times.empty())
        throw std::invalid_argument("dataset spec: at least one session required");
    for (std::size_t i = 0; i < session_times.size(); ++i) {
        if (session_times[i] < 0.0)
            throw std::invalid_argument("dataset spec: session times must be nonnegative");
        if (i > 0 && session_times[i] <= session_times[i - 1])
            throw std::invalid_argument("dataset spec: session times must be strictly increasing");
    }
    if (images_per_session < 1)
        throw std::invalid_argument("dataset spec: images_per_session must be >= 1");
    if (dark_fields_per_session < 0 || bright_fields_per_session < 0)
        throw std::invalid_argument("dataset spec: negative calibration frame count");
    if (bright_field_level <= 0.0 || bright_field_level > 1.0)
        throw std::invalid_argument("dataset spec: bright_field_level must be in (0, 1]");
    if (iso_nominal <= 0.0)
        throw std::invalid_argument("dataset spec: iso_nominal must be positive");
    if (rate_per_day_override && *rate_per_day_override < 0.0)
        throw std::invalid_argument("dataset spec: rate override must be nonnegative");
    meta_ranges.validate();
}

SynthesisResult synthesize_dataset(const DatasetSpec& spec, const std::string& out_dir) {
    spec.validate();
    const SensorProfile profile = build_profile(spec.profile, spec.rng_seed);
    const double horizon = spec.session_times.back();

    // Defect timeline: sampled process plus any forced records.
    std::vector<DefectRecord> defects;
    if (horizon > 0.0)
        defects = sample_defect_timeline(profile, horizon, spec.iso_nominal, spec.rng_seed,
                                         spec.rate_per_day_override, spec.defect_params);
    defects.insert(defects.end(), spec.forced_defects.begin(), spec.forced_defects.end());
    std::sort(defects.begin(), defects.end(), [](const DefectRecord& a, const DefectRecord& b) {
        return a.onset_time < b.onset_time;
    });

    const fs::path root(out_dir);
    const fs::path img_dir = root / "images";
    std::error_code ec;
    fs::create_directories(img_dir, ec);
    if (ec) throw std::runtime_error("cannot create dataset directory: " + img_dir.string());

    RngStream meta_rng(spec.rng_seed, "meta");
    RngStream scene_rng(spec.rng_seed, "scene");
    RngStream noise_rng(spec.rng_seed, "read-noise");
    RngStream palette_rng(spec.rng_seed, "palette");

    // Per-session palettes for the biased generator: distinct hues around a
    // mid gray so class and mean color coincide by construction.
    std::vector<std::array<double, 3>> palettes(spec.session_times.size());
    for (auto& p : palettes)
        for (auto& v : p) v = palette_rng.uniform(0.25, 0.65);

    const double maxv = profile.max_value();
    DatasetManifest manifest;
    manifest.dataset_id = spec.dataset_id;

    auto write_frame = [&](const RasterImage& img, int session, int index, FrameKind kind,
                           const AcquisitionMeta& meta) {
        const std::string name = frame_file_name(session, index, kind);
        const fs::path p = img_dir / name;
        write_image(p.string(), img);
        ManifestRecord rec;
        rec.path = (fs::path("images") / name).generic_string();
        rec.meta = meta;
        rec.session_index = session;
        if (spec.label_sessions && kind == FrameKind::Scene) rec.class_label = session;
        manifest.records.push_back(std::move(rec));
    };

    for (std::size_t s = 0; s < spec.session_times.size(); ++s) {
        const double t_session = spec.session_times[s];
        std::vector<DefectRecord> active;
        for (const auto& d : defects)
            if (d.onset_time <= t_session) active.push_back(d);

        // Calibration frames: pinned settings, no read noise.
        AcquisitionMeta calib;
        calib.timestamp = t_session;
        calib.iso = spec.iso_nominal;
        calib.exposure_s = spec.meta_ranges.exposure_max_s;
        calib.focal_mm = spec.meta_ranges.focal_max_mm;
        calib.f_number = spec.meta_ranges.f_number_max;
        calib.device_id = spec.device_id;

        for (int i = 0; i < spec.dark_fields_per_session; ++i) {
            AcquisitionMeta meta = calib;
            meta.kind = FrameKind::DarkField;
            const FloatRaster zero(profile.width, profile.height, 1, 0.0);
            write_frame(render_bayer(profile, active, zero, meta, spec.response_model),
                        static_cast<int>(s), i, FrameKind::DarkField, meta);
        }
        for (int i = 0; i < spec.bright_fields_per_session; ++i) {
            AcquisitionMeta meta = calib;
            meta.kind = FrameKind::BrightField;
            const FloatRaster flat(profile.width, profile.height, 1,
                                   spec.bright_field_level * maxv);
            write_frame(render_bayer(profile, active, flat, meta, spec.response_model),
                        static_cast<int>(s), i, FrameKind::BrightField, meta);
        }

        for (int i = 0; i < spec.images_per_session; ++i) {
            AcquisitionMeta meta;
            meta.timestamp = t_session;
            meta.iso = draw_range(meta_rng, spec.meta_ranges.iso_min, spec.meta_ranges.iso_max);
            meta.exposure_s = draw_range(meta_rng, spec.meta_ranges.exposure_min_s,
                                         spec.meta_ranges.exposure_max_s);
            meta.focal_mm = draw_range(meta_rng, spec.meta_ranges.focal_min_mm,
                                       spec.meta_ranges.focal_max_mm);
            meta.f_number = draw_range(meta_rng, spec.meta_ranges.f_number_min,
                                       spec.meta_ranges.f_number_max);
            meta.kind = FrameKind::Scene;
            meta.device_id = spec.device_id;

            SceneParams sp;
            sp.kind = spec.scene_kind;
            sp.base_level = spec.scene_base_level;
            sp.texture_amplitude = spec.scene_texture_amplitude;
            sp.texture_cell_px = spec.scene_texture_cell_px;
            sp.palette = palettes[s];
            const FloatRaster rgb =
                render_scene_rgb(profile.width, profile.height, sp, maxv, scene_rng);
            const FloatRaster illum = mosaic_illumination(rgb);

            RasterImage frame =
                render_frame(profile, active, illum, meta, spec.response_model,
                             spec.scene_read_noise ? &noise_rng : nullptr);
            if (!spec.dust.empty())
                frame = render_dust(frame, spec.dust, meta, profile.pixel_size_um);
            write_frame(frame, static_cast<int>(s), i, FrameKind::Scene, meta);
        }
    }

    GroundTruth truth;
    truth.defects = std::move(defects);
    truth.dust = spec.dust;
    truth.rate_per_day = spec.rate_per_day_override
                             ? *spec.rate_per_day_override
                             : defect_rate_per_day(profile, spec.iso_nominal);
    truth.rng_seed = spec.rng_seed;

    save_manifest(manifest, (root / "manifest.jsonl").string());
    save_ground_truth(truth, (root / "ground_truth.json").string());
    {
        std::ofstream echo(root / "spec_echo.json", std::ios::binary);
        if (!echo) throw std::runtime_error("cannot write spec echo");
        echo << dataset_spec_to_json_text(spec) << '\n';
    }

    return {std::move(manifest), std::move(truth), root.string()};
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest: " + path);
    out << ordered_json{{"schema_version", m.schema_version}, {"dataset_id", m.dataset_id}}.dump()
        << '\n';
    for (const auto& rec : m.records) {
        ordered_json line;
        line["path"] = rec.path;
        line.update(meta_to_json(rec.meta));
        line["session_index"] = rec.session_index;
        if (rec.class_label) line["class_label"] = *rec.class_label;
        out << line.dump() << '\n';
    }
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read manifest: " + path);
    DatasetManifest m;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const ordered_json j = ordered_json::parse(line);
        if (first && j.contains("schema_version") && !j.contains("path")) {
            m.schema_version = j.at("schema_version").get<int>();
            if (m.schema_version != 1)
                throw std::runtime_error("unrecognized manifest schema version");
            m.dataset_id = j.value("dataset_id", std::string{});
            first = false;
            continue;
        }
        first = false;
        ManifestRecord rec;
        rec.path = j.at("path").get<std::string>();
        rec.meta = meta_from_json(j);
        rec.session_index = j.value("session_index", 0);
        if (j.contains("class_label")) rec.class_label = j.at("class_label").get<int>();
        m.records.push_back(std::move(rec));
    }
    return m;
}

void save_ground_truth(const GroundTruth& t, const std::string& path) {
    ordered_json j;
    j["schema_version"] = 1;
    j["rate_per_day"] = t.rate_per_day;
    j["rng_seed"] = t.rng_seed;
    j["defects"] = ordered_json::array();
    for (const auto& d : t.defects) j["defects"].push_back(defect_to_json(d));
    j["dust"] = ordered_json::array();
    for (const auto& p : t.dust) j["dust"].push_back(dust_to_json(p));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write ground truth: " + path);
    out << j.dump(2) << '\n';
}

GroundTruth load_ground_truth(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read ground truth: " + path);
    ordered_json j;
    in >> j;
    GroundTruth t;
    t.rate_per_day = j.value("rate_per_day", 0.0);
    t.rng_seed = j.value("rng_seed", std::uint64_t{0});
    for (const auto& dj : j.at("defects")) t.defects.push_back(defect_from_json(dj));
    for (const auto& pj : j.value("dust", ordered_json::array())) t.dust.push_back(dust_from_json(pj));
    return t;
}

std::vector<LabeledSample> load_labeled_samples(const DatasetManifest& m,
                                                const std::string& base_dir,
                                                std::optional<FrameKind> kind_filter) {
    std::vector<LabeledSample> out;
    for (const auto& rec : m.records) {
        if (kind_filter && rec.meta.kind != *kind_filter) continue;
        LabeledSample s;
        s.image = read_image((fs::path(base_dir) / rec.path).string());
        s.meta = rec.meta;
        s.label = rec.class_label.value_or(rec.session_index);
        out.push_back(std::move(s));
    }
    return out;
}

DatasetSpec dataset_spec_from_json_text(const std::string& text) {
    const ordered_json j = ordered_json::parse(text);
    DatasetSpec spec;

    if (j.contains("profile")) {
        const auto& pj = j.at("profile");
        spec.profile.width = pj.value("width", spec.profile.width);
        spec.profile.height = pj.value("height", spec.profile.height);
        spec.profile.pixel_size_um = pj.value("pixel_size_um", spec.profile.pixel_size_um);
        if (pj.contains("sensor_type"))
            spec.profile.sensor_type =
                sensor_type_from_string(pj.at("sensor_type").get<std::string>());
        spec.profile.bit_depth = pj.value("bit_depth", spec.profile.bit_depth);
        spec.profile.prnu_sigma = pj.value("prnu_sigma", spec.profile.prnu_sigma);
        spec.profile.read_noise_sigma =
            pj.value("read_noise_sigma", spec.profile.read_noise_sigma);
        if (pj.contains("coefficients")) {
            const auto& cj = pj.at("coefficients");
            spec.profile.coefficients =
                GrowthCoefficients{cj.at("A").get<double>(), cj.at("B").get<double>(),
                                   cj.at("C").get<double>()};
        }
    }

    spec.session_times = j.at("session_times").get<std::vector<double>>();
    spec.images_per_session = j.value("images_per_session", spec.images_per_session);
    spec.dark_fields_per_session = j.value("dark_fields_per_session", 0);
    spec.bright_fields_per_session = j.value("bright_fields_per_session", 0);
    spec.bright_field_level = j.value("bright_field_level", spec.bright_field_level);

    if (j.contains("scene")) {
        const auto& sj = j.at("scene");
        if (sj.contains("kind"))
            spec.scene_kind = scene_kind_from_string(sj.at("kind").get<std::string>());
        spec.scene_base_level = sj.value("base_level", spec.scene_base_level);
        spec.scene_texture_amplitude = sj.value("texture_amplitude", spec.scene_texture_amplitude);
        spec.scene_texture_cell_px = sj.value("texture_cell_px", spec.scene_texture_cell_px);
    }

    if (j.contains("meta_ranges")) {
        const auto& rj = j.at("meta_ranges");
        auto& r = spec.meta_ranges;
        r.iso_min = rj.value("iso_min", r.iso_min);
        r.iso_max = rj.value("iso_max", r.iso_max);
        r.exposure_min_s = rj.value("exposure_min_s", r.exposure_min_s);
        r.exposure_max_s = rj.value("exposure_max_s", r.exposure_max_s);
        r.focal_min_mm = rj.value("focal_min_mm", r.focal_min_mm);
        r.focal_max_mm = rj.value("focal_max_mm", r.focal_max_mm);
        r.f_number_min = rj.value("f_number_min", r.f_number_min);
        r.f_number_max = rj.value("f_number_max", r.f_number_max);
    }

    if (j.contains("response_model"))
        spec.response_model =
            response_model_from_string(j.at("response_model").get<std::string>());
    spec.iso_nominal = j.value("iso_nominal", spec.iso_nominal);
    if (j.contains("rate_per_day_override"))
        spec.rate_per_day_override = j.at("rate_per_day_override").get<double>();

    if (j.contains("defect_params")) {
        const auto& dj = j.at("defect_params");
        auto& d = spec.defect_params;
        d.d_min = dj.value("d_min", d.d_min);
        d.d_max = dj.value("d_max", d.d_max);
        d.offset_prob = dj.value("offset_prob", d.offset_prob);
        d.offset_max_fraction = dj.value("offset_max_fraction", d.offset_max_fraction);
        d.fully_stuck_prob = dj.value("fully_stuck_prob", d.fully_stuck_prob);
    }

    for (const auto& fj : j.value("forced_defects", ordered_json::array()))
        spec.forced_defects.push_back(defect_from_json(fj));
    for (const auto& pj : j.value("dust", ordered_json::array()))
        spec.dust.push_back(dust_from_json(pj));

    spec.scene_read_noise = j.value("scene_read_noise", spec.scene_read_noise);
    spec.label_sessions = j.value("label_sessions", spec.label_sessions);
    spec.rng_seed = j.value("rng_seed", std::uint64_t{0});
    spec.dataset_id = j.value("dataset_id", spec.dataset_id);
    spec.device_id = j.value("device_id", spec.device_id);

    spec.validate();
    return spec;
}

std::string dataset_spec_to_json_text(const DatasetSpec& spec) {
    ordered_json j;
    j["profile"] = ordered_json{{"width", spec.profile.width},
                                {"height", spec.profile.height},
                                {"pixel_size_um", spec.profile.pixel_size_um},
                                {"sensor_type", to_string(spec.profile.sensor_type)},
                                {"bit_depth", spec.profile.bit_depth},
                                {"prnu_sigma", spec.profile.prnu_sigma},
                                {"read_noise_sigma", spec.profile.read_noise_sigma}};
    if (spec.profile.coefficients)
        j["profile"]["coefficients"] = ordered_json{{"A", spec.profile.coefficients->A},
                                                    {"B", spec.profile.coefficients->B},
                                                    {"C", spec.profile.coefficients->C}};
    j["session_times"] = spec.session_times;
    j["images_per_session"] = spec.images_per_session;
    j["dark_fields_per_session"] = spec.dark_fields_per_session;
    j["bright_fields_per_session"] = spec.bright_fields_per_session;
    j["bright_field_level"] = spec.bright_field_level;
    j["scene"] = ordered_json{{"kind", to_string(spec.scene_kind)},
                              {"base_level", spec.scene_base_level},
                              {"texture_amplitude", spec.scene_texture_amplitude},
                              {"texture_cell_px", spec.scene_texture_cell_px}};
    j["meta_ranges"] = ordered_json{{"iso_min", spec.meta_ranges.iso_min},
                                    {"iso_max", spec.meta_ranges.iso_max},
                                    {"exposure_min_s", spec.meta_ranges.exposure_min_s},
                                    {"exposure_max_s", spec.meta_ranges.exposure_max_s},
                                    {"focal_min_mm", spec.meta_ranges.focal_min_mm},
                                    {"focal_max_mm", spec.meta_ranges.focal_max_mm},
                                    {"f_number_min", spec.meta_ranges.f_number_min},
                                    {"f_number_max", spec.meta_ranges.f_number_max}};
    j["response_model"] = to_string(spec.response_model);
    j["iso_nominal"] = spec.iso_nominal;
    if (spec.rate_per_day_override) j["rate_per_day_override"] = *spec.rate_per_day_override;
    j["defect_params"] = ordered_json{{"d_min", spec.defect_params.d_min},
                                      {"d_max", spec.defect_params.d_max},
                                      {"offset_prob", spec.defect_params.offset_prob},
                                      {"offset_max_fraction", spec.defect_params.offset_max_fraction},
                                      {"fully_stuck_prob", spec.defect_params.fully_stuck_prob}};
    j["forced_defects"] = ordered_json::array();
    for (const auto& d : spec.forced_defects) j["forced_defects"].push_back(defect_to_json(d));
    j["dust"] = ordered_json::array();
    for (const auto& p : spec.dust) j["dust"].push_back(dust_to_json(p));
    j["scene_read_noise"] = spec.scene_read_noise;
    j["label_sessions"] = spec.label_sessions;
    j["rng_seed"] = spec.rng_seed;
    j["dataset_id"] = spec.dataset_id;
    j["device_id"] = spec.device_id;
    return j.dump(2);
}

} // namespace agetrace
