#include <doctest.h>

#include <stdexcept>

#include <filesystem>
#include <fstream>

#include "agetrace/dataset.hpp"
#include "agetrace/image_io.hpp"

using namespace agetrace;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& leaf) {
    const fs::path p = fs::temp_directory_path() / "agetrace_dataset_test" / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

DatasetSpec tiny_spec() {
    DatasetSpec spec;
    spec.profile.width = 16;
    spec.profile.height = 16;
    spec.profile.bit_depth = 16;
    spec.profile.read_noise_sigma = 1.0;
    spec.session_times = {10.0, 40.0};
    spec.images_per_session = 2;
    spec.dark_fields_per_session = 1;
    spec.bright_fields_per_session = 1;
    spec.scene_kind = SceneKind::Textured;
    spec.rate_per_day_override = 0.05;
    spec.rng_seed = 99;
    spec.dataset_id = "tiny";

    DefectRecord forced;
    forced.coord = {6, 7, 0};
    forced.defect_type = DefectType::Hot;
    forced.dark_current_D = 2000.0;
    forced.onset_time = 1.0;
    spec.forced_defects.push_back(forced);
    return spec;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return std::string(std::istreambuf_iterator<char>(in), {});
}

} // namespace

TEST_CASE("spec json text round trips") {
    DatasetSpec spec = tiny_spec();
    spec.dust.push_back({60.0, 1.0, 5.0, 5.0, 3.0});
    spec.meta_ranges.iso_min = spec.meta_ranges.iso_max = 200.0;
    const std::string text = dataset_spec_to_json_text(spec);
    const DatasetSpec back = dataset_spec_from_json_text(text);
    CHECK(dataset_spec_to_json_text(back) == text);
    CHECK(back.profile.width == 16);
    CHECK(back.forced_defects.size() == 1);
    CHECK(back.dust.size() == 1);
    CHECK(back.rate_per_day_override == doctest::Approx(0.05));
}

TEST_CASE("spec validation rejects malformed descriptions") {
    DatasetSpec spec = tiny_spec();
    spec.session_times = {10.0, 10.0};
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = tiny_spec();
    spec.images_per_session = 0;
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    spec = tiny_spec();
    spec.meta_ranges.iso_min = 800.0; // above iso_max
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("synthesis writes a coherent dataset") {
    const fs::path dir = scratch("synth");
    const DatasetSpec spec = tiny_spec();
    const SynthesisResult result = synthesize_dataset(spec, dir.string());

    // 2 sessions x (1 dark + 1 bright + 2 scenes)
    REQUIRE(result.manifest.records.size() == 8);
    CHECK(fs::exists(dir / "manifest.jsonl"));
    CHECK(fs::exists(dir / "ground_truth.json"));
    CHECK(fs::exists(dir / "spec_echo.json"));

    int scenes = 0, darks = 0, brights = 0;
    double prev_ts = -1.0;
    for (const auto& rec : result.manifest.records) {
        CHECK(fs::exists(dir / rec.path));
        CHECK(rec.meta.timestamp >= prev_ts);
        prev_ts = rec.meta.timestamp;
        switch (rec.meta.kind) {
        case FrameKind::DarkField:
            ++darks;
            CHECK_FALSE(rec.class_label.has_value());
            CHECK(rec.meta.iso == spec.iso_nominal);
            CHECK(rec.meta.exposure_s == spec.meta_ranges.exposure_max_s);
            break;
        case FrameKind::BrightField: ++brights; break;
        case FrameKind::Scene:
            ++scenes;
            REQUIRE(rec.class_label.has_value());
            CHECK(*rec.class_label == rec.session_index);
            CHECK(rec.meta.iso >= spec.meta_ranges.iso_min);
            CHECK(rec.meta.iso <= spec.meta_ranges.iso_max);
            break;
        }
    }
    CHECK(scenes == 4);
    CHECK(darks == 2);
    CHECK(brights == 2);

    // The forced defect must appear in the truth and in the dark frames.
    bool found = false;
    for (const auto& d : result.truth.defects)
        if (d.coord.row == 6 && d.coord.col == 7) found = true;
    CHECK(found);
    const RasterImage dark = read_image((dir / result.manifest.records[0].path).string());
    CHECK(dark.channels == 1);
    CHECK(dark.at(6, 7) > 50);

    // Scene frames are RGB.
    const RasterImage scene = read_image((dir / result.manifest.records[2].path).string());
    CHECK(scene.channels == 3);
}

TEST_CASE("manifest and ground truth files round trip") {
    const fs::path dir = scratch("roundtrip");
    const SynthesisResult result = synthesize_dataset(tiny_spec(), dir.string());

    const DatasetManifest m = load_manifest((dir / "manifest.jsonl").string());
    REQUIRE(m.records.size() == result.manifest.records.size());
    CHECK(m.dataset_id == "tiny");
    for (std::size_t i = 0; i < m.records.size(); ++i) {
        CHECK(m.records[i].path == result.manifest.records[i].path);
        CHECK(m.records[i].session_index == result.manifest.records[i].session_index);
        CHECK(m.records[i].class_label == result.manifest.records[i].class_label);
        CHECK(m.records[i].meta.timestamp == result.manifest.records[i].meta.timestamp);
        CHECK(m.records[i].meta.iso == result.manifest.records[i].meta.iso);
        CHECK(m.records[i].meta.kind == result.manifest.records[i].meta.kind);
    }

    const GroundTruth t = load_ground_truth((dir / "ground_truth.json").string());
    REQUIRE(t.defects.size() == result.truth.defects.size());
    CHECK(t.rng_seed == 99);
    for (std::size_t i = 0; i < t.defects.size(); ++i) {
        CHECK(t.defects[i].coord == result.truth.defects[i].coord);
        CHECK(t.defects[i].onset_time == result.truth.defects[i].onset_time);
        CHECK(t.defects[i].dark_current_D == result.truth.defects[i].dark_current_D);
    }
}

TEST_CASE("synthesis is byte-deterministic") {
    const fs::path a = scratch("det_a");
    const fs::path b = scratch("det_b");
    synthesize_dataset(tiny_spec(), a.string());
    synthesize_dataset(tiny_spec(), b.string());

    CHECK(slurp(a / "manifest.jsonl") == slurp(b / "manifest.jsonl"));
    CHECK(slurp(a / "ground_truth.json") == slurp(b / "ground_truth.json"));
    for (const auto& entry : fs::directory_iterator(a / "images"))
        CHECK(slurp(entry.path()) == slurp(b / "images" / entry.path().filename()));
}

TEST_CASE("labeled loading filters by frame kind and carries labels") {
    const fs::path dir = scratch("load");
    synthesize_dataset(tiny_spec(), dir.string());
    const DatasetManifest m = load_manifest((dir / "manifest.jsonl").string());

    const auto scenes = load_labeled_samples(m, dir.string(), FrameKind::Scene);
    REQUIRE(scenes.size() == 4);
    CHECK(scenes[0].label == 0);
    CHECK(scenes[3].label == 1);
    CHECK(scenes[0].image.channels == 3);

    const auto darks = load_labeled_samples(m, dir.string(), FrameKind::DarkField);
    REQUIRE(darks.size() == 2);
    CHECK(darks[0].label == 0); // falls back to the session index
    const auto all = load_labeled_samples(m, dir.string());
    CHECK(all.size() == 8);
}
