#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "agetrace/model_io.hpp"

using namespace agetrace;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    const auto dir = fs::temp_directory_path() / "agetrace-model-io-tests";
    fs::create_directories(dir);
    return dir;
}

LikelihoodAgeModel sample_ml_model() {
    LikelihoodAgeModel m;
    m.trusted_len = 5;
    m.trusted_timestamps = {0.0, 10.5, 21.25, 33.125, 47.0625};
    m.trusted_labels = {0, 0, 1, 1, 2};
    DefectEstimate a;
    a.coord = {3, 7, 1};
    a.onset_index_j = 2;
    a.before = {0.0, 0.0, 0.0, 1.0 / 3.0, {}};
    a.after = {0.0123456789, 150.75, 4.900000001, 2.5, {"illum"}};
    a.score = -412.03125;
    DefectEstimate b;
    b.coord = {11, 0, 0};
    b.onset_index_j = 5;
    b.before = {0.0, 0.0, 0.0, 0.7071067811865476, {}};
    b.after = {0.0, 220.0, 0.0, 3.0, {"illum", "tau"}};
    b.score = -98.5;
    m.defects = {a, b};
    return m;
}

std::vector<LabeledSample> level_images(int cls, int level, int count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_int_distribution<int> jitter(-5, 5);
    std::vector<LabeledSample> out;
    for (int i = 0; i < count; ++i) {
        LabeledSample s;
        s.image = RasterImage(16, 16, 3, 8);
        for (auto& v : s.image.data) v = static_cast<std::uint16_t>(level + jitter(gen));
        s.label = cls;
        s.meta.timestamp = 50.0 * cls + i;
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST_CASE("age model file round-trips exactly and scores identically") {
    const auto path = (scratch_dir() / "age.json").string();
    const LikelihoodAgeModel m = sample_ml_model();
    save_model(m, path);
    const LikelihoodAgeModel r = load_ml_model(path);

    CHECK(r.trusted_len == m.trusted_len);
    CHECK(r.trusted_timestamps == m.trusted_timestamps);
    CHECK(r.trusted_labels == m.trusted_labels);
    REQUIRE(r.defects.size() == m.defects.size());
    for (std::size_t i = 0; i < m.defects.size(); ++i) {
        CHECK(r.defects[i].coord == m.defects[i].coord);
        CHECK(r.defects[i].onset_index_j == m.defects[i].onset_index_j);
        CHECK(r.defects[i].before.sigma == m.defects[i].before.sigma);
        CHECK(r.defects[i].after.K == m.defects[i].after.K);
        CHECK(r.defects[i].after.D == m.defects[i].after.D);
        CHECK(r.defects[i].after.c == m.defects[i].after.c);
        CHECK(r.defects[i].after.sigma == m.defects[i].after.sigma);
        CHECK(r.defects[i].after.dropped == m.defects[i].after.dropped);
        CHECK(r.defects[i].score == m.defects[i].score);
    }

    AcquisitionMeta q;
    q.iso = 100.0;
    q.exposure_s = 1.0;
    const std::vector<double> residuals = {151.2, 0.3};
    const std::vector<double> illums = {40.0, 12.0};
    const auto before = ml_approximate_age(m, residuals, illums, q);
    const auto after = ml_approximate_age(r, residuals, illums, q);
    CHECK(after.index == before.index);
    CHECK(after.log_likelihood == before.log_likelihood);
}

TEST_CASE("naive-bayes files keep only the active variant's densities") {
    std::mt19937_64 gen(11);
    std::normal_distribution<double> lo(5.0, 1.5), hi(48.0, 1.5);
    std::vector<std::vector<double>> samples;
    std::vector<int> labels;
    for (int i = 0; i < 12; ++i) {
        samples.push_back({lo(gen), hi(gen)});
        labels.push_back(i < 6 ? 1 : 4);
        if (i >= 6) std::swap(samples.back()[0], samples.back()[1]);
    }
    const std::vector<PixelCoord> coords = {{2, 3, 0}, {9, 1, 2}};
    const std::vector<double> query = {6.0, 47.0};

    for (const NbVariant variant : {NbVariant::NE, NbVariant::HE, NbVariant::KDE}) {
        const NBModel m = nb_train(variant, samples, labels, coords);
        const auto path = (scratch_dir() / ("nb-" + to_string(variant) + ".json")).string();
        save_model(m, path);
        const NBModel r = load_nb_model(path);

        CHECK(r.variant == m.variant);
        CHECK(r.bins == m.bins);
        CHECK(r.classes == m.classes);
        CHECK(r.priors == m.priors);
        REQUIRE(r.defect_coords.size() == 2);
        CHECK(r.defect_coords[1] == coords[1]);
        CHECK(r.he_lo == m.he_lo);
        CHECK(r.he_width == m.he_width);
        REQUIRE(r.density.size() == m.density.size());
        for (std::size_t d = 0; d < m.density.size(); ++d)
            for (std::size_t c = 0; c < m.density[d].size(); ++c) {
                const NbDensity& orig = m.density[d][c];
                const NbDensity& back = r.density[d][c];
                switch (variant) {
                case NbVariant::NE:
                    CHECK(back.mean == orig.mean);
                    CHECK(back.sigma == orig.sigma);
                    break;
                case NbVariant::HE: CHECK(back.bin_prob == orig.bin_prob); break;
                case NbVariant::KDE:
                    CHECK(back.points == orig.points);
                    CHECK(back.bandwidth == orig.bandwidth);
                    break;
                }
            }

        const auto p0 = nb_classify(m, query);
        const auto p1 = nb_classify(r, query);
        CHECK(p1.label == p0.label);
        CHECK(p1.posterior == p0.posterior);
    }
}

TEST_CASE("pixelwise-knn files reproduce every block vote") {
    auto train = level_images(0, 70, 6, 1);
    auto t1 = level_images(1, 180, 6, 2);
    train.insert(train.end(), t1.begin(), t1.end());
    auto val = level_images(0, 70, 3, 3);
    auto v1 = level_images(1, 180, 3, 4);
    val.insert(val.end(), v1.begin(), v1.end());

    KnnTrainConfig cfg;
    cfg.block_size = 5;
    cfg.n_blocks = 2;
    cfg.k_select = 6;
    cfg.k_neighbors = 3;
    cfg.seed = 77;
    const PixelwiseKnnModel m = pixelwise_knn_train(train, val, cfg);

    const auto path = (scratch_dir() / "knn.json").string();
    save_model(m, path);
    const PixelwiseKnnModel r = load_knn_model(path);

    CHECK(r.block_size == m.block_size);
    CHECK(r.k_neighbors == m.k_neighbors);
    CHECK(r.classes == m.classes);
    CHECK(r.sub_to_class == m.sub_to_class);
    CHECK(r.seed == m.seed);
    CHECK(r.image_width == m.image_width);
    CHECK(r.image_height == m.image_height);
    REQUIRE(r.blocks.size() == m.blocks.size());
    for (std::size_t b = 0; b < m.blocks.size(); ++b) {
        CHECK(r.blocks[b].origin == m.blocks[b].origin);
        REQUIRE(r.blocks[b].selected.size() == m.blocks[b].selected.size());
        for (std::size_t c = 0; c < m.blocks[b].selected.size(); ++c) {
            const PixelClassifier& orig = m.blocks[b].selected[c];
            const PixelClassifier& back = r.blocks[b].selected[c];
            CHECK(back.pixel == orig.pixel);
            CHECK(back.validation_accuracy == orig.validation_accuracy);
            CHECK(back.sub_labels == orig.sub_labels);
            CHECK(back.features == orig.features);
        }
    }

    const auto queries = level_images(1, 180, 2, 9);
    for (const auto& q : queries) {
        const auto p0 = pixelwise_knn_classify(m, q.image);
        const auto p1 = pixelwise_knn_classify(r, q.image);
        CHECK(p1.label == p0.label);
        CHECK(p1.block_votes == p0.block_votes);
    }
}

TEST_CASE("kind tags identify files and guard the loaders") {
    const auto dir = scratch_dir();
    const auto ml_path = (dir / "kind-ml.json").string();
    save_model(sample_ml_model(), ml_path);
    CHECK(model_kind(ml_path) == "ml-age");
    CHECK_THROWS_AS(load_nb_model(ml_path), std::runtime_error);
    CHECK_THROWS_AS(load_knn_model(ml_path), std::runtime_error);
}

TEST_CASE("unknown schema versions and missing files are rejected") {
    const auto dir = scratch_dir();
    const auto bad_path = (dir / "future.json").string();
    {
        std::ofstream out(bad_path);
        out << R"({"schema_version": 99, "kind": "ml-age", "trusted_len": 1, "defects": []})";
    }
    CHECK_THROWS_AS(load_ml_model(bad_path), std::runtime_error);
    CHECK_THROWS_AS(load_ml_model((dir / "does-not-exist.json").string()), std::runtime_error);
    CHECK_THROWS_AS(model_kind((dir / "does-not-exist.json").string()), std::runtime_error);
}
