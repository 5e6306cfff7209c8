#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <array>
#include <cmath>

#include "agetrace/knn_pixelwise.hpp"
#include "agetrace/rng.hpp"

using namespace agetrace;

namespace {

// Deterministic per-class image: constant level plus per-image pixel jitter.
LabeledSample make_sample(int label, double level, double timestamp, std::uint64_t seed) {
    LabeledSample s;
    s.image = RasterImage(24, 24, 3, 8);
    RngStream rng(seed);
    for (auto& v : s.image.data) {
        const double x = level + rng.uniform(-6.0, 6.0);
        v = static_cast<std::uint16_t>(std::lround(std::clamp(x, 0.0, 255.0)));
    }
    s.meta.timestamp = timestamp;
    s.label = label;
    return s;
}

} // namespace

TEST_CASE("window statistics: a lone spike produces equal deviation features") {
    FloatRaster w(3, 3, 3, 0.0);
    for (int ch = 0; ch < 3; ++ch) w.at(1, 1, ch) = 255.0;
    const auto f = lv_features(w);

    for (int ch = 0; ch < 3; ++ch) {
        CHECK(f[ch * 9 + 4] == 255.0); // raw center value, row-major layout
        CHECK(f[ch * 9 + 0] == 0.0);
        CHECK(f[27 + ch * 2] == doctest::Approx(255.0));     // |center - neighbor mean|
        CHECK(f[27 + ch * 2 + 1] == doctest::Approx(255.0)); // rms deviation from center
    }
}

TEST_CASE("flat windows have zero deviation features") {
    FloatRaster w(3, 3, 3, 77.0);
    const auto f = lv_features(w);
    for (int ch = 0; ch < 3; ++ch) {
        CHECK(f[27 + ch * 2] == 0.0);
        CHECK(f[27 + ch * 2 + 1] == 0.0);
    }
    CHECK_THROWS_AS(lv_features(FloatRaster(4, 3, 3, 0.0)), std::invalid_argument);
}

TEST_CASE("image sampling matches the window form and refuses borders") {
    RasterImage img(8, 8, 3, 8, 50);
    img.at(3, 4, 2) = 200;
    const auto f = lv_features_at(img, 3, 4);
    CHECK(f[2 * 9 + 4] == 200.0);
    CHECK(f[27 + 2 * 2] == doctest::Approx(150.0));
    CHECK_THROWS_AS(lv_features_at(img, 0, 4), std::invalid_argument);
    CHECK_THROWS_AS(lv_features_at(img, 3, 7), std::invalid_argument);
}

TEST_CASE("nearest-neighbor votes break ties toward the smaller label") {
    std::vector<std::array<float, kLvFeatureDim>> feats(2);
    feats[0].fill(0.0f);
    feats[1].fill(2.0f);
    std::array<double, kLvFeatureDim> query;
    query.fill(1.0); // equidistant
    CHECK(knn_vote(feats, {7, 3}, query, 2) == 3);
    CHECK(knn_vote(feats, {7, 3}, query, 1) == 7); // index order is stable on distance ties
}

TEST_CASE("training splits classes into temporal halves") {
    std::vector<LabeledSample> train, val;
    for (int i = 0; i < 6; ++i) train.push_back(make_sample(0, 60.0, 10.0 * i, 100 + i));
    for (int i = 0; i < 6; ++i) train.push_back(make_sample(1, 180.0, 10.0 * i, 200 + i));
    for (int i = 0; i < 2; ++i) {
        val.push_back(make_sample(0, 60.0, 100.0 + i, 300 + i));
        val.push_back(make_sample(1, 180.0, 100.0 + i, 400 + i));
    }

    KnnTrainConfig cfg;
    cfg.block_size = 6;
    cfg.n_blocks = 3;
    cfg.k_select = 8;
    cfg.k_neighbors = 3;
    cfg.seed = 5;
    const PixelwiseKnnModel model = pixelwise_knn_train(train, val, cfg);

    CHECK(model.classes == std::vector<int>{0, 1});
    CHECK(model.sub_to_class == std::vector<int>{0, 0, 1, 1});
    REQUIRE(model.blocks.size() == 3);
    for (const auto& b : model.blocks) {
        CHECK(b.selected.size() == 8);
        for (const auto& pc : b.selected) {
            CHECK(pc.validation_accuracy == doctest::Approx(1.0));
            CHECK(pc.features.size() == train.size() + val.size());
        }
    }

    // Cleanly separated levels classify perfectly, including unseen draws.
    for (const auto& s : train) CHECK(pixelwise_knn_classify(model, s.image).label == s.label);
    CHECK(pixelwise_knn_classify(model, make_sample(0, 60.0, 999.0, 999).image).label == 0);
    CHECK(pixelwise_knn_classify(model, make_sample(1, 180.0, 999.0, 998).image).label == 1);
}

TEST_CASE("training validates its configuration") {
    std::vector<LabeledSample> train{make_sample(0, 60.0, 0.0, 1), make_sample(0, 60.0, 1.0, 2),
                                     make_sample(1, 180.0, 0.0, 3), make_sample(1, 180.0, 1.0, 4)};
    std::vector<LabeledSample> val{make_sample(0, 60.0, 2.0, 5), make_sample(1, 180.0, 2.0, 6)};

    KnnTrainConfig cfg;
    cfg.block_size = 6;
    cfg.n_blocks = 2;
    cfg.k_select = 17; // inner area is 16
    CHECK_THROWS_AS(pixelwise_knn_train(train, val, cfg), std::invalid_argument);

    cfg.k_select = 8;
    CHECK_THROWS_AS(pixelwise_knn_train({}, val, cfg), std::invalid_argument);

    std::vector<LabeledSample> one_class{make_sample(0, 60.0, 0.0, 1),
                                         make_sample(0, 60.0, 1.0, 2)};
    CHECK_THROWS_AS(pixelwise_knn_train(one_class, val, cfg), std::invalid_argument);

    const PixelwiseKnnModel model = pixelwise_knn_train(train, val, cfg);
    CHECK_THROWS_AS(pixelwise_knn_classify(model, RasterImage(10, 10, 3, 8)),
                    std::invalid_argument);
}
