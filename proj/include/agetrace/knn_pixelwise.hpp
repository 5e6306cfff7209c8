#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "agetrace/dataset.hpp"
#include "agetrace/raster.hpp"

namespace agetrace {

inline constexpr int kLvFeatureDim = 33; // 9 raw values x 3 channels + 2 stats x 3 channels

// Feature vector for a 3x3 RGB window: the 27 raw samples followed, per
// channel, by the absolute center-minus-neighbor-mean deviation and the
// RMS deviation of the window from its center.
std::array<double, kLvFeatureDim> lv_features(const FloatRaster& window);

// Same, sampled around a non-border pixel of an RGB image.
std::array<double, kLvFeatureDim> lv_features_at(const RasterImage& img, int row, int col);

// One per-pixel nearest-neighbor classifier: stored training features with
// their (virtual sub-class) labels.
struct PixelClassifier {
    PixelCoord pixel; // block-local position
    double validation_accuracy = 0.0;
    std::vector<std::array<float, kLvFeatureDim>> features;
    std::vector<int> sub_labels;
};

struct BlockModel {
    PixelCoord origin;
    std::vector<PixelClassifier> selected;
};

struct PixelwiseKnnModel {
    int block_size = 200;
    int k_neighbors = 5;
    std::vector<int> classes;       // sorted parent classes
    std::vector<int> sub_to_class;  // sub-class id -> parent class
    std::vector<BlockModel> blocks;
    std::uint64_t seed = 0;
    int image_width = 0;
    int image_height = 0;
};

struct KnnTrainConfig {
    int block_size = 200;
    int n_blocks = 45;
    int k_select = 100; // classifiers kept per block
    int k_neighbors = 5;
    std::uint64_t seed = 0;
};

// Train per-pixel KNN classifiers on every non-border pixel of randomly
// placed non-overlapping blocks, rank them by validation accuracy (raster
// order on ties), keep the top k_select, then split each class into two
// temporal halves (virtual sub-classes) and retrain the kept classifiers on
// train + validation.
PixelwiseKnnModel pixelwise_knn_train(const std::vector<LabeledSample>& train,
                                      const std::vector<LabeledSample>& validation,
                                      const KnnTrainConfig& cfg = {});

struct KnnPrediction {
    int label = 0;
    std::vector<int> block_votes; // per block, the block-level class vote
};

// Two-level majority vote: per block over its classifiers (sub-class
// predictions folded to parent classes), then over blocks. Ties break toward
// the smallest class.
KnnPrediction pixelwise_knn_classify(const PixelwiseKnnModel& model, const RasterImage& img);

// Single KNN vote over stored features; exposed for the ranking tests.
int knn_vote(const std::vector<std::array<float, kLvFeatureDim>>& features,
             const std::vector<int>& labels, const std::array<double, kLvFeatureDim>& query,
             int k_neighbors);

} // namespace agetrace
