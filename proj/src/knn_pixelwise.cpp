#include "agetrace/knn_pixelwise.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "agetrace/blocks.hpp"
#include "agetrace/rng.hpp"

namespace agetrace {
namespace {

std::array<double, kLvFeatureDim> features_from_window(const double w[3][3][3]) {
    std::array<double, kLvFeatureDim> f{};
    int idx = 0;
    for (int ch = 0; ch < 3; ++ch)
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) f[idx++] = w[r][c][ch];
    for (int ch = 0; ch < 3; ++ch) {
        const double center = w[1][1][ch];
        double nsum = 0.0, sq = 0.0;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                if (r != 1 || c != 1) nsum += w[r][c][ch];
                const double d = w[r][c][ch] - center; // center term contributes zero
                sq += d * d;
            }
        f[idx++] = std::abs(center - nsum / 8.0);
        f[idx++] = std::sqrt(sq / 8.0);
    }
    return f;
}

int majority_vote(const std::vector<int>& votes) {
    std::map<int, int> counts;
    for (int v : votes) ++counts[v];
    int best = votes.front();
    int best_count = 0;
    for (const auto& [label, count] : counts) { // map order -> smallest label wins ties
        if (count > best_count) {
            best = label;
            best_count = count;
        }
    }
    return best;
}

} // namespace

std::array<double, kLvFeatureDim> lv_features(const FloatRaster& window) {
    if (window.width != 3 || window.height != 3 || window.channels != 3)
        throw std::invalid_argument("lv_features: expected a 3x3 RGB window");
    double w[3][3][3];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            for (int ch = 0; ch < 3; ++ch) w[r][c][ch] = window.at(r, c, ch);
    return features_from_window(w);
}

std::array<double, kLvFeatureDim> lv_features_at(const RasterImage& img, int row, int col) {
    if (img.channels != 3)
        throw std::invalid_argument("lv_features_at: expected an RGB image");
    if (row < 1 || row >= img.height - 1 || col < 1 || col >= img.width - 1)
        throw std::invalid_argument("lv_features_at: border pixels carry no full window");
    double w[3][3][3];
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            for (int ch = 0; ch < 3; ++ch)
                w[r][c][ch] = img.at(row - 1 + r, col - 1 + c, ch);
    return features_from_window(w);
}

int knn_vote(const std::vector<std::array<float, kLvFeatureDim>>& features,
             const std::vector<int>& labels, const std::array<double, kLvFeatureDim>& query,
             int k_neighbors) {
    if (features.empty() || features.size() != labels.size())
        throw std::invalid_argument("knn_vote: bad training store");
    const int k = std::min<int>(k_neighbors, static_cast<int>(features.size()));

    // (distance^2, index): index as secondary key keeps neighbor ties stable.
    std::vector<std::pair<double, std::size_t>> dist;
    dist.reserve(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        double d2 = 0.0;
        for (int d = 0; d < kLvFeatureDim; ++d) {
            const double diff = query[d] - features[i][d];
            d2 += diff * diff;
        }
        dist.emplace_back(d2, i);
    }
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());

    std::vector<int> votes;
    votes.reserve(k);
    for (int i = 0; i < k; ++i) votes.push_back(labels[dist[i].second]);
    return majority_vote(votes);
}

PixelwiseKnnModel pixelwise_knn_train(const std::vector<LabeledSample>& train,
                                      const std::vector<LabeledSample>& validation,
                                      const KnnTrainConfig& cfg) {
    if (train.empty() || validation.empty())
        throw std::invalid_argument("pixelwise_knn_train: empty train or validation set");
    const int W = train.front().image.width;
    const int H = train.front().image.height;
    for (const auto& s : train)
        if (s.image.width != W || s.image.height != H || s.image.channels != 3)
            throw std::invalid_argument("pixelwise_knn_train: images must share RGB shape");
    for (const auto& s : validation)
        if (s.image.width != W || s.image.height != H || s.image.channels != 3)
            throw std::invalid_argument("pixelwise_knn_train: images must share RGB shape");

    std::vector<int> classes;
    for (const auto& s : train) classes.push_back(s.label);
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());
    if (classes.size() < 2)
        throw std::invalid_argument("pixelwise_knn_train: need >= 2 classes");

    const int inner = cfg.block_size - 2; // non-border pixels per side
    if (inner * inner < cfg.k_select)
        throw std::invalid_argument(
            "pixelwise_knn_train: fewer non-border pixels than classifiers to select");

    PixelwiseKnnModel model;
    model.block_size = cfg.block_size;
    model.k_neighbors = cfg.k_neighbors;
    model.classes = classes;
    model.seed = cfg.seed;
    model.image_width = W;
    model.image_height = H;

    // Virtual sub-classes: each class halved at its median timestamp over
    // train + validation (earlier half first).
    std::vector<LabeledSample const*> all;
    for (const auto& s : train) all.push_back(&s);
    for (const auto& s : validation) all.push_back(&s);
    std::map<int, std::vector<double>> times_by_class;
    for (const auto* s : all) times_by_class[s->label].push_back(s->meta.timestamp);
    std::map<int, double> median_time;
    for (auto& [cls, ts] : times_by_class) {
        std::sort(ts.begin(), ts.end());
        median_time[cls] = ts[(ts.size() - 1) / 2];
    }
    std::map<int, int> class_index;
    for (std::size_t i = 0; i < classes.size(); ++i) {
        class_index[classes[i]] = static_cast<int>(i);
        model.sub_to_class.push_back(classes[i]); // sub 2i
        model.sub_to_class.push_back(classes[i]); // sub 2i + 1
    }
    auto sub_label = [&](const LabeledSample& s) {
        const int half = s.meta.timestamp <= median_time[s.label] ? 0 : 1;
        return class_index[s.label] * 2 + half;
    };

    const auto origins = random_block_origins(W, H, cfg.block_size, cfg.n_blocks,
                                              derive_seed(cfg.seed, "knn-blocks"));

    for (const auto& origin : origins) {
        // Rank every non-border pixel of the block by validation accuracy of a
        // parent-class KNN trained on the train split.
        struct Ranked {
            int r, c;
            double acc;
        };
        std::vector<Ranked> ranked;
        ranked.reserve(static_cast<std::size_t>(inner) * inner);

        for (int r = 1; r < cfg.block_size - 1; ++r) {
            for (int c = 1; c < cfg.block_size - 1; ++c) {
                const int gr = origin.row + r;
                const int gc = origin.col + c;

                std::vector<std::array<float, kLvFeatureDim>> feats;
                std::vector<int> labels;
                feats.reserve(train.size());
                labels.reserve(train.size());
                for (const auto& s : train) {
                    const auto f = lv_features_at(s.image, gr, gc);
                    std::array<float, kLvFeatureDim> ff;
                    for (int d = 0; d < kLvFeatureDim; ++d) ff[d] = static_cast<float>(f[d]);
                    feats.push_back(ff);
                    labels.push_back(s.label);
                }

                int correct = 0;
                for (const auto& s : validation) {
                    const auto q = lv_features_at(s.image, gr, gc);
                    if (knn_vote(feats, labels, q, cfg.k_neighbors) == s.label) ++correct;
                }
                ranked.push_back({r, c, static_cast<double>(correct) / validation.size()});
            }
        }

        std::stable_sort(ranked.begin(), ranked.end(), [&](const Ranked& a, const Ranked& b) {
            if (a.acc != b.acc) return a.acc > b.acc;
            return a.r * cfg.block_size + a.c < b.r * cfg.block_size + b.c;
        });

        BlockModel block;
        block.origin = origin;
        for (int i = 0; i < cfg.k_select; ++i) {
            const auto& rk = ranked[i];
            PixelClassifier pc;
            pc.pixel = {rk.r, rk.c, 0};
            pc.validation_accuracy = rk.acc;
            // Retrain on train + validation with virtual sub-class labels.
            for (const auto* s : all) {
                const auto f = lv_features_at(s->image, origin.row + rk.r, origin.col + rk.c);
                std::array<float, kLvFeatureDim> ff;
                for (int d = 0; d < kLvFeatureDim; ++d) ff[d] = static_cast<float>(f[d]);
                pc.features.push_back(ff);
                pc.sub_labels.push_back(sub_label(*s));
            }
            block.selected.push_back(std::move(pc));
        }
        model.blocks.push_back(std::move(block));
    }
    return model;
}

KnnPrediction pixelwise_knn_classify(const PixelwiseKnnModel& model, const RasterImage& img) {
    if (model.blocks.empty()) throw std::invalid_argument("pixelwise_knn_classify: empty model");
    if (img.width != model.image_width || img.height != model.image_height ||
        img.channels != 3)
        throw std::invalid_argument("pixelwise_knn_classify: image shape mismatch");

    KnnPrediction pred;
    for (const auto& block : model.blocks) {
        std::vector<int> classifier_votes;
        classifier_votes.reserve(block.selected.size());
        for (const auto& pc : block.selected) {
            const auto q = lv_features_at(img, block.origin.row + pc.pixel.row,
                                          block.origin.col + pc.pixel.col);
            const int sub = knn_vote(pc.features, pc.sub_labels, q, model.k_neighbors);
            classifier_votes.push_back(model.sub_to_class.at(sub));
        }
        pred.block_votes.push_back(majority_vote(classifier_votes));
    }
    pred.label = majority_vote(pred.block_votes);
    return pred;
}

} // namespace agetrace
