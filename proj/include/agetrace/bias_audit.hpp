#pragma once

#include <functional>
#include <string>
#include <vector>

#include "agetrace/dataset.hpp"
#include "agetrace/raster.hpp"

namespace agetrace {

// Average-image variants for one class: the subsample mean, its constant
// color, the mean re-centered at mid gray (structure only), and the
// median-filtered mean.
struct AverageImageSet {
    int class_label = 0;
    AcquisitionMeta rep_meta; // class-mean capture context, for meta-aware classifiers
    RasterImage mean;         // Y-bar
    RasterImage constant;     // Y-bar_c
    RasterImage structure;    // Y-bar_r
    RasterImage filtered;     // Y-bar_f
};

// For each of n_sets draws: per class, average a random subsample (fraction of
// the class samples) and derive the four variants. Deterministic per seed.
std::vector<std::vector<AverageImageSet>> average_images(
    const std::vector<LabeledSample>& samples, double subsample_fraction = 0.8,
    int n_sets = 20, std::uint64_t seed = 0);

using Classifier = std::function<int(const RasterImage&, const AcquisitionMeta&)>;

struct AccuracyTable {
    double acc_original = 0.0;  // held-out originals (S)
    double acc_mean = 0.0;      // Y-bar
    double acc_constant = 0.0;  // Y-bar_c
    double acc_structure = 0.0; // Y-bar_r
    double acc_filtered = 0.0;  // Y-bar_f
    double chance = 0.0;
    int failures = 0; // predictions that threw; excluded from denominators
};

// Accuracy of a classifier on the original held-out set and on each
// average-image variant (averaged over the sets).
AccuracyTable evaluate_input_suite(const Classifier& classifier,
                                   const std::vector<std::vector<AverageImageSet>>& sets,
                                   const std::vector<LabeledSample>& test_originals);

enum class BiasVerdict { AgeSignalConsistent, ContentBiasSuspected, Inconclusive };

std::string to_string(BiasVerdict v);

struct VerdictThresholds {
    double delta1 = 0.10; // allowed drop from acc(S) to acc(Y-bar)
    double delta2 = 0.10; // allowed excess over chance for Y-bar_c / Y-bar_f
    double delta3 = 0.15; // constant-color excess that flags bias
};

// Age-signal-consistent iff the mean image keeps the original accuracy while
// the color-only and defect-free variants stay near chance; bias suspected
// when color alone classifies well; inconclusive otherwise.
BiasVerdict bias_verdict(const AccuracyTable& table, const VerdictThresholds& t = {});

struct MaskedAccuracy {
    double masked = 0.0;
    double unmasked = 0.0;
    int failures = 0;
};

// Accuracy with inputs multiplied by a binary mask (nonzero -> keep pixel),
// reported next to the unmasked accuracy.
MaskedAccuracy mask_evaluate(const Classifier& classifier, const RasterImage& mask,
                             const std::vector<LabeledSample>& test);

} // namespace agetrace
