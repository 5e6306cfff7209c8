#pragma once

#include <string>
#include <vector>

#include "agetrace/raster.hpp"

namespace agetrace {

enum class NbVariant { NE, HE, KDE };

std::string to_string(NbVariant v);
NbVariant nb_variant_from_string(const std::string& s);

// Conditional density of one defect's residual given one class. Only the
// fields of the active variant are populated.
struct NbDensity {
    double mean = 0.0;            // NE
    double sigma = 1e-3;          // NE
    std::vector<double> bin_prob; // HE: smoothed bin masses, sum to 1
    std::vector<double> points;   // KDE: training residuals
    double bandwidth = 0.5;       // KDE
};

struct NBModel {
    NbVariant variant = NbVariant::NE;
    std::vector<PixelCoord> defect_coords; // optional metadata, may be empty
    std::vector<int> classes;              // sorted ascending
    std::vector<double> priors;            // sum to 1
    std::vector<double> he_lo;             // HE binning per defect
    std::vector<double> he_width;
    std::vector<std::vector<NbDensity>> density; // [defect][class]
    int bins = 64;

    std::size_t n_defects() const { return density.size(); }
};

// Fit per-defect, per-class conditional residual densities. samples[i] holds
// one residual per defect for training image i. Requires >= 2 classes and
// >= 2 samples in every class.
NBModel nb_train(NbVariant variant, const std::vector<std::vector<double>>& samples,
                 const std::vector<int>& labels,
                 const std::vector<PixelCoord>& defect_coords = {});

struct NbPrediction {
    int label = 0;
    std::vector<double> posterior; // aligned with model.classes, sums to 1
};

// Naive-Bayes posterior over classes; argmax with smallest-class tie-break.
NbPrediction nb_classify(const NBModel& model, const std::vector<double>& features);

// Log conditional density of a single feature (exposed for density tests).
double nb_log_density(const NBModel& model, std::size_t defect, std::size_t class_index,
                      double x);

} // namespace agetrace
