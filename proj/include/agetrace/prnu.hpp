#pragma once

#include <vector>

#include "agetrace/raster.hpp"

namespace agetrace {

// Per-pixel multiplicative response estimate for one time cluster.
struct PrnuField {
    FloatRaster field;       // same shape as the source images
    double time_label = 0.0; // cluster timestamp (days); informational
};

// Estimate the multiplicative response pattern of a cluster: the mean over
// images of residual / max(median-filtered intensity, 1). Rejects clusters
// with essentially no illumination (dark fields carry no such pattern).
PrnuField prnu_estimate(const std::vector<RasterImage>& cluster, int kernel = 3,
                        double time_label = 0.0);

struct MiOrderResult {
    std::vector<int> order; // permutation of field indices, first < last
    std::vector<std::vector<double>> correlation; // symmetric, unit diagonal
    double score = 0.0;     // sum of adjacent correlations along `order`
    bool tie = false;       // another non-equivalent permutation scores equally
};

// Temporal ordering: the permutation maximizing the summed correlation of
// adjacent fields (exhaustive; refuses more than 8 fields). Orientation is
// canonical (first index < last index); the true order and its reverse are
// equivalent.
MiOrderResult mi_order(const std::vector<PrnuField>& fields);

// Place a single query image within an ordered cluster sequence: estimate its
// pattern and return the index of the most correlated field; ties break
// toward the earlier cluster.
int iip_place(const RasterImage& query, const std::vector<PrnuField>& ordered_fields,
              int kernel = 3);

// Pearson correlation of two equally-shaped fields (exposed for tests).
double field_correlation(const FloatRaster& a, const FloatRaster& b);

} // namespace agetrace
