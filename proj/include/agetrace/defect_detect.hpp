#pragma once

#include <string>
#include <vector>

#include "agetrace/raster.hpp"

namespace agetrace {

// Flag sites whose mean value across the given dark-field frames exceeds the
// threshold. Frames must be single-channel and share dimensions. Output is in
// raster order.
std::vector<PixelCoord> detect_defects_dfi(const std::vector<RasterImage>& dfis,
                                           double threshold);

// One chronological observation of a site: its median-filter residual, the
// median-filtered value (illumination proxy) and the capture context.
struct ResidualSample {
    double value = 0.0;
    double illum = 0.0;
    AcquisitionMeta meta;
};

struct ResidualSeries {
    PixelCoord coord;
    std::vector<ResidualSample> samples; // ordered by timestamp
};

// Residual series for each coordinate across a chronologically ordered image
// sequence. coord.channel selects the plane in multi-channel images.
std::vector<ResidualSeries> extract_residual_series(const std::vector<RasterImage>& images,
                                                    const std::vector<AcquisitionMeta>& metas,
                                                    const std::vector<PixelCoord>& coords,
                                                    int kernel = 3);

// Linear response fit on one side of a candidate onset. Collinear regressors
// are dropped (named in `dropped`) rather than failing the fit.
struct SideFit {
    double K = 0.0;
    double D = 0.0;
    double c = 0.0;
    double sigma = 1e-3;
    std::vector<std::string> dropped;
};

struct DefectEstimate {
    PixelCoord coord;
    int onset_index_j = 0; // == series length when never defective
    SideFit before;        // zero-mean residual regime
    SideFit after;         // K*I + D*tau + c regime
    double score = 0.0;    // penalized log-likelihood of the chosen split
};

// Exhaustive change-point search over onset candidates j in {0..len}: the
// pre-onset segment is modeled as zero-mean Gaussian residual noise, the
// post-onset segment as a Gaussian around the fitted linear response. The
// returned j maximizes the total log-likelihood with a per-parameter BIC
// penalty (so an all-zero series resolves to j = len, never defective);
// ties break toward smaller j.
DefectEstimate estimate_onset_and_params(const ResidualSeries& series);

// Pairwise-distance uniformity test. Expected bin counts and the null
// distribution of the statistic come from seeded uniform placements of the
// same number of sites, because pairwise distances are mutually dependent and
// the textbook chi-square tail would overstate significance.
struct DistanceHistogramReport {
    std::vector<double> observed;
    std::vector<double> expected;
    double statistic = 0.0;
    double p_value = 1.0;
    std::string status = "ok"; // or "insufficient data"
    int bins = 16;
};

// Baseline reusable across placements of the same size (the costly part).
struct DistanceBaseline {
    int width = 0, height = 0, count = 0, bins = 16;
    double bin_width = 0.0;
    std::vector<double> expected;
    std::vector<double> null_statistics; // sorted ascending
};

DistanceBaseline make_distance_baseline(int count, int width, int height, int bins = 16,
                                        int expected_placements = 200,
                                        int null_placements = 1999,
                                        std::uint64_t seed = 0x64697374);

DistanceHistogramReport evaluate_distance_histogram(const std::vector<PixelCoord>& coords,
                                                    const DistanceBaseline& baseline);

// Convenience one-shot form with the default baseline parameters.
DistanceHistogramReport inter_defect_distance_histogram(const std::vector<PixelCoord>& coords,
                                                        int width, int height);

} // namespace agetrace
