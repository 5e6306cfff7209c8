#pragma once

#include <vector>

#include "agetrace/defect_detect.hpp"
#include "agetrace/raster.hpp"

namespace agetrace {

// Defect-based age model: the fitted per-defect onset indices and before/after
// response parameters over a trusted ordering of length trusted_len.
struct LikelihoodAgeModel {
    std::vector<DefectEstimate> defects; // nonempty; sigma > 0 on both sides
    int trusted_len = 0;                 // candidate indices are 0..trusted_len

    // Optional context from the trusted set (may be empty): per-index capture
    // times and class labels, used for truth mapping and class prediction.
    std::vector<double> trusted_timestamps;
    std::vector<int> trusted_labels;

    void validate() const;
};

// Result of scoring one query: index plus per-candidate log-likelihoods.
struct AgeApproximation {
    int index = 0;
    std::vector<double> log_likelihood; // trusted_len + 1 entries
};

// Maximum-likelihood age: the candidate index j maximizing the summed Gaussian
// log-density of the query residuals, each defect contributing its before
// regime when j < onset and its after regime otherwise. Ties break toward the
// smallest index. residuals/illums align with model.defects.
AgeApproximation ml_approximate_age(const LikelihoodAgeModel& model,
                                    const std::vector<double>& residuals,
                                    const std::vector<double>& illums,
                                    const AcquisitionMeta& query_meta);

// Convenience overload: pull residuals and illumination proxies for the
// model's defect sites from a query image.
AgeApproximation ml_approximate_age(const LikelihoodAgeModel& model, const RasterImage& query,
                                    const AcquisitionMeta& query_meta, int kernel = 3);

} // namespace agetrace
