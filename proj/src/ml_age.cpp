#include "agetrace/ml_age.hpp"

#include <cmath>
#include <stdexcept>

#include "agetrace/filters.hpp"

namespace agetrace {
namespace {

constexpr double kLog2Pi = 1.8378770664093453;

double log_normal_density(double x, double mean, double sigma) {
    const double z = (x - mean) / sigma;
    return -0.5 * kLog2Pi - std::log(sigma) - 0.5 * z * z;
}

} // namespace

void LikelihoodAgeModel::validate() const {
    if (defects.empty())
        throw std::invalid_argument("age model: defect set is empty");
    if (trusted_len < 1)
        throw std::invalid_argument("age model: trusted length must be >= 1");
    for (const auto& d : defects) {
        if (d.before.sigma <= 0.0 || d.after.sigma <= 0.0)
            throw std::invalid_argument("age model: nonpositive sigma");
        if (d.onset_index_j < 0 || d.onset_index_j > trusted_len)
            throw std::invalid_argument("age model: onset outside trusted range");
    }
    if (!trusted_timestamps.empty() &&
        trusted_timestamps.size() != static_cast<std::size_t>(trusted_len))
        throw std::invalid_argument("age model: timestamp count != trusted length");
    if (!trusted_labels.empty() && trusted_labels.size() != static_cast<std::size_t>(trusted_len))
        throw std::invalid_argument("age model: label count != trusted length");
}

AgeApproximation ml_approximate_age(const LikelihoodAgeModel& model,
                                    const std::vector<double>& residuals,
                                    const std::vector<double>& illums,
                                    const AcquisitionMeta& query_meta) {
    model.validate();
    if (residuals.size() != model.defects.size() || illums.size() != model.defects.size())
        throw std::invalid_argument("ml_approximate_age: residuals must cover the defect set");

    const double tau = dark_current_scale(query_meta);
    AgeApproximation out;
    out.log_likelihood.assign(static_cast<std::size_t>(model.trusted_len) + 1, 0.0);

    // Each defect contributes one of two per-regime terms; precompute both.
    for (std::size_t i = 0; i < model.defects.size(); ++i) {
        const auto& d = model.defects[i];
        const double before_ll = log_normal_density(residuals[i], 0.0, d.before.sigma);
        const double after_mean = illums[i] * d.after.K + tau * d.after.D + d.after.c;
        const double after_ll = log_normal_density(residuals[i], after_mean, d.after.sigma);
        for (int j = 0; j <= model.trusted_len; ++j)
            out.log_likelihood[j] += j >= d.onset_index_j ? after_ll : before_ll;
    }

    out.index = 0;
    for (int j = 1; j <= model.trusted_len; ++j)
        if (out.log_likelihood[j] > out.log_likelihood[out.index]) out.index = j;
    return out;
}

AgeApproximation ml_approximate_age(const LikelihoodAgeModel& model, const RasterImage& query,
                                    const AcquisitionMeta& query_meta, int kernel) {
    model.validate();
    std::vector<double> residuals, illums;
    residuals.reserve(model.defects.size());
    illums.reserve(model.defects.size());
    for (const auto& d : model.defects) {
        const auto& c = d.coord;
        if (c.row < 0 || c.row >= query.height || c.col < 0 || c.col >= query.width ||
            c.channel < 0 || c.channel >= query.channels)
            throw std::invalid_argument("ml_approximate_age: defect site outside query image");
        const auto sr = residual_at(query, c.row, c.col, c.channel, kernel);
        residuals.push_back(sr.value);
        illums.push_back(sr.illum);
    }
    return ml_approximate_age(model, residuals, illums, query_meta);
}

} // namespace agetrace
