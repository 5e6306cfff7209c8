#include "agetrace/naive_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace agetrace {
namespace {

constexpr double kSigmaFloor = 1e-3;
constexpr double kBandwidthFloor = 0.5;
constexpr double kLog2Pi = 1.8378770664093453;

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / (xs.size() - 1));
}

} // namespace

std::string to_string(NbVariant v) {
    switch (v) {
    case NbVariant::NE: return "ne";
    case NbVariant::HE: return "he";
    case NbVariant::KDE: return "kde";
    }
    return "ne";
}

NbVariant nb_variant_from_string(const std::string& s) {
    if (s == "ne") return NbVariant::NE;
    if (s == "he") return NbVariant::HE;
    if (s == "kde") return NbVariant::KDE;
    throw std::invalid_argument("unknown naive-bayes variant: " + s);
}

NBModel nb_train(NbVariant variant, const std::vector<std::vector<double>>& samples,
                 const std::vector<int>& labels, const std::vector<PixelCoord>& defect_coords) {
    if (samples.size() != labels.size())
        throw std::invalid_argument("nb_train: sample/label count mismatch");
    if (samples.empty()) throw std::invalid_argument("nb_train: no samples");
    const std::size_t n_defects = samples.front().size();
    if (n_defects == 0) throw std::invalid_argument("nb_train: empty feature vectors");
    for (const auto& s : samples)
        if (s.size() != n_defects)
            throw std::invalid_argument("nb_train: inconsistent feature dimension");
    if (!defect_coords.empty() && defect_coords.size() != n_defects)
        throw std::invalid_argument("nb_train: coordinate/feature dimension mismatch");

    // Group sample indices per class.
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
    if (by_class.size() < 2) throw std::invalid_argument("nb_train: need >= 2 classes");
    for (const auto& [cls, idx] : by_class)
        if (idx.size() < 2)
            throw std::invalid_argument("nb_train: need >= 2 samples per class");

    NBModel model;
    model.variant = variant;
    model.defect_coords = defect_coords;
    for (const auto& [cls, idx] : by_class) {
        model.classes.push_back(cls);
        model.priors.push_back(static_cast<double>(idx.size()) / samples.size());
    }

    model.density.assign(n_defects, std::vector<NbDensity>(model.classes.size()));
    if (variant == NbVariant::HE) {
        model.he_lo.assign(n_defects, 0.0);
        model.he_width.assign(n_defects, 1.0);
    }

    for (std::size_t d = 0; d < n_defects; ++d) {
        double lo = samples[0][d], hi = samples[0][d];
        for (const auto& s : samples) {
            lo = std::min(lo, s[d]);
            hi = std::max(hi, s[d]);
        }
        if (variant == NbVariant::HE) {
            model.he_lo[d] = lo;
            model.he_width[d] = hi > lo ? (hi - lo) / model.bins : 1.0;
        }

        std::size_t k = 0;
        for (const auto& [cls, idx] : by_class) {
            std::vector<double> xs;
            xs.reserve(idx.size());
            for (std::size_t i : idx) xs.push_back(samples[i][d]);

            NbDensity& den = model.density[d][k];
            switch (variant) {
            case NbVariant::NE: {
                double mean = 0.0;
                for (double x : xs) mean += x;
                mean /= xs.size();
                den.mean = mean;
                den.sigma = std::max(sample_std(xs, mean), kSigmaFloor);
                break;
            }
            case NbVariant::HE: {
                std::vector<double> counts(model.bins, 0.0);
                for (double x : xs) {
                    int b = static_cast<int>((x - model.he_lo[d]) / model.he_width[d]);
                    b = std::clamp(b, 0, model.bins - 1);
                    counts[b] += 1.0;
                }
                den.bin_prob.resize(model.bins);
                const double denom = static_cast<double>(xs.size()) + model.bins;
                for (int b = 0; b < model.bins; ++b)
                    den.bin_prob[b] = (counts[b] + 1.0) / denom;
                break;
            }
            case NbVariant::KDE: {
                double mean = 0.0;
                for (double x : xs) mean += x;
                mean /= xs.size();
                const double sd = sample_std(xs, mean);
                den.points = xs;
                den.bandwidth = std::max(
                    1.06 * sd * std::pow(static_cast<double>(xs.size()), -0.2), kBandwidthFloor);
                break;
            }
            }
            ++k;
        }
    }
    return model;
}

double nb_log_density(const NBModel& model, std::size_t defect, std::size_t class_index,
                      double x) {
    const NbDensity& den = model.density.at(defect).at(class_index);
    switch (model.variant) {
    case NbVariant::NE: {
        const double z = (x - den.mean) / den.sigma;
        return -0.5 * kLog2Pi - std::log(den.sigma) - 0.5 * z * z;
    }
    case NbVariant::HE: {
        int b = static_cast<int>((x - model.he_lo[defect]) / model.he_width[defect]);
        b = std::clamp(b, 0, model.bins - 1); // out-of-range queries hit the edge bins
        return std::log(den.bin_prob[b]);
    }
    case NbVariant::KDE: {
        // log of the kernel mixture via max-shifted summation.
        const double h = den.bandwidth;
        double max_term = -std::numeric_limits<double>::infinity();
        std::vector<double> terms;
        terms.reserve(den.points.size());
        for (double p : den.points) {
            const double z = (x - p) / h;
            const double t = -0.5 * z * z;
            terms.push_back(t);
            max_term = std::max(max_term, t);
        }
        double sum = 0.0;
        for (double t : terms) sum += std::exp(t - max_term);
        return max_term + std::log(sum) - std::log(static_cast<double>(den.points.size())) -
               0.5 * kLog2Pi - std::log(h);
    }
    }
    return 0.0;
}

NbPrediction nb_classify(const NBModel& model, const std::vector<double>& features) {
    if (model.classes.empty() || model.density.empty())
        throw std::invalid_argument("nb_classify: empty model");
    if (features.size() != model.n_defects())
        throw std::invalid_argument("nb_classify: features must cover the model's defects");

    const std::size_t n_classes = model.classes.size();
    std::vector<double> logpost(n_classes);
    for (std::size_t k = 0; k < n_classes; ++k) {
        double lp = std::log(model.priors[k]);
        for (std::size_t d = 0; d < model.n_defects(); ++d)
            lp += nb_log_density(model, d, k, features[d]);
        logpost[k] = lp;
    }

    const double maxlp = *std::max_element(logpost.begin(), logpost.end());
    double norm = 0.0;
    for (double lp : logpost) norm += std::exp(lp - maxlp);

    NbPrediction pred;
    pred.posterior.resize(n_classes);
    for (std::size_t k = 0; k < n_classes; ++k)
        pred.posterior[k] = std::exp(logpost[k] - maxlp) / norm;

    std::size_t best = 0;
    for (std::size_t k = 1; k < n_classes; ++k)
        if (pred.posterior[k] > pred.posterior[best]) best = k;
    pred.label = model.classes[best];
    return pred;
}

} // namespace agetrace
