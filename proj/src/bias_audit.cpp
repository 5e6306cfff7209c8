#include "agetrace/bias_audit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "agetrace/filters.hpp"
#include "agetrace/rng.hpp"

namespace agetrace {
namespace {

// Count correct predictions; exceptions are excluded and counted separately.
struct Tally {
    int correct = 0;
    int total = 0;
    int failures = 0;

    void add(const Classifier& cls, const RasterImage& img, const AcquisitionMeta& meta,
             int truth) {
        try {
            const int pred = cls(img, meta);
            ++total;
            if (pred == truth) ++correct;
        } catch (const std::exception&) {
            ++failures;
        }
    }
    double accuracy() const { return total > 0 ? static_cast<double>(correct) / total : 0.0; }
};

} // namespace

std::vector<std::vector<AverageImageSet>> average_images(
    const std::vector<LabeledSample>& samples, double subsample_fraction, int n_sets,
    std::uint64_t seed) {
    if (samples.empty()) throw std::invalid_argument("average_images: no samples");
    if (subsample_fraction <= 0.0 || subsample_fraction > 1.0)
        throw std::invalid_argument("average_images: fraction must be in (0, 1]");
    if (n_sets < 1) throw std::invalid_argument("average_images: n_sets must be >= 1");

    std::map<int, std::vector<const LabeledSample*>> by_class;
    for (const auto& s : samples) by_class[s.label].push_back(&s);
    const auto& shape = samples.front().image;
    for (const auto& s : samples)
        if (!s.image.same_shape(shape) || s.image.bit_depth != shape.bit_depth)
            throw std::invalid_argument("average_images: images must share shape and depth");

    const double mid_gray = shape.max_value() / 2.0;
    RngStream rng(seed, "average-subsets");

    std::vector<std::vector<AverageImageSet>> sets(n_sets);
    for (int set_i = 0; set_i < n_sets; ++set_i) {
        for (const auto& [cls, members] : by_class) {
            const int n = static_cast<int>(members.size());
            const int take = std::max(1, static_cast<int>(std::ceil(subsample_fraction * n)));

            // Partial Fisher-Yates: first `take` entries of a seeded shuffle.
            std::vector<int> idx(n);
            for (int i = 0; i < n; ++i) idx[i] = i;
            for (int i = 0; i < take; ++i) {
                const int j = static_cast<int>(rng.uniform_int(i, n - 1));
                std::swap(idx[i], idx[j]);
            }

            FloatRaster acc(shape.width, shape.height, shape.channels, 0.0);
            AcquisitionMeta rep;
            rep.timestamp = rep.iso = rep.exposure_s = rep.focal_mm = rep.f_number = 0.0;
            for (int i = 0; i < take; ++i) {
                const auto& s = *members[idx[i]];
                for (std::size_t k = 0; k < acc.data.size(); ++k)
                    acc.data[k] += s.image.data[k];
                rep.timestamp += s.meta.timestamp;
                rep.iso += s.meta.iso;
                rep.exposure_s += s.meta.exposure_s;
                rep.focal_mm += s.meta.focal_mm;
                rep.f_number += s.meta.f_number;
            }
            for (auto& v : acc.data) v /= take;
            rep.timestamp /= take;
            rep.iso /= take;
            rep.exposure_s /= take;
            rep.focal_mm /= take;
            rep.f_number /= take;
            rep.kind = FrameKind::Scene;
            rep.device_id = members.front()->meta.device_id;

            AverageImageSet out;
            out.class_label = cls;
            out.rep_meta = rep;
            out.mean = quantize(acc, shape.bit_depth);

            // Constant component: per-channel spatial mean broadcast.
            std::vector<double> channel_mean(shape.channels, 0.0);
            const std::size_t pixels = static_cast<std::size_t>(shape.width) * shape.height;
            for (int r = 0; r < shape.height; ++r)
                for (int c = 0; c < shape.width; ++c)
                    for (int ch = 0; ch < shape.channels; ++ch)
                        channel_mean[ch] += acc.at(r, c, ch);
            for (auto& m : channel_mean) m /= static_cast<double>(pixels);

            FloatRaster constant(shape.width, shape.height, shape.channels, 0.0);
            FloatRaster structure(shape.width, shape.height, shape.channels, 0.0);
            for (int r = 0; r < shape.height; ++r)
                for (int c = 0; c < shape.width; ++c)
                    for (int ch = 0; ch < shape.channels; ++ch) {
                        constant.at(r, c, ch) = channel_mean[ch];
                        structure.at(r, c, ch) = std::clamp(
                            acc.at(r, c, ch) - channel_mean[ch] + mid_gray, 0.0,
                            static_cast<double>(shape.max_value()));
                    }
            out.constant = quantize(constant, shape.bit_depth);
            out.structure = quantize(structure, shape.bit_depth);
            out.filtered = median_filter(out.mean, 3);

            sets[set_i].push_back(std::move(out));
        }
    }
    return sets;
}

AccuracyTable evaluate_input_suite(const Classifier& classifier,
                                   const std::vector<std::vector<AverageImageSet>>& sets,
                                   const std::vector<LabeledSample>& test_originals) {
    if (sets.empty() || sets.front().empty())
        throw std::invalid_argument("evaluate_input_suite: no average sets");
    if (test_originals.empty())
        throw std::invalid_argument("evaluate_input_suite: no held-out originals");

    Tally s_tally, mean_t, const_t, struct_t, filt_t;
    for (const auto& item : test_originals)
        s_tally.add(classifier, item.image, item.meta, item.label);

    for (const auto& set : sets) {
        for (const auto& avg : set) {
            mean_t.add(classifier, avg.mean, avg.rep_meta, avg.class_label);
            const_t.add(classifier, avg.constant, avg.rep_meta, avg.class_label);
            struct_t.add(classifier, avg.structure, avg.rep_meta, avg.class_label);
            filt_t.add(classifier, avg.filtered, avg.rep_meta, avg.class_label);
        }
    }

    AccuracyTable table;
    table.acc_original = s_tally.accuracy();
    table.acc_mean = mean_t.accuracy();
    table.acc_constant = const_t.accuracy();
    table.acc_structure = struct_t.accuracy();
    table.acc_filtered = filt_t.accuracy();
    table.chance = 1.0 / static_cast<double>(sets.front().size());
    table.failures =
        s_tally.failures + mean_t.failures + const_t.failures + struct_t.failures + filt_t.failures;
    return table;
}

std::string to_string(BiasVerdict v) {
    switch (v) {
    case BiasVerdict::AgeSignalConsistent: return "age-signal-consistent";
    case BiasVerdict::ContentBiasSuspected: return "content-bias-suspected";
    case BiasVerdict::Inconclusive: return "inconclusive";
    }
    return "inconclusive";
}

BiasVerdict bias_verdict(const AccuracyTable& table, const VerdictThresholds& t) {
    const bool mean_holds = table.acc_mean >= table.acc_original - t.delta1;
    const bool constant_near_chance = table.acc_constant <= table.chance + t.delta2;
    const bool filtered_near_chance = table.acc_filtered <= table.chance + t.delta2;
    if (mean_holds && constant_near_chance && filtered_near_chance)
        return BiasVerdict::AgeSignalConsistent;
    if (table.acc_constant >= table.chance + t.delta3)
        return BiasVerdict::ContentBiasSuspected;
    return BiasVerdict::Inconclusive;
}

MaskedAccuracy mask_evaluate(const Classifier& classifier, const RasterImage& mask,
                             const std::vector<LabeledSample>& test) {
    if (test.empty()) throw std::invalid_argument("mask_evaluate: empty test set");
    for (const auto& s : test)
        if (s.image.width != mask.width || s.image.height != mask.height)
            throw std::invalid_argument("mask_evaluate: mask dimensions do not match inputs");

    Tally masked_t, unmasked_t;
    for (const auto& s : test) {
        RasterImage masked = s.image;
        for (int r = 0; r < masked.height; ++r)
            for (int c = 0; c < masked.width; ++c)
                for (int ch = 0; ch < masked.channels; ++ch) {
                    const int mch = mask.channels == masked.channels ? ch : 0;
                    if (mask.at(r, c, mch) == 0) masked.at(r, c, ch) = 0;
                }
        masked_t.add(classifier, masked, s.meta, s.label);
        unmasked_t.add(classifier, s.image, s.meta, s.label);
    }

    MaskedAccuracy out;
    out.masked = masked_t.accuracy();
    out.unmasked = unmasked_t.accuracy();
    out.failures = masked_t.failures + unmasked_t.failures;
    return out;
}

} // namespace agetrace
