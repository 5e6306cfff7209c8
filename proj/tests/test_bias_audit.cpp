#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "agetrace/bias_audit.hpp"

using namespace agetrace;

namespace {

// Class-constant color images; class 1 additionally carries a hot pixel.
std::vector<LabeledSample> color_and_defect_samples() {
    std::vector<LabeledSample> out;
    for (int cls = 0; cls < 2; ++cls)
        for (int i = 0; i < 6; ++i) {
            LabeledSample s;
            s.image = RasterImage(10, 10, 3, 8, static_cast<std::uint16_t>(80));
            if (cls == 1) s.image.at(4, 4, 0) = 240;
            s.meta.timestamp = 100.0 * cls + i;
            s.meta.iso = 100.0 + 100.0 * cls;
            s.label = cls;
            out.push_back(s);
        }
    return out;
}

int hot_pixel_classifier(const RasterImage& img, const AcquisitionMeta&) {
    return img.at(4, 4, 0) > 150 ? 1 : 0;
}

} // namespace

TEST_CASE("average sets carry the four variants with class metadata") {
    const auto samples = color_and_defect_samples();
    const auto sets = average_images(samples, 0.8, 3, 42);
    REQUIRE(sets.size() == 3);
    REQUIRE(sets[0].size() == 2);

    const AverageImageSet& c0 = sets[0][0];
    const AverageImageSet& c1 = sets[0][1];
    CHECK(c0.class_label == 0);
    CHECK(c1.class_label == 1);
    CHECK(c0.rep_meta.iso == doctest::Approx(100.0));
    CHECK(c1.rep_meta.iso == doctest::Approx(200.0));

    // Identical inputs average to themselves; the hot pixel survives the mean
    // and the constant/median variants both erase it.
    CHECK(c1.mean.at(4, 4, 0) == 240);
    CHECK(c1.filtered.at(4, 4, 0) == 80);
    const double mean_level = (240.0 + 99.0 * 80.0) / 100.0;
    CHECK(c1.constant.at(4, 4, 0) == std::lround(mean_level));
    CHECK(c1.constant.at(0, 0, 0) == c1.constant.at(9, 9, 0));

    // Re-centering a constant-color class lands exactly on mid gray.
    CHECK(c0.structure.at(3, 3, 1) == 128);
}

TEST_CASE("deterministic for a seed, varying across seeds") {
    const auto samples = color_and_defect_samples();
    const auto a = average_images(samples, 0.5, 2, 7);
    const auto b = average_images(samples, 0.5, 2, 7);
    CHECK(a[0][0].mean.data == b[0][0].mean.data);
    CHECK(a[1][1].mean.data == b[1][1].mean.data);
}

TEST_CASE("a defect reader passes the audit as age-signal-consistent") {
    const auto samples = color_and_defect_samples();
    const auto sets = average_images(samples, 0.8, 4, 1);
    const AccuracyTable t = evaluate_input_suite(hot_pixel_classifier, sets, samples);

    CHECK(t.chance == doctest::Approx(0.5));
    CHECK(t.acc_original == doctest::Approx(1.0));
    CHECK(t.acc_mean == doctest::Approx(1.0));
    CHECK(t.acc_constant == doctest::Approx(0.5)); // collapses to the background class
    CHECK(t.acc_filtered == doctest::Approx(0.5));
    CHECK(t.failures == 0);
    CHECK(bias_verdict(t) == BiasVerdict::AgeSignalConsistent);
    CHECK(to_string(bias_verdict(t)) == "age-signal-consistent");
}

TEST_CASE("a color reader is flagged as content bias") {
    std::vector<LabeledSample> samples;
    for (int cls = 0; cls < 2; ++cls)
        for (int i = 0; i < 5; ++i) {
            LabeledSample s;
            s.image = RasterImage(8, 8, 3, 8, static_cast<std::uint16_t>(cls == 0 ? 60 : 190));
            s.label = cls;
            s.meta.timestamp = i;
            samples.push_back(s);
        }
    const auto color_reader = [](const RasterImage& img, const AcquisitionMeta&) {
        return img.at(2, 2, 1) > 125 ? 1 : 0;
    };
    const auto sets = average_images(samples, 0.8, 3, 2);
    const AccuracyTable t = evaluate_input_suite(color_reader, sets, samples);
    CHECK(t.acc_constant == doctest::Approx(1.0));
    CHECK(bias_verdict(t) == BiasVerdict::ContentBiasSuspected);
}

TEST_CASE("verdict thresholds carve three regions") {
    AccuracyTable t;
    t.chance = 0.5;
    t.acc_original = 0.9;
    t.acc_mean = 0.85;
    t.acc_constant = 0.55;
    t.acc_filtered = 0.58;
    CHECK(bias_verdict(t) == BiasVerdict::AgeSignalConsistent);

    t.acc_constant = 0.66; // above chance + 0.15
    CHECK(bias_verdict(t) == BiasVerdict::ContentBiasSuspected);

    t.acc_constant = 0.62; // breaks consistency yet short of the bias bar
    CHECK(bias_verdict(t) == BiasVerdict::Inconclusive);

    t.acc_constant = 0.55;
    t.acc_mean = 0.70; // the mean image lost too much accuracy
    CHECK(bias_verdict(t) == BiasVerdict::Inconclusive);
}

TEST_CASE("classifier failures are counted, not fatal") {
    const auto samples = color_and_defect_samples();
    const auto sets = average_images(samples, 0.8, 2, 3);
    int calls = 0;
    const Classifier flaky = [&calls](const RasterImage& img, const AcquisitionMeta& m) {
        if (++calls % 5 == 0) throw std::runtime_error("sporadic failure");
        return hot_pixel_classifier(img, m);
    };
    const AccuracyTable t = evaluate_input_suite(flaky, sets, samples);
    CHECK(t.failures > 0);
    CHECK(t.acc_original > 0.0);
}

TEST_CASE("mask evaluation keeps or removes evidence") {
    const auto samples = color_and_defect_samples();

    RasterImage keep_all(10, 10, 1, 8, 1);
    const MaskedAccuracy open = mask_evaluate(hot_pixel_classifier, keep_all, samples);
    CHECK(open.masked == doctest::Approx(open.unmasked));
    CHECK(open.unmasked == doctest::Approx(1.0));

    RasterImage hide_defect = keep_all;
    hide_defect.at(4, 4) = 0;
    const MaskedAccuracy blocked = mask_evaluate(hot_pixel_classifier, hide_defect, samples);
    CHECK(blocked.masked == doctest::Approx(0.5)); // every image reads as the background class
    CHECK(blocked.unmasked == doctest::Approx(1.0));
}
