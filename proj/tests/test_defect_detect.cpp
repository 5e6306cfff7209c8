#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <cmath>

#include "agetrace/defect_detect.hpp"
#include "agetrace/rng.hpp"

using namespace agetrace;

namespace {

// A residual series with a known onset: zeros before, K*I + D*tau + c after.
ResidualSeries make_series(int len, int true_j, double K, double D, double c, double sigma,
                           std::uint64_t seed) {
    ResidualSeries s;
    s.coord = {3, 4, 0};
    RngStream rng(seed);
    for (int t = 0; t < len; ++t) {
        ResidualSample sample;
        sample.meta.timestamp = 10.0 * t;
        sample.meta.iso = 100.0 + 20.0 * (t % 7);
        sample.meta.exposure_s = 0.01 + 0.004 * (t % 5);
        sample.illum = 40.0 + 30.0 * std::sin(0.7 * t) + 10.0 * rng.uniform();
        const double tau = (sample.meta.iso / 100.0) * sample.meta.exposure_s;
        const double noise = sigma > 0.0 ? rng.normal(0.0, sigma) : 0.0;
        sample.value = (t >= true_j ? K * sample.illum + D * tau + c : 0.0) + noise;
        s.samples.push_back(sample);
    }
    return s;
}

} // namespace

TEST_CASE("dark-field detection uses a strict mean threshold in raster order") {
    RasterImage a(8, 8, 1, 8, 0), b(8, 8, 1, 8, 0);
    a.at(2, 3) = 14;
    b.at(2, 3) = 14; // mean exactly 14: not flagged at threshold 14
    a.at(5, 1) = 20;
    b.at(5, 1) = 10; // mean 15: flagged
    a.at(1, 6) = 200;
    b.at(1, 6) = 200; // mean 200: flagged

    const auto coords = detect_defects_dfi({a, b}, 14.0);
    REQUIRE(coords.size() == 2);
    CHECK(coords[0] == PixelCoord{1, 6, 0}); // raster order
    CHECK(coords[1] == PixelCoord{5, 1, 0});
}

TEST_CASE("detection validates its inputs") {
    CHECK_THROWS_AS(detect_defects_dfi({}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(detect_defects_dfi({RasterImage(4, 4, 3, 8)}, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(detect_defects_dfi({RasterImage(4, 4, 1, 8), RasterImage(6, 4, 1, 8)}, 10.0),
                    std::invalid_argument);
}

TEST_CASE("residual series extraction aligns sites with capture order") {
    RasterImage img1(8, 8, 3, 8, 100), img2(8, 8, 3, 8, 100);
    img2.at(3, 3, 1) = 160;
    AcquisitionMeta m1, m2;
    m1.timestamp = 1.0;
    m2.timestamp = 5.0;

    const auto series = extract_residual_series({img1, img2}, {m1, m2}, {{3, 3, 1}});
    REQUIRE(series.size() == 1);
    REQUIRE(series[0].samples.size() == 2);
    CHECK(series[0].samples[0].value == doctest::Approx(0.0));
    CHECK(series[0].samples[1].value == doctest::Approx(60.0));
    CHECK(series[0].samples[1].illum == doctest::Approx(100.0));

    CHECK_THROWS_AS(extract_residual_series({img1, img2}, {m2, m1}, {{3, 3, 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(extract_residual_series({img1}, {m1}, {{9, 9, 0}}), std::invalid_argument);
}

TEST_CASE("noiseless onset is recovered exactly with its parameters") {
    const ResidualSeries s = make_series(24, 9, 0.05, 120.0, 2.0, 0.0, 11);
    const DefectEstimate est = estimate_onset_and_params(s);
    CHECK(est.onset_index_j == 9);
    CHECK(est.after.K == doctest::Approx(0.05).epsilon(1e-6));
    CHECK(est.after.D == doctest::Approx(120.0).epsilon(1e-6));
    CHECK(est.after.c == doctest::Approx(2.0).epsilon(1e-4));
    CHECK(est.before.sigma <= 0.3 + 1e-12); // zero-residual side sits at the noise floor
}

TEST_CASE("an all-zero series is reported as never defective") {
    ResidualSeries s = make_series(15, 15, 0.0, 0.0, 0.0, 0.0, 1);
    for (auto& sample : s.samples) sample.value = 0.0;
    const DefectEstimate est = estimate_onset_and_params(s);
    CHECK(est.onset_index_j == 15);
}

TEST_CASE("a defect active from the start maps to onset zero") {
    const ResidualSeries s = make_series(18, 0, 0.02, 200.0, 1.0, 0.0, 7);
    CHECK(estimate_onset_and_params(s).onset_index_j == 0);
}

TEST_CASE("onset choice is invariant to a constant illumination shift") {
    ResidualSeries s = make_series(20, 8, 0.04, 150.0, 3.0, 1.5, 21);
    ResidualSeries shifted = s;
    for (auto& sample : shifted.samples) sample.illum += 50.0;
    // The residual values stay fixed; a constant illumination change folds
    // into the intercept and must not move the split.
    CHECK(estimate_onset_and_params(s).onset_index_j ==
          estimate_onset_and_params(shifted).onset_index_j);
}

TEST_CASE("moderate noise still recovers a strong step") {
    int exact = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const ResidualSeries s = make_series(30, 11, 0.0, 600.0, 0.0, 2.0, 100 + trial);
        if (estimate_onset_and_params(s).onset_index_j == 11) ++exact;
    }
    CHECK(exact >= 19);
}

TEST_CASE("too few sites yield an insufficient-data uniformity report") {
    const auto rep = inter_defect_distance_histogram({{1, 1, 0}, {2, 2, 0}, {3, 3, 0}}, 64, 64);
    CHECK(rep.status == "insufficient data");
    CHECK(rep.p_value == 1.0);
}

TEST_CASE("clustered sites are rejected; uniform sites are not") {
    const DistanceBaseline baseline = make_distance_baseline(80, 128, 128);

    std::vector<PixelCoord> clustered;
    RngStream crng(5);
    while (clustered.size() < 80) {
        const PixelCoord p{static_cast<int>(crng.uniform_int(30, 45)),
                           static_cast<int>(crng.uniform_int(60, 75)), 0};
        if (std::find(clustered.begin(), clustered.end(), p) == clustered.end())
            clustered.push_back(p);
    }
    const auto bad = evaluate_distance_histogram(clustered, baseline);
    CHECK(bad.status == "ok");
    CHECK(bad.p_value < 0.001);

    std::vector<PixelCoord> uniform;
    RngStream urng(6);
    while (uniform.size() < 80) {
        const PixelCoord p{static_cast<int>(urng.uniform_int(0, 127)),
                           static_cast<int>(urng.uniform_int(0, 127)), 0};
        if (std::find(uniform.begin(), uniform.end(), p) == uniform.end()) uniform.push_back(p);
    }
    const auto good = evaluate_distance_histogram(uniform, baseline);
    CHECK(good.p_value > 0.01);
}
