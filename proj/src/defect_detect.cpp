#include "agetrace/defect_detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/Dense>

#include "agetrace/filters.hpp"
#include "agetrace/rng.hpp"

namespace agetrace {
namespace {

// Residual samples are differences of integer-quantized pixel values, so no
// fitted noise scale can drop below the quantization noise of a unit step
// (1/sqrt(12) ~ 0.29). A lower floor would let exactly-constant segments
// produce near-infinite likelihoods.
constexpr double kSigmaFloor = 0.3;
constexpr double kLog2Pi = 1.8378770664093453;

double gaussian_loglik(double ssr, std::size_t n, double sigma) {
    return -0.5 * n * kLog2Pi - static_cast<double>(n) * std::log(sigma) -
           ssr / (2.0 * sigma * sigma);
}

struct AfterFitResult {
    SideFit fit;
    double loglik = 0.0;
    int rank = 0;
};

// Least squares of W against (I, tau, 1) with column normalization and rank
// detection; collinear or empty columns are dropped by name.
AfterFitResult fit_after(const std::vector<ResidualSample>& samples, std::size_t begin,
                         std::size_t end) {
    AfterFitResult res;
    const std::size_t m = end - begin;
    if (m == 0) {
        res.fit.sigma = kSigmaFloor;
        return res;
    }

    Eigen::VectorXd y(m);
    Eigen::MatrixXd X(m, 3);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& s = samples[begin + i];
        y(i) = s.value;
        X(i, 0) = s.illum;
        X(i, 1) = dark_current_scale(s.meta);
        X(i, 2) = 1.0;
    }

    static const char* kNames[3] = {"K", "D", "c"};
    std::vector<int> candidates;
    Eigen::MatrixXd Xn(m, 3);
    std::array<double, 3> norms{};
    // Offer the intercept first, then the dark-current term, then the
    // illumination term: when columns are collinear the pivoting keeps the
    // earliest, and an unidentifiable response should default to the
    // illumination-independent explanation rather than scale with whatever
    // illumination a later query happens to have.
    for (int col : {2, 1, 0}) {
        norms[col] = X.col(col).norm();
        if (norms[col] <= 1e-12) {
            res.fit.dropped.push_back(kNames[col]);
            continue;
        }
        Xn.col(static_cast<int>(candidates.size())) = X.col(col) / norms[col];
        candidates.push_back(col);
    }

    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(3);
    double ssr = y.squaredNorm();
    if (!candidates.empty()) {
        const Eigen::MatrixXd A = Xn.leftCols(static_cast<int>(candidates.size()));
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        // Columns are unit-normalized, so the pivot threshold is the sine of
        // the angle a column makes with the span of the others. Keep a
        // regressor only when at least 0.1% of its magnitude is independent:
        // quantization noise on an otherwise constant column must not make
        // an unidentifiable coefficient look estimable.
        qr.setThreshold(1e-3);
        const int rank = static_cast<int>(qr.rank());
        res.rank = rank;

        // Columns beyond the numerical rank are collinear with earlier ones.
        const auto perm = qr.colsPermutation().indices();
        std::vector<int> kept;
        for (int i = 0; i < rank; ++i) kept.push_back(candidates[perm(i)]);
        std::sort(kept.begin(), kept.end());
        for (int col : candidates)
            if (!std::binary_search(kept.begin(), kept.end(), col))
                res.fit.dropped.push_back(kNames[col]);
        std::sort(res.fit.dropped.begin(), res.fit.dropped.end());

        Eigen::MatrixXd Ak(m, kept.size());
        for (std::size_t i = 0; i < kept.size(); ++i)
            Ak.col(static_cast<int>(i)) = X.col(kept[i]) / norms[kept[i]];
        const Eigen::VectorXd beta = Ak.householderQr().solve(y);
        ssr = (y - Ak * beta).squaredNorm();
        for (std::size_t i = 0; i < kept.size(); ++i)
            coeffs(kept[i]) = beta(static_cast<int>(i)) / norms[kept[i]];
    }

    res.fit.K = coeffs(0);
    res.fit.D = coeffs(1);
    res.fit.c = coeffs(2);
    res.fit.sigma = std::max(std::sqrt(std::max(ssr, 0.0) / m), kSigmaFloor);
    res.loglik = gaussian_loglik(ssr, m, res.fit.sigma);
    return res;
}

} // namespace

std::vector<PixelCoord> detect_defects_dfi(const std::vector<RasterImage>& dfis,
                                           double threshold) {
    if (dfis.empty()) throw std::invalid_argument("detect_defects_dfi: no frames");
    const auto& first = dfis.front();
    if (first.channels != 1)
        throw std::invalid_argument("detect_defects_dfi: frames must be single-channel");
    for (const auto& f : dfis)
        if (!f.same_shape(first))
            throw std::invalid_argument("detect_defects_dfi: frame dimensions differ");

    std::vector<PixelCoord> flagged;
    for (int r = 0; r < first.height; ++r) {
        for (int c = 0; c < first.width; ++c) {
            double sum = 0.0;
            for (const auto& f : dfis) sum += f.at(r, c);
            if (sum / dfis.size() > threshold) flagged.push_back({r, c, 0});
        }
    }
    return flagged;
}

std::vector<ResidualSeries> extract_residual_series(const std::vector<RasterImage>& images,
                                                    const std::vector<AcquisitionMeta>& metas,
                                                    const std::vector<PixelCoord>& coords,
                                                    int kernel) {
    if (images.size() != metas.size())
        throw std::invalid_argument("extract_residual_series: image/meta count mismatch");
    if (images.empty()) throw std::invalid_argument("extract_residual_series: no images");
    for (std::size_t i = 1; i < metas.size(); ++i)
        if (metas[i].timestamp < metas[i - 1].timestamp)
            throw std::invalid_argument("extract_residual_series: images not ordered by time");
    for (const auto& coord : coords) {
        const auto& img = images.front();
        if (coord.row < 0 || coord.row >= img.height || coord.col < 0 ||
            coord.col >= img.width || coord.channel < 0 || coord.channel >= img.channels)
            throw std::invalid_argument("extract_residual_series: coordinate out of bounds");
    }

    std::vector<ResidualSeries> out(coords.size());
    for (std::size_t k = 0; k < coords.size(); ++k) {
        out[k].coord = coords[k];
        out[k].samples.reserve(images.size());
    }
    for (std::size_t i = 0; i < images.size(); ++i) {
        for (std::size_t k = 0; k < coords.size(); ++k) {
            const auto sr = residual_at(images[i], coords[k].row, coords[k].col,
                                        coords[k].channel, kernel);
            out[k].samples.push_back({sr.value, sr.illum, metas[i]});
        }
    }
    return out;
}

DefectEstimate estimate_onset_and_params(const ResidualSeries& series) {
    const std::size_t n = series.samples.size();
    if (n < 4)
        throw std::invalid_argument("estimate_onset_and_params: need at least 4 samples");

    // Prefix sums of squared residuals for the zero-mean side.
    std::vector<double> sq_prefix(n + 1, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = series.samples[i].value;
        sq_prefix[i + 1] = sq_prefix[i] + w * w;
    }

    DefectEstimate best;
    best.coord = series.coord;
    double best_score = -std::numeric_limits<double>::infinity();
    const double logn = std::log(static_cast<double>(n));

    for (std::size_t j = 0; j <= n; ++j) {
        // Interior splits need at least one residual degree of freedom per
        // segment, otherwise an exact interpolation drives sigma to the floor
        // and the likelihood rewards the overfit instead of the change point.
        if (j > 0 && j < n && (j < 2 || n - j < 4)) continue;
        SideFit before;
        double loglik_before = 0.0;
        if (j > 0) {
            const double ssr = sq_prefix[j];
            before.sigma = std::max(std::sqrt(ssr / j), kSigmaFloor);
            loglik_before = gaussian_loglik(ssr, j, before.sigma);
        }

        const AfterFitResult after = fit_after(series.samples, j, n);

        int n_params = 0;
        if (j > 0) n_params += 1;                  // sigma before
        if (j < n) n_params += after.rank + 1;     // coefficients + sigma after
        const double score = loglik_before + after.loglik - 0.5 * n_params * logn;

        if (score > best_score) {
            best_score = score;
            best.onset_index_j = static_cast<int>(j);
            best.before = before;
            best.after = after.fit;
            best.score = score;
        }
    }
    return best;
}

namespace {

std::vector<PixelCoord> uniform_sites(int count, int width, int height, RngStream& rng) {
    std::unordered_set<std::uint64_t> used;
    std::vector<PixelCoord> coords;
    coords.reserve(count);
    while (static_cast<int>(coords.size()) < count) {
        const int r = static_cast<int>(rng.uniform_int(0, height - 1));
        const int c = static_cast<int>(rng.uniform_int(0, width - 1));
        if (used.insert(static_cast<std::uint64_t>(r) * width + c).second)
            coords.push_back({r, c, 0});
    }
    return coords;
}

std::vector<double> distance_histogram(const std::vector<PixelCoord>& coords, int bins,
                                       double bin_width) {
    std::vector<double> hist(bins, 0.0);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        for (std::size_t k = i + 1; k < coords.size(); ++k) {
            const double d = std::hypot(static_cast<double>(coords[i].row - coords[k].row),
                                        static_cast<double>(coords[i].col - coords[k].col));
            int b = static_cast<int>(d / bin_width);
            if (b >= bins) b = bins - 1;
            hist[b] += 1.0;
        }
    }
    return hist;
}

double histogram_statistic(const std::vector<double>& observed,
                           const std::vector<double>& expected) {
    double stat = 0.0;
    for (std::size_t b = 0; b < observed.size(); ++b) {
        const double e = std::max(expected[b], 1e-6);
        const double diff = observed[b] - e;
        stat += diff * diff / e;
    }
    return stat;
}

} // namespace

DistanceBaseline make_distance_baseline(int count, int width, int height, int bins,
                                        int expected_placements, int null_placements,
                                        std::uint64_t seed) {
    if (count < 2) throw std::invalid_argument("distance baseline: need >= 2 sites");
    if (width <= 0 || height <= 0)
        throw std::invalid_argument("distance baseline: bad dimensions");
    if (static_cast<long long>(count) > static_cast<long long>(width) * height)
        throw std::invalid_argument("distance baseline: more sites than pixels");

    DistanceBaseline base;
    base.width = width;
    base.height = height;
    base.count = count;
    base.bins = bins;
    base.bin_width = std::hypot(static_cast<double>(width - 1),
                                static_cast<double>(height - 1)) /
                     bins;

    RngStream rng(seed, "distance-baseline");
    base.expected.assign(bins, 0.0);
    for (int p = 0; p < expected_placements; ++p) {
        const auto hist = distance_histogram(uniform_sites(count, width, height, rng),
                                             bins, base.bin_width);
        for (int b = 0; b < bins; ++b) base.expected[b] += hist[b];
    }
    for (auto& e : base.expected) e /= expected_placements;

    base.null_statistics.reserve(null_placements);
    for (int p = 0; p < null_placements; ++p) {
        const auto hist = distance_histogram(uniform_sites(count, width, height, rng),
                                             bins, base.bin_width);
        base.null_statistics.push_back(histogram_statistic(hist, base.expected));
    }
    std::sort(base.null_statistics.begin(), base.null_statistics.end());
    return base;
}

DistanceHistogramReport evaluate_distance_histogram(const std::vector<PixelCoord>& coords,
                                                    const DistanceBaseline& baseline) {
    if (static_cast<int>(coords.size()) != baseline.count)
        throw std::invalid_argument("distance histogram: baseline built for different count");
    DistanceHistogramReport rep;
    rep.bins = baseline.bins;
    rep.expected = baseline.expected;
    rep.observed = distance_histogram(coords, baseline.bins, baseline.bin_width);
    rep.statistic = histogram_statistic(rep.observed, rep.expected);
    const auto it = std::lower_bound(baseline.null_statistics.begin(),
                                     baseline.null_statistics.end(), rep.statistic);
    const std::size_t geq = baseline.null_statistics.end() - it;
    rep.p_value = static_cast<double>(geq + 1) / (baseline.null_statistics.size() + 1);
    return rep;
}

DistanceHistogramReport inter_defect_distance_histogram(const std::vector<PixelCoord>& coords,
                                                        int width, int height) {
    if (coords.size() < 2)
        throw std::invalid_argument("inter_defect_distance_histogram: need >= 2 sites");
    const long long pairs =
        static_cast<long long>(coords.size()) * (static_cast<long long>(coords.size()) - 1) / 2;
    DistanceHistogramReport rep;
    if (pairs < rep.bins) {
        rep.status = "insufficient data";
        return rep;
    }
    const auto baseline =
        make_distance_baseline(static_cast<int>(coords.size()), width, height, rep.bins);
    return evaluate_distance_histogram(coords, baseline);
}

} // namespace agetrace
