#include "agetrace/prnu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "agetrace/filters.hpp"

namespace agetrace {

PrnuField prnu_estimate(const std::vector<RasterImage>& cluster, int kernel,
                        double time_label) {
    if (cluster.empty()) throw std::invalid_argument("prnu_estimate: empty cluster");
    const auto& first = cluster.front();
    for (const auto& img : cluster)
        if (!img.same_shape(first))
            throw std::invalid_argument("prnu_estimate: image dimensions differ");

    PrnuField out;
    out.time_label = time_label;
    out.field = FloatRaster(first.width, first.height, first.channels, 0.0);

    double illum_sum = 0.0;
    for (const auto& img : cluster) {
        const RasterImage med = median_filter(img, kernel);
        for (std::size_t i = 0; i < out.field.data.size(); ++i) {
            const double m = med.data[i];
            illum_sum += m;
            const double res = static_cast<double>(img.data[i]) - m;
            out.field.data[i] += res / std::max(m, 1.0);
        }
    }
    const double mean_illum =
        illum_sum / (static_cast<double>(out.field.data.size()) * cluster.size());
    if (mean_illum < 2.0)
        throw std::invalid_argument("prnu_estimate: cluster carries no illumination");

    for (auto& v : out.field.data) v /= cluster.size();
    return out;
}

double field_correlation(const FloatRaster& a, const FloatRaster& b) {
    if (a.data.size() != b.data.size() || a.data.empty())
        throw std::invalid_argument("field_correlation: shape mismatch");
    const std::size_t n = a.data.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        ma += a.data[i];
        mb += b.data[i];
    }
    ma /= n;
    mb /= n;
    double saa = 0.0, sbb = 0.0, sab = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double da = a.data[i] - ma;
        const double db = b.data[i] - mb;
        saa += da * da;
        sbb += db * db;
        sab += da * db;
    }
    if (saa <= 0.0 || sbb <= 0.0)
        throw std::invalid_argument("field_correlation: constant field has no correlation");
    return sab / std::sqrt(saa * sbb);
}

MiOrderResult mi_order(const std::vector<PrnuField>& fields) {
    const int L = static_cast<int>(fields.size());
    if (L < 3) throw std::invalid_argument("mi_order: need >= 3 fields");
    if (L > 8)
        throw std::invalid_argument("mi_order: exhaustive search supports at most 8 fields");

    MiOrderResult res;
    res.correlation.assign(L, std::vector<double>(L, 1.0));
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j) {
            const double c = field_correlation(fields[i].field, fields[j].field);
            res.correlation[i][j] = c;
            res.correlation[j][i] = c;
        }

    std::vector<int> perm(L);
    std::iota(perm.begin(), perm.end(), 0);
    double best = -std::numeric_limits<double>::infinity();
    std::vector<int> best_perm;
    bool tie = false;
    const double eps = 1e-12;
    do {
        if (perm.front() > perm.back()) continue; // canonical orientation
        double score = 0.0;
        for (int i = 0; i + 1 < L; ++i) score += res.correlation[perm[i]][perm[i + 1]];
        if (score > best + eps) {
            best = score;
            best_perm = perm;
            tie = false;
        } else if (score > best - eps) {
            tie = true;
            if (perm < best_perm) best_perm = perm; // deterministic representative
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    res.order = best_perm;
    res.score = best;
    res.tie = tie;
    return res;
}

int iip_place(const RasterImage& query, const std::vector<PrnuField>& ordered_fields,
              int kernel) {
    if (ordered_fields.empty()) throw std::invalid_argument("iip_place: no clusters");
    const PrnuField qf = prnu_estimate({query}, kernel);
    int best = 0;
    double best_corr = -2.0;
    for (std::size_t i = 0; i < ordered_fields.size(); ++i) {
        const double c = field_correlation(qf.field, ordered_fields[i].field);
        if (c > best_corr) { // strict: ties stay with the earlier cluster
            best_corr = c;
            best = static_cast<int>(i);
        }
    }
    return best;
}

} // namespace agetrace
