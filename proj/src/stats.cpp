#include "agetrace/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "agetrace/rng.hpp"

namespace agetrace {
namespace {

constexpr double kGammaTol = 1e-10;
constexpr int kGammaMaxIter = 500;

double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kGammaMaxIter; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kGammaTol) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    // Modified Lentz evaluation of the continued fraction for Q(a, x).
    const double tiny = std::numeric_limits<double>::min() / kGammaTol;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kGammaMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kGammaTol) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double ks_statistic_sorted(const std::vector<double>& cdf_values) {
    const std::size_t n = cdf_values.size();
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = cdf_values[i];
        d = std::max(d, static_cast<double>(i + 1) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return d;
}

} // namespace

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_p requires a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double regularized_gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q requires a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_contfrac(a, x);
}

double chi_square_upper_tail(double statistic, int dof) {
    if (dof < 1) throw std::invalid_argument("dof must be >= 1");
    if (statistic <= 0.0) return 1.0;
    return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

double kolmogorov_q(double lambda) {
    if (lambda <= 1e-10) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        if (term < 1e-14) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double mae(const std::vector<double>& predicted, const std::vector<double>& truth) {
    if (predicted.size() != truth.size())
        throw std::invalid_argument("mae: length mismatch");
    if (predicted.empty())
        throw std::invalid_argument("mae: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < predicted.size(); ++i)
        sum += std::abs(predicted[i] - truth[i]);
    return sum / predicted.size();
}

double relative_estimation_error(double mae_value, const std::vector<double>& onset_times) {
    if (onset_times.size() < 2)
        throw std::invalid_argument("relative_estimation_error: need >= 2 onsets");
    double gap_sum = 0.0;
    for (std::size_t i = 1; i < onset_times.size(); ++i)
        gap_sum += onset_times[i] - onset_times[i - 1];
    const double mean_gap = gap_sum / (onset_times.size() - 1);
    if (mean_gap <= 0.0)
        throw std::invalid_argument("relative_estimation_error: onsets must increase");
    return mae_value / mean_gap;
}

ClassificationReport classification_report(const std::vector<int>& pred,
                                           const std::vector<int>& truth,
                                           const std::vector<int>& labels) {
    if (pred.size() != truth.size())
        throw std::invalid_argument("classification_report: length mismatch");
    if (pred.empty())
        throw std::invalid_argument("classification_report: empty input");

    std::vector<int> classes = labels;
    if (classes.empty()) {
        classes.insert(classes.end(), pred.begin(), pred.end());
        classes.insert(classes.end(), truth.begin(), truth.end());
    }
    std::sort(classes.begin(), classes.end());
    classes.erase(std::unique(classes.begin(), classes.end()), classes.end());

    ClassificationReport rep;
    int correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == truth[i]) ++correct;
    rep.accuracy = static_cast<double>(correct) / pred.size();

    double f1_sum = 0.0;
    for (int label : classes) {
        int tp = 0, fp = 0, fn = 0, support = 0;
        for (std::size_t i = 0; i < pred.size(); ++i) {
            const bool p = pred[i] == label;
            const bool t = truth[i] == label;
            if (t) ++support;
            if (p && t) ++tp;
            else if (p) ++fp;
            else if (t) ++fn;
        }
        ClassStats cs;
        cs.label = label;
        cs.support = support;
        cs.absent = support == 0;
        cs.precision = (tp + fp) > 0 ? static_cast<double>(tp) / (tp + fp) : 0.0;
        cs.recall = (tp + fn) > 0 ? static_cast<double>(tp) / (tp + fn) : 0.0;
        cs.f1 = (cs.precision + cs.recall) > 0.0
                    ? 2.0 * cs.precision * cs.recall / (cs.precision + cs.recall)
                    : 0.0;
        if (cs.absent) cs.f1 = 0.0;
        f1_sum += cs.f1;
        rep.per_class.push_back(cs);
    }
    rep.macro_f1 = classes.empty() ? 0.0 : f1_sum / classes.size();
    return rep;
}

GofResult chi_square_gof(const std::vector<double>& observed,
                         const std::vector<double>& expected) {
    if (observed.size() != expected.size())
        throw std::invalid_argument("chi_square_gof: length mismatch");
    if (observed.size() < 2)
        throw std::invalid_argument("chi_square_gof: need >= 2 bins");
    GofResult res;
    res.dof = static_cast<int>(observed.size()) - 1;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (expected[i] <= 0.0)
            throw std::invalid_argument("chi_square_gof: expected counts must be positive");
        const double diff = observed[i] - expected[i];
        res.statistic += diff * diff / expected[i];
    }
    res.p_value = chi_square_upper_tail(res.statistic, res.dof);
    return res;
}

KsResult exponential_interarrival_test(const std::vector<double>& arrival_times, double rate) {
    if (arrival_times.size() < 10)
        throw std::invalid_argument("exponential_interarrival_test: need >= 10 arrivals");
    if (rate <= 0.0)
        throw std::invalid_argument("exponential_interarrival_test: rate must be positive");
    if (!std::is_sorted(arrival_times.begin(), arrival_times.end()))
        throw std::invalid_argument("exponential_interarrival_test: arrival times unsorted");
    if (arrival_times.front() < 0.0)
        throw std::invalid_argument("exponential_interarrival_test: negative arrival time");

    std::vector<double> gaps;
    gaps.reserve(arrival_times.size());
    double prev = 0.0;
    for (double t : arrival_times) {
        gaps.push_back(t - prev);
        prev = t;
    }
    std::sort(gaps.begin(), gaps.end());
    std::vector<double> cdf(gaps.size());
    for (std::size_t i = 0; i < gaps.size(); ++i)
        cdf[i] = 1.0 - std::exp(-rate * gaps[i]);

    KsResult res;
    res.n = static_cast<int>(gaps.size());
    res.statistic = ks_statistic_sorted(cdf);

    if (res.n >= 35) {
        const double sn = std::sqrt(static_cast<double>(res.n));
        res.p_value = kolmogorov_q((sn + 0.12 + 0.11 / sn) * res.statistic);
    } else {
        // Small samples: calibrate against the simulated null (distribution of
        // the statistic is distribution-free for a fully specified CDF).
        res.mc_calibrated = true;
        RngStream rng(0x6b732d63616cULL, "ks-small-n");
        const int reps = 100000;
        int geq = 0;
        std::vector<double> u(gaps.size());
        for (int r = 0; r < reps; ++r) {
            for (auto& v : u) v = rng.uniform();
            std::sort(u.begin(), u.end());
            if (ks_statistic_sorted(u) >= res.statistic) ++geq;
        }
        res.p_value = static_cast<double>(geq + 1) / (reps + 1);
    }
    return res;
}

RegressionResult growth_regression(const std::vector<double>& time,
                                   const std::vector<double>& counts) {
    if (time.size() != counts.size())
        throw std::invalid_argument("growth_regression: length mismatch");
    if (time.size() < 3)
        throw std::invalid_argument("growth_regression: need >= 3 points");

    const double n = static_cast<double>(time.size());
    double mt = 0.0, mc = 0.0;
    for (std::size_t i = 0; i < time.size(); ++i) {
        mt += time[i];
        mc += counts[i];
    }
    mt /= n;
    mc /= n;
    double stt = 0.0, stc = 0.0, scc = 0.0;
    for (std::size_t i = 0; i < time.size(); ++i) {
        const double dt = time[i] - mt;
        const double dc = counts[i] - mc;
        stt += dt * dt;
        stc += dt * dc;
        scc += dc * dc;
    }
    if (stt <= 0.0)
        throw std::invalid_argument("growth_regression: constant time vector");

    RegressionResult res;
    res.slope = stc / stt;
    res.intercept = mc - res.slope * mt;
    res.r2 = scc > 0.0 ? (stc * stc) / (stt * scc) : 1.0;
    return res;
}

} // namespace agetrace
