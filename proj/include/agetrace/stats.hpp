#pragma once

#include <map>
#include <string>
#include <vector>

namespace agetrace {

// Generic named metric for report serialization.
struct MetricReport {
    std::string name;
    double value = 0.0;
    std::map<std::string, double> auxiliary; // ordered -> deterministic JSON
};

// Mean absolute error between predicted and true indices.
double mae(const std::vector<double>& predicted, const std::vector<double>& truth);

// MAE divided by the mean gap between successive onset times.
double relative_estimation_error(double mae_value, const std::vector<double>& onset_times);

struct ClassStats {
    int label = 0;
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    int support = 0;           // true instances of the class
    bool absent = false;       // no true instances; f1 forced to 0
};

struct ClassificationReport {
    double accuracy = 0.0;
    std::vector<ClassStats> per_class; // sorted by label
    double macro_f1 = 0.0;
};

// labels: explicit class universe; empty -> union of labels seen in pred/truth.
ClassificationReport classification_report(const std::vector<int>& pred,
                                           const std::vector<int>& truth,
                                           const std::vector<int>& labels = {});

struct GofResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int dof = 0;
};

// Pearson goodness-of-fit against expected counts; dof = bins - 1.
GofResult chi_square_gof(const std::vector<double>& observed,
                         const std::vector<double>& expected);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    int n = 0;
    bool mc_calibrated = false; // true when n < 35 and p came from a null simulation
};

// One-sample KS test of successive inter-arrival gaps against Exp(rate).
// Arrival times are measured from the observation start (time zero), so the
// first arrival contributes a gap as well.
KsResult exponential_interarrival_test(const std::vector<double>& arrival_times, double rate);

struct RegressionResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Ordinary least squares of counts against time.
RegressionResult growth_regression(const std::vector<double>& time,
                                   const std::vector<double>& counts);

// Numeric kernels, exposed so tests can cross-check the p-value plumbing.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);
double chi_square_upper_tail(double statistic, int dof);
double kolmogorov_q(double lambda); // survival function of the Kolmogorov distribution

} // namespace agetrace
