#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace wcp {

struct SummaryStats {
    double mean = 0.0;
    double sd = 0.0;
    double max = 0.0;
    std::int64_t count = 0;
};
SummaryStats summarize(std::span<const double> xs);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

// regularized upper incomplete gamma Q(a, x)
double gamma_q(double a, double x);

// chi-square upper tail P(X >= stat) with df degrees of freedom
double chi_square_sf(double stat, int df);

struct ChiSquareResult {
    double stat = 0.0;
    int df = 0;
    double p_value = 0.0;
};
// goodness of fit of observed counts against expected probabilities
ChiSquareResult chi_square_gof(std::span<const std::int64_t> counts,
                               std::span<const double> probs);

struct KsResult {
    double statistic = 0.0;
    double p_value = 0.0;
};
// two-sample Kolmogorov-Smirnov test (asymptotic p-value with the usual
// small-sample correction); inputs need not be sorted
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace wcp
