#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "wcp/weight_law.hpp"

namespace wcp {

// Solution of the stationarity equation 1 = lambda E[w^2/(1+sigma w)] for one
// lambda, plus solver diagnostics. sigma/rho are populated only above the
// threshold (has_sigma).
struct MeanFieldSolution {
    double lambda = 0.0;
    double lambda_c = 0.0;
    bool has_sigma = false;
    double sigma = 0.0;
    double rho = 0.0;
    std::int64_t solver_iters = 0;
    double residual = 0.0;
};

enum class AlphaRegime { Below3, At3, ThreeToFour, At4, Above4 };

struct AsymptoticReport {
    double alpha = 0.0;
    AlphaRegime regime = AlphaRegime::Above4;
    std::vector<double> deltas;
    std::vector<double> sigma_numeric;
    std::vector<double> sigma_asymptotic;
    std::vector<double> ratios;  // sigma_numeric / sigma_asymptotic
};

// epidemic threshold: 1/E[w^2], or 0 when the second moment diverges
double lambda_c(const WeightLaw& law);

// E[w^2/(1+sigma w)]: exact finite sum for discrete laws, adaptive
// double-exponential quadrature (relative error <= 1e-11) for Pareto.
double expectation_w2_over(const WeightLaw& law, double sigma);

// E[sigma w/(1+sigma w)] under the law
double expectation_infected_fraction(const WeightLaw& law, double sigma);

// Unique sigma > 0 with lambda E[w^2/(1+sigma w)] = 1 (bisection on the
// strictly decreasing right-hand side). Throws NotSupercritical when
// lambda <= lambda_c.
double sigma(const WeightLaw& law, double lambda);

// Empirical analogue: unique root of 1 = (lambda/n) sum_j w_j^2/(1+sigma w_j).
// Requires lambda > n / sum_j w_j^2.
double sigma_hat(const WeightSample& sample, double lambda);

// E[sigma w/(1 + sigma w)] at sigma(law, lambda)
double rho(const WeightLaw& law, double lambda);

MeanFieldSolution solve_meanfield(const WeightLaw& law, double lambda);

// stationary infection probability of a weight-x vertex
inline double profile_value(double sigma, double x) {
    return sigma * x / (1.0 + sigma * x);
}

// per-type stationary probabilities for a discrete law
std::vector<double> profile(const WeightLaw& law, double lambda);

// per-vertex stationary probabilities using the empirical sigma_hat
std::vector<double> profile(const WeightSample& sample, double lambda);

// callable p(x) for any law
std::function<double(double)> profile_fn(const WeightLaw& law, double lambda);

// Trajectory of the per-type ODE dp_i/dt = -p_i + (1-p_i) lambda W_i S(p),
// S(p) = sum_j p_j W_j mu({W_j}), integrated with classical fixed-step RK4.
// States are clamped to [0,1]; a clamp beyond 1e-9 in one step throws
// StepTooLarge.
struct OdeTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // per time, per type
};
OdeTrajectory ode_flow(const WeightLaw& law, double lambda,
                       const std::vector<double>& p0, double t_end, double dt);

// Leading-order behavior of sigma near the threshold for a weight tail
// P(w > x) ~ C x^-(alpha-1). delta means lambda itself when alpha <= 3
// (threshold 0) and lambda - lambda_c when alpha > 3. lambda_c and Ew3 are
// only consulted for alpha > 3 resp. alpha > 4.
double sigma_asymptotic(double alpha, double C, double delta, double lambda_c = 0.0,
                        double third_moment = 0.0);

// Quadrature of int_0^inf z^(2-alpha)/(1+z) dz for alpha in (2,3); equals
// pi/sin(pi alpha). Used to pin the constant in the heavy-tail expansion.
double mellin_check(double alpha);

// Same integrand truncated to [cut, inf); finite for alpha in (2, 3].
double mellin_check_truncated(double alpha, double cut);

}  // namespace wcp
