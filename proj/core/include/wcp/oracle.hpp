#pragma once

#include <cstdint>
#include <vector>

#include "wcp/weight_law.hpp"

namespace wcp {

// initial configuration shared by the oracle and the simulation kernels
struct InitSpec {
    enum class Kind { All, Single, Set };
    Kind kind = Kind::All;
    std::int64_t vertex = 0;              // Single
    std::vector<std::int64_t> vertices;   // Set

    static InitSpec all() { return {}; }
    static InitSpec single(std::int64_t i) { return {Kind::Single, i, {}}; }
    static InitSpec set(std::vector<std::int64_t> v) {
        return {Kind::Set, 0, std::move(v)};
    }
};

struct OracleResult {
    int n = 0;
    double lambda = 0.0;
    double t = 0.0;
    std::vector<std::int64_t> init;
    std::vector<double> marginals;  // P(vertex i infected at t)
    double survival = 0.0;          // P(some vertex infected at t)
    double truncation_error_bound = 0.0;
};

// Exact transient distribution of the weighted contact process on the full
// 2^n state space via uniformization (Poisson-weighted powers of the
// uniformized kernel, truncated below mass 1e-12). n <= 12.
OracleResult exact_marginals(const WeightSample& sample, double lambda, double t,
                             const InitSpec& init);

// Advances an explicit distribution over the 2^n states by time t; exposed so
// the semigroup property can be exercised directly. Returns the new
// distribution; adds its truncation error into *error_bound if given.
std::vector<double> evolve_distribution(const WeightSample& sample, double lambda,
                                        std::vector<double> dist, double t,
                                        double* error_bound = nullptr);

// max_i | P(survival at t | start {i}) - P(vertex i infected at t | start all) |
double duality_gap(const WeightSample& sample, double lambda, double t);

// min_i [ P_high(vertex i infected) - P_low(vertex i infected) ] from the
// all-infected start, for coordinatewise-ordered weight vectors; n <= 10.
double monotonicity_gap(const WeightSample& low, const WeightSample& high,
                        double lambda, double t);

}  // namespace wcp
