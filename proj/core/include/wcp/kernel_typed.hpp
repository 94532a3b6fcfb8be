#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wcp/kernel_full.hpp"
#include "wcp/rng.hpp"
#include "wcp/weight_law.hpp"

namespace wcp {

// Per-type infected counts X_i for a finite-support law: X increases in
// coordinate i at rate (N_i - X_i) lambda W_i S / n with S = sum_j X_j W_j,
// and decreases at rate X_i. Events cost O(m).
struct TypedState {
    std::int64_t n = 0;
    double lambda = 1.0;
    std::vector<double> W;        // type weights
    std::vector<std::int64_t> N;  // per-type totals
    std::vector<std::int64_t> X;  // per-type infected
    double S = 0.0;               // cached sum_j X_j W_j
    double clock = 0.0;
    std::int64_t total_infected = 0;

    void recompute_cached();
    // rate of the next up/down jump per type
    void jump_rates(std::vector<double>& up, std::vector<double>& down) const;
};

struct TypedEvent {
    double time_increment = 0.0;
    std::int32_t type = 0;
    std::int32_t delta = 0;  // +1 or -1
};

// total jump rate of the current state
double typed_total_rate(const TypedState& state);

// jump selection and commit with an externally drawn waiting time
TypedEvent typed_apply_jump(TypedState& state, Xoshiro256& rng, double dt);

// one jump; throws Extinct when no type has infected vertices
TypedEvent typed_step(TypedState& state, Xoshiro256& rng);

struct TypedConfig {
    WeightLaw law = WeightLaw::discrete({1.0}, {1.0});
    double lambda = 1.0;
    std::int64_t n = 0;
    // negative = all infected, otherwise the initial infected fraction per type
    double init_fraction = -1.0;
    double t_max = 1.0;
    std::vector<double> snapshot_times;
    std::uint64_t max_events = UINT64_MAX;
    std::uint64_t seed = 0;
    // true: N_i = rounded p_i n (largest-remainder); false: N_i multinomial
    bool exact_counts = false;
};

RunSummary run_typed(const TypedConfig& config);

// deterministic largest-remainder rounding of p_i * n with sum exactly n
std::vector<std::int64_t> rounded_type_counts(const WeightLaw& law, std::int64_t n);

struct RegionSpec {
    double eta = 0.0;
    double eps = 0.0;  // 0 < eta <= eps
};

// Jump-rate envelope inside the region where per-type infected fractions lie
// between eta W/(1+eta W) and eps W/(1+eps W): theta_minus/theta_plus bound
// the down/up rates per n, and Delta = (lambda eta / eps) E[w^2/(1+eta w)] - 1
// is the drift margin (positive means the region pushes upward).
struct DriftReport {
    double delta = 0.0;
    std::vector<double> theta_plus;
    std::vector<double> theta_minus;
    bool positive = false;
};
DriftReport drift_check(const WeightLaw& law, double lambda, const RegionSpec& region);

}  // namespace wcp
