#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wcp/meanfield.hpp"
#include "wcp/records.hpp"
#include "wcp/weight_law.hpp"

namespace wcp {

// Declarative description of one scripted study. Loaded from JSON; every run
// is reproducible bit for bit from the spec alone (worker count never
// influences results).
struct ExperimentSpec {
    std::string name;
    std::string experiment;  // extinction_scaling | survival_persistence |
                             // profile_accuracy | rho_curve | exponent_fit
    WeightLaw law = WeightLaw::discrete({1.0}, {1.0});
    std::vector<double> lambdas;
    std::vector<std::int64_t> ns;
    std::int64_t reps = 1;
    std::vector<double> ts;  // snapshot grid
    double t_max = 0.0;      // 0 = per-experiment default
    std::string kernel = "full";
    std::uint64_t seed = 0;
    bool exact_counts = false;
    std::string output;      // empty = stdout
    // exponent_fit only
    double alpha = 0.0;
    std::vector<double> deltas;
};

ExperimentSpec load_spec_file(const std::string& path);
ExperimentSpec load_spec_json(const std::string& json_text);
std::string canonical_spec_json(const ExperimentSpec& spec);
std::uint64_t spec_hash(const ExperimentSpec& spec);

// Subcritical extinction-time scaling across the n grid; the table carries
// the regression of mean extinction time against log n in its comments.
// Refuses (GuardTripped) unless every lambda is strictly below the threshold.
Table extinction_scaling(const ExperimentSpec& spec, unsigned workers = 1);

// Fraction of replicas still alive at t_max from the all-infected start.
// Requires lambda above the threshold.
Table survival_persistence(const ExperimentSpec& spec, unsigned workers = 1);

// Per-type empirical infection frequencies (conditioned on being alive at the
// snapshot) joined against the stationary profile, across the t grid.
Table profile_accuracy(const ExperimentSpec& spec, unsigned workers = 1);

// Average infected fraction at t_max (conditioned on survival) against the
// stationary prediction across a lambda grid.
Table rho_curve(const ExperimentSpec& spec, unsigned workers = 1);

struct ExponentFit {
    AsymptoticReport report;
    double fitted_exponent = 0.0;      // log-log slope; NaN for alpha == 3
    double theoretical_exponent = 0.0; // 1/(3-alpha), 1/(alpha-3) or 1
    // regime-corrected per-delta checks that tend to 1 (alpha == 4) or -1
    // (alpha == 3); plain numeric/asymptotic ratio otherwise
    std::vector<double> corrected;
};
ExponentFit exponent_fit(double alpha, const WeightLaw& law,
                         const std::vector<double>& deltas);
Table exponent_fit_table(const ExperimentSpec& spec);

// dispatch on spec.experiment; adds seed/spec-hash header comments
Table run_experiment(const ExperimentSpec& spec, unsigned workers = 1);

}  // namespace wcp
