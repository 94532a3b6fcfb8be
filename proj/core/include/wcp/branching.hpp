#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wcp/weight_law.hpp"

namespace wcp {

// Branching companion of the contact process: one type per vertex, death
// rate 1, birth of a type-j child from a type-i parent at rate
// lambda w_i w_j / n. Its mean semigroup is exp(At) with the rank-one-plus-
// identity generator A = (lambda/n) w w^T - I.

// Extinction probability per starting type: 1/(1 + sigma_hat w_i), or all
// ones when lambda <= n / sum w^2 (the process is not supercritical).
std::vector<double> extinction_probs(const WeightSample& sample, double lambda);

// exp(At) v applied matrix-free through the rank-one spectral split:
// v = c w + v_perp, result = e^{(lambda|w|^2/n - 1)t} c w + e^{-t} v_perp.
std::vector<double> mean_matrix_action(const WeightSample& sample, double lambda,
                                       double t, std::span<const double> v);

// Top (least negative) eigenvalue of the generator of the process
// conditioned on extinction, computed by shifted power iteration on the
// matrix-free action v -> D^-1 [ (lambda/n) <Dw, v> Dw - v ], D = diag(rho_i).
// The spectrum is real (similar to a symmetric matrix). Throws
// NotSupercritical below threshold and NoConvergence after 1e5 iterations.
double conditioned_top_eig(const WeightSample& sample, double lambda);

struct SpectralReport {
    std::int64_t n = 0;
    double lambda = 0.0;
    double top_eig_A = 0.0;   // lambda sum w^2 / n - 1
    double bulk_eig_A = -1.0;
    bool supercritical = false;
    std::vector<double> extinction;  // empty when not supercritical
    double top_eig_bound_conditioned = 0.0;   // (lambda/n) sum w^2 rho^2 - 1
    double top_eig_conditioned_numeric = 0.0; // power iteration, NaN if subcritical
};
SpectralReport spectral_report(const WeightSample& sample, double lambda);

struct MtbpResult {
    bool survived = false;
    std::optional<double> extinction_time;
    std::uint64_t events = 0;
    bool hit_cap = false;
};

// Exact simulation from one individual of type `init_type`. Aggregate birth
// rate of a type-k individual is lambda w_k (sum_j w_j) / n and the child
// type is drawn proportional to w. Reaching `cap` living individuals counts
// as survival (the cap only ever truncates surviving runs).
MtbpResult mtbp_simulate(const WeightSample& sample, double lambda,
                         std::int64_t init_type, double t_max, std::uint64_t seed,
                         std::int64_t cap = 1000000);

// Eigenvalues of a dense symmetric matrix (row-major, dim x dim) by cyclic
// Jacobi rotations, ascending. Intended for small test/validation problems.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int dim);

struct DiagEigOutcome {
    int trials = 0;
    int passed = 0;
    double worst_excess = 0.0;  // max over trials of max_eig(DU) - lambda_0
};

// Randomized check that scaling a negative-definite symmetric U by a diagonal
// D >= 1 can only push the top eigenvalue further down: for each trial draws
// U = Q diag(negatives) Q^T with Q a product of random plane rotations and a
// random D with entries in [1, 10], then verifies
// max_eig(D^{1/2} U D^{1/2}) <= lambda_0 + 1e-9.
DiagEigOutcome diag_eig_property(int dim, int trials, std::uint64_t seed);

}  // namespace wcp
