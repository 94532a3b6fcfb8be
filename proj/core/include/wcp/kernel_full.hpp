#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wcp/fenwick.hpp"
#include "wcp/oracle.hpp"
#include "wcp/rng.hpp"
#include "wcp/weight_law.hpp"

namespace wcp {

struct SimConfig {
    double lambda = 1.0;
    const WeightSample* sample = nullptr;
    InitSpec init = InitSpec::all();
    double t_max = 1.0;
    std::vector<double> snapshot_times;  // sorted, within [0, t_max]
    std::uint64_t max_events = UINT64_MAX;
    std::uint64_t seed = 0;
    bool record_bitmaps = false;
};

struct SnapshotStat {
    double time = 0.0;
    std::int64_t count_infected = 0;
    std::vector<std::int64_t> per_type;   // present when the sample has types
    std::vector<std::uint64_t> bitmap;    // optional packed per-vertex bits
};

struct RunSummary {
    std::optional<double> extinction_time;
    std::uint64_t events = 0;
    std::vector<SnapshotStat> snapshots;
    bool final_alive = false;
    bool budget_exceeded = false;
    // per-type population sizes of the realization (typed kernel runs)
    std::vector<std::int64_t> type_totals;
};

struct StepEvent {
    double time_increment = 0.0;
    bool recovery = false;
    std::int64_t vertex = 0;
};

// Exact contact-process configuration with O(log n) event updates. The
// pairwise infection rates lambda w_i w_j / n never need to be enumerated:
// the total infection rate factorizes as (lambda/n) W_inf W_heal and the
// target marginal is weight-proportional over the healthy set.
class FullState {
  public:
    FullState(const WeightSample& sample, const InitSpec& init,
              std::uint64_t rebuild_interval = std::uint64_t{1} << 20);

    std::int64_t n() const { return n_; }
    std::int64_t count_infected() const { return count_infected_; }
    double clock() const { return clock_; }
    double weight_infected() const { return w_inf_; }
    double weight_healthy() const { return w_heal_; }
    bool infected(std::int64_t v) const { return infected_[static_cast<std::size_t>(v)]; }

    // total recovery / infection rates of the current configuration
    double recovery_rate() const { return static_cast<double>(count_infected_); }
    double infection_rate(double lambda) const;

    // one jump of the chain; throws Extinct when nothing is infected
    StepEvent step(double lambda, Xoshiro256& rng);

    // two-phase form of step(), used by drivers that must observe the
    // pre-jump state once the waiting time is known (snapshotting)
    double draw_waiting_time(double lambda, Xoshiro256& rng) const;
    StepEvent apply_jump(double lambda, Xoshiro256& rng, double dt);

    // exact recomputation of cached sums and index trees
    void rebuild();

    // relative drift of the cached totals against an exact recomputation
    double cached_total_drift() const;

    std::vector<std::int64_t> per_type_counts(const WeightSample& sample) const;
    std::vector<std::uint64_t> bitmap() const;

  private:
    void flip(std::int64_t v);

    std::int64_t n_ = 0;
    const WeightSample* sample_ = nullptr;
    std::vector<char> infected_;
    std::int64_t count_infected_ = 0;
    std::int64_t count_healthy_positive_ = 0;  // healthy vertices with w > 0
    double w_inf_ = 0.0;
    double w_heal_ = 0.0;
    double clock_ = 0.0;
    Fenwick<double> tree_inf_;    // weight if infected, else 0
    Fenwick<double> tree_heal_;   // weight if healthy, else 0
    Fenwick<std::int64_t> tree_inf_unit_;  // 1 if infected, else 0
    std::uint64_t events_since_rebuild_ = 0;
    std::uint64_t rebuild_interval_ = 0;
};

RunSummary run_full(const SimConfig& config);

struct SurvivalEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    bool std_error_undefined = false;  // reps == 1
    std::int64_t reps = 0;
    std::int64_t alive = 0;
};
SurvivalEstimate survival_probability(const SimConfig& config, std::int64_t reps,
                                      unsigned workers = 1);

// Empirical infection frequencies at each snapshot time: unconditional,
// conditioned on the replica being alive at that snapshot, and conditioned on
// the replica being alive at t_max. Per-vertex rows are filled when
// n <= 4096 or bitmaps were requested.
struct FrequencyReport {
    std::vector<double> times;
    std::int64_t reps = 0;
    std::int64_t alive_at_end = 0;
    std::vector<std::int64_t> alive_at_time;
    // [snapshot][type]
    std::vector<std::vector<double>> type_freq;
    std::vector<std::vector<double>> type_freq_alive;
    std::vector<std::vector<double>> type_freq_alive_end;
    // [snapshot][vertex], empty when not tracked
    std::vector<std::vector<double>> vertex_freq;
    std::vector<std::vector<double>> vertex_freq_alive;
};
FrequencyReport infection_frequency(const SimConfig& config, std::int64_t reps,
                                    unsigned workers = 1);

}  // namespace wcp
