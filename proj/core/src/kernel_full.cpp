#include "wcp/kernel_full.hpp"

#include <algorithm>
#include <cmath>

#include "wcp/errors.hpp"
#include "wcp/pool.hpp"

namespace wcp {

FullState::FullState(const WeightSample& sample, const InitSpec& init,
                     std::uint64_t rebuild_interval)
    : n_(sample.n),
      sample_(&sample),
      infected_(static_cast<std::size_t>(sample.n), 0),
      tree_inf_(static_cast<std::size_t>(sample.n)),
      tree_heal_(static_cast<std::size_t>(sample.n)),
      tree_inf_unit_(static_cast<std::size_t>(sample.n)),
      rebuild_interval_(rebuild_interval) {
    switch (init.kind) {
        case InitSpec::Kind::All:
            std::fill(infected_.begin(), infected_.end(), 1);
            break;
        case InitSpec::Kind::Single:
            if (init.vertex < 0 || init.vertex >= n_)
                throw InvariantError("init vertex out of range");
            infected_[static_cast<std::size_t>(init.vertex)] = 1;
            break;
        case InitSpec::Kind::Set:
            for (const auto v : init.vertices) {
                if (v < 0 || v >= n_) throw InvariantError("init vertex out of range");
                infected_[static_cast<std::size_t>(v)] = 1;
            }
            break;
    }
    rebuild();
}

void FullState::rebuild() {
    const auto& w = sample_->w;
    std::vector<double> inf_w(w.size(), 0.0), heal_w(w.size(), 0.0);
    std::vector<std::int64_t> inf_unit(w.size(), 0);
    count_infected_ = 0;
    count_healthy_positive_ = 0;
    w_inf_ = w_heal_ = 0.0;
    for (std::size_t v = 0; v < w.size(); ++v) {
        if (infected_[v]) {
            inf_w[v] = w[v];
            inf_unit[v] = 1;
            w_inf_ += w[v];
            ++count_infected_;
        } else {
            heal_w[v] = w[v];
            w_heal_ += w[v];
            if (w[v] > 0.0) ++count_healthy_positive_;
        }
    }
    tree_inf_.assign(inf_w);
    tree_heal_.assign(heal_w);
    tree_inf_unit_.assign(inf_unit);
    events_since_rebuild_ = 0;
}

double FullState::cached_total_drift() const {
    const auto& w = sample_->w;
    double exact_inf = 0.0, exact_heal = 0.0;
    for (std::size_t v = 0; v < w.size(); ++v)
        (infected_[v] ? exact_inf : exact_heal) += w[v];
    const double scale = std::max(1.0, exact_inf + exact_heal);
    return std::max(std::abs(w_inf_ - exact_inf), std::abs(w_heal_ - exact_heal)) / scale;
}

double FullState::infection_rate(double lambda) const {
    if (count_healthy_positive_ == 0 || w_inf_ <= 0.0) return 0.0;
    return lambda / static_cast<double>(n_) * w_inf_ * std::max(w_heal_, 0.0);
}

void FullState::flip(std::int64_t v) {
    const auto idx = static_cast<std::size_t>(v);
    const double wv = sample_->w[idx];
    if (infected_[idx]) {
        infected_[idx] = 0;
        --count_infected_;
        w_inf_ -= wv;
        w_heal_ += wv;
        tree_inf_.add(idx, -wv);
        tree_heal_.add(idx, wv);
        tree_inf_unit_.add(idx, -1);
        if (wv > 0.0) ++count_healthy_positive_;
    } else {
        infected_[idx] = 1;
        ++count_infected_;
        w_inf_ += wv;
        w_heal_ -= wv;
        tree_inf_.add(idx, wv);
        tree_heal_.add(idx, -wv);
        tree_inf_unit_.add(idx, 1);
        if (wv > 0.0) --count_healthy_positive_;
    }
}

double FullState::draw_waiting_time(double lambda, Xoshiro256& rng) const {
    if (count_infected_ == 0) throw Extinct("waiting time on an extinct configuration");
    return rng.exponential(recovery_rate() + infection_rate(lambda));
}

StepEvent FullState::apply_jump(double lambda, Xoshiro256& rng, double dt) {
    if (count_infected_ == 0) throw Extinct("jump on an extinct configuration");
    const double recovery = recovery_rate();
    const double infection = infection_rate(lambda);
    const double total = recovery + infection;
    StepEvent ev;
    ev.time_increment = dt;
    if (rng.next_double() * total < recovery) {
        ev.recovery = true;
        const auto k = rng.bounded(static_cast<std::uint64_t>(count_infected_));
        ev.vertex = static_cast<std::int64_t>(
            tree_inf_unit_.select(static_cast<std::int64_t>(k)));
    } else {
        ev.recovery = false;
        // weight-proportional pick over the healthy set; the retry guards the
        // roundoff edge where the cursor lands on a zero slot
        std::int64_t v = -1;
        for (int attempt = 0; attempt < 8 && v < 0; ++attempt) {
            const double u = rng.next_double() * tree_heal_.total();
            const auto cand = tree_heal_.select(u);
            if (cand < static_cast<std::size_t>(n_) && !infected_[cand] &&
                sample_->w[cand] > 0.0)
                v = static_cast<std::int64_t>(cand);
        }
        if (v < 0) {
            for (std::int64_t c = 0; c < n_ && v < 0; ++c)
                if (!infected_[static_cast<std::size_t>(c)] &&
                    sample_->w[static_cast<std::size_t>(c)] > 0.0)
                    v = c;
            if (v < 0) throw NumericalError("no healthy vertex available for infection");
        }
        ev.vertex = v;
    }
    flip(ev.vertex);
    clock_ += dt;
    if (++events_since_rebuild_ >= rebuild_interval_) rebuild();
    return ev;
}

StepEvent FullState::step(double lambda, Xoshiro256& rng) {
    return apply_jump(lambda, rng, draw_waiting_time(lambda, rng));
}

std::vector<std::int64_t> FullState::per_type_counts(const WeightSample& sample) const {
    if (!sample.has_types()) return {};
    std::vector<std::int64_t> counts(sample.type_values.size(), 0);
    for (std::size_t v = 0; v < infected_.size(); ++v)
        if (infected_[v]) counts[static_cast<std::size_t>(sample.type_of[v])] += 1;
    return counts;
}

std::vector<std::uint64_t> FullState::bitmap() const {
    std::vector<std::uint64_t> words((infected_.size() + 63) / 64, 0);
    for (std::size_t v = 0; v < infected_.size(); ++v)
        if (infected_[v]) words[v / 64] |= std::uint64_t{1} << (v % 64);
    return words;
}

namespace {

void validate_config(const SimConfig& config) {
    if (config.sample == nullptr) throw InvariantError("config has no weight sample");
    if (!(config.t_max > 0.0)) throw InvariantError("t_max must be > 0");
    for (std::size_t i = 0; i < config.snapshot_times.size(); ++i) {
        const double s = config.snapshot_times[i];
        if (s < 0.0 || s > config.t_max)
            throw InvariantError("snapshot times must lie in [0, t_max]");
        if (i > 0 && s < config.snapshot_times[i - 1])
            throw InvariantError("snapshot times must be sorted");
    }
}

}  // namespace

RunSummary run_full(const SimConfig& config) {
    validate_config(config);
    const WeightSample& sample = *config.sample;
    FullState state(sample, config.init);
    Xoshiro256 rng(config.seed);
    RunSummary out;

    std::size_t next_snap = 0;
    auto record_through = [&](double limit, bool inclusive) {
        while (next_snap < config.snapshot_times.size()) {
            const double s = config.snapshot_times[next_snap];
            if (inclusive ? s > limit : s >= limit) break;
            SnapshotStat snap;
            snap.time = s;
            snap.count_infected = state.count_infected();
            snap.per_type = state.per_type_counts(sample);
            if (config.record_bitmaps) snap.bitmap = state.bitmap();
            out.snapshots.push_back(std::move(snap));
            ++next_snap;
        }
    };

    while (true) {
        if (state.count_infected() == 0) {
            out.extinction_time = state.clock();
            record_through(config.t_max, true);
            out.final_alive = false;
            break;
        }
        if (out.events >= config.max_events) {
            out.budget_exceeded = true;
            out.final_alive = true;
            break;
        }
        const double dt = state.draw_waiting_time(config.lambda, rng);
        if (state.clock() + dt > config.t_max) {
            record_through(config.t_max, true);
            out.final_alive = true;
            break;
        }
        // snapshots before the event see the pre-event state
        record_through(state.clock() + dt, false);
        state.apply_jump(config.lambda, rng, dt);
        ++out.events;
    }
    return out;
}

SurvivalEstimate survival_probability(const SimConfig& config, std::int64_t reps,
                                      unsigned workers) {
    if (reps < 1) throw InvariantError("reps must be >= 1");
    validate_config(config);
    std::vector<char> alive(static_cast<std::size_t>(reps), 0);
    parallel_for(reps, workers, [&](std::int64_t r) {
        SimConfig local = config;
        local.snapshot_times.clear();
        local.record_bitmaps = false;
        local.seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
        alive[static_cast<std::size_t>(r)] = run_full(local).final_alive ? 1 : 0;
    });
    SurvivalEstimate est;
    est.reps = reps;
    for (const char a : alive) est.alive += a;
    est.estimate = static_cast<double>(est.alive) / static_cast<double>(reps);
    if (reps == 1) {
        est.std_error = 0.0;
        est.std_error_undefined = true;
    } else {
        est.std_error = std::sqrt(est.estimate * (1.0 - est.estimate) /
                                  static_cast<double>(reps));
    }
    return est;
}

FrequencyReport infection_frequency(const SimConfig& config, std::int64_t reps,
                                    unsigned workers) {
    if (reps < 1) throw InvariantError("reps must be >= 1");
    if (config.snapshot_times.empty())
        throw InvariantError("infection_frequency needs snapshot times");
    validate_config(config);
    const WeightSample& sample = *config.sample;
    const std::size_t snaps = config.snapshot_times.size();
    const std::size_t ntypes = sample.type_values.size();
    const bool per_vertex = config.record_bitmaps || sample.n <= 4096;

    struct RepResult {
        bool alive_end = false;
        std::vector<char> alive_at;                       // per snapshot
        std::vector<std::vector<std::int64_t>> type_counts;
        std::vector<std::vector<std::uint64_t>> bitmaps;
    };
    std::vector<RepResult> results(static_cast<std::size_t>(reps));

    parallel_for(reps, workers, [&](std::int64_t r) {
        SimConfig local = config;
        local.record_bitmaps = per_vertex;
        local.seed = derive_seed(config.seed, static_cast<std::uint64_t>(r));
        const RunSummary run = run_full(local);
        RepResult& res = results[static_cast<std::size_t>(r)];
        res.alive_end = run.final_alive;
        res.alive_at.assign(snaps, 0);
        res.type_counts.assign(snaps, {});
        if (per_vertex) res.bitmaps.assign(snaps, {});
        for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
            const SnapshotStat& snap = run.snapshots[k];
            res.alive_at[k] = snap.count_infected > 0 ? 1 : 0;
            res.type_counts[k] = snap.per_type;
            if (per_vertex) res.bitmaps[k] = snap.bitmap;
        }
    });

    FrequencyReport rep;
    rep.times = config.snapshot_times;
    rep.reps = reps;
    rep.alive_at_time.assign(snaps, 0);
    rep.type_freq.assign(snaps, std::vector<double>(ntypes, 0.0));
    rep.type_freq_alive.assign(snaps, std::vector<double>(ntypes, 0.0));
    rep.type_freq_alive_end.assign(snaps, std::vector<double>(ntypes, 0.0));
    if (per_vertex) {
        rep.vertex_freq.assign(snaps, std::vector<double>(sample.w.size(), 0.0));
        rep.vertex_freq_alive.assign(snaps, std::vector<double>(sample.w.size(), 0.0));
    }

    for (const RepResult& res : results) rep.alive_at_end += res.alive_end ? 1 : 0;
    for (std::size_t k = 0; k < snaps; ++k) {
        std::int64_t alive_here = 0;
        for (const RepResult& res : results) alive_here += res.alive_at[k];
        rep.alive_at_time[k] = alive_here;
        for (std::size_t t = 0; t < ntypes; ++t) {
            double sum_all = 0.0, sum_alive = 0.0, sum_alive_end = 0.0;
            for (const RepResult& res : results) {
                if (res.type_counts[k].empty()) continue;
                const double frac = static_cast<double>(res.type_counts[k][t]) /
                                    static_cast<double>(sample.type_counts[t]);
                sum_all += frac;
                if (res.alive_at[k]) sum_alive += frac;
                if (res.alive_end) sum_alive_end += frac;
            }
            rep.type_freq[k][t] = sum_all / static_cast<double>(reps);
            rep.type_freq_alive[k][t] =
                alive_here > 0 ? sum_alive / static_cast<double>(alive_here) : 0.0;
            rep.type_freq_alive_end[k][t] =
                rep.alive_at_end > 0 ? sum_alive_end / static_cast<double>(rep.alive_at_end)
                                     : 0.0;
        }
        if (per_vertex) {
            for (std::size_t v = 0; v < sample.w.size(); ++v) {
                double sum_all = 0.0, sum_alive = 0.0;
                for (const RepResult& res : results) {
                    if (res.bitmaps[k].empty()) continue;
                    const bool on = (res.bitmaps[k][v / 64] >> (v % 64)) & 1u;
                    sum_all += on ? 1.0 : 0.0;
                    if (res.alive_at[k] && on) sum_alive += 1.0;
                }
                rep.vertex_freq[k][v] = sum_all / static_cast<double>(reps);
                rep.vertex_freq_alive[k][v] =
                    alive_here > 0 ? sum_alive / static_cast<double>(alive_here) : 0.0;
            }
        }
    }
    return rep;
}

}  // namespace wcp
