#include "wcp/kernel_typed.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wcp/errors.hpp"

namespace wcp {

void TypedState::recompute_cached() {
    S = 0.0;
    total_infected = 0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        S += static_cast<double>(X[i]) * W[i];
        total_infected += X[i];
    }
}

void TypedState::jump_rates(std::vector<double>& up, std::vector<double>& down) const {
    const std::size_t m = W.size();
    up.resize(m);
    down.resize(m);
    const double coef = lambda / static_cast<double>(n);
    for (std::size_t i = 0; i < m; ++i) {
        up[i] = static_cast<double>(N[i] - X[i]) * S * coef * W[i];
        down[i] = static_cast<double>(X[i]);
    }
}

namespace {

double typed_up_total(const TypedState& state) {
    double acc = 0.0;
    for (std::size_t i = 0; i < state.W.size(); ++i)
        acc += static_cast<double>(state.N[i] - state.X[i]) * state.W[i];
    return acc * state.lambda / static_cast<double>(state.n) * state.S;
}

}  // namespace

double typed_total_rate(const TypedState& state) {
    return typed_up_total(state) + static_cast<double>(state.total_infected);
}

TypedEvent typed_apply_jump(TypedState& state, Xoshiro256& rng, double dt) {
    if (state.total_infected == 0) throw Extinct("typed jump on an extinct state");
    const std::size_t m = state.W.size();
    const double coef = state.lambda / static_cast<double>(state.n);
    const double up_total = typed_up_total(state);
    const double down_total = static_cast<double>(state.total_infected);
    const double total = up_total + down_total;

    TypedEvent ev;
    ev.time_increment = dt;
    double u = rng.next_double() * total;
    if (u < down_total) {
        // recovery, type proportional to X_i
        ev.delta = -1;
        std::size_t i = 0;
        for (; i + 1 < m; ++i) {
            const double r = static_cast<double>(state.X[i]);
            if (u < r) break;
            u -= r;
        }
        // roundoff can only push past the end; clamp onto an occupied type
        while (state.X[i] == 0) i = (i + 1) % m;
        ev.type = static_cast<std::int32_t>(i);
        state.X[i] -= 1;
        state.S -= state.W[i];
        state.total_infected -= 1;
    } else {
        ev.delta = +1;
        u -= down_total;
        std::size_t i = 0;
        for (; i + 1 < m; ++i) {
            const double r =
                static_cast<double>(state.N[i] - state.X[i]) * state.W[i] * coef * state.S;
            if (u < r) break;
            u -= r;
        }
        while (state.X[i] >= state.N[i] || state.W[i] == 0.0) i = (i + 1) % m;
        ev.type = static_cast<std::int32_t>(i);
        state.X[i] += 1;
        state.S += state.W[i];
        state.total_infected += 1;
    }
    state.clock += ev.time_increment;
    return ev;
}

TypedEvent typed_step(TypedState& state, Xoshiro256& rng) {
    if (state.total_infected == 0) throw Extinct("typed_step on an extinct state");
    const double dt = rng.exponential(typed_total_rate(state));
    return typed_apply_jump(state, rng, dt);
}

std::vector<std::int64_t> rounded_type_counts(const WeightLaw& law, std::int64_t n) {
    const auto& probs = law.probs();
    const std::size_t m = probs.size();
    std::vector<std::int64_t> counts(m);
    std::vector<std::pair<double, std::size_t>> remainders(m);
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double exact = probs[i] * static_cast<double>(n);
        counts[i] = static_cast<std::int64_t>(std::floor(exact));
        remainders[i] = {exact - std::floor(exact), i};
        assigned += counts[i];
    }
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::int64_t k = 0; k < n - assigned; ++k)
        counts[remainders[static_cast<std::size_t>(k)].second] += 1;
    return counts;
}

RunSummary run_typed(const TypedConfig& config) {
    if (!config.law.is_discrete()) throw InvariantError("typed kernel needs a discrete law");
    const std::size_t m = config.law.type_count();
    if (config.n < static_cast<std::int64_t>(m))
        throw InvariantError("need n >= number of types");
    if (!(config.t_max > 0.0)) throw InvariantError("t_max must be > 0");
    for (std::size_t i = 0; i < config.snapshot_times.size(); ++i) {
        const double s = config.snapshot_times[i];
        if (s < 0.0 || s > config.t_max)
            throw InvariantError("snapshot times must lie in [0, t_max]");
        if (i > 0 && s < config.snapshot_times[i - 1])
            throw InvariantError("snapshot times must be sorted");
    }

    Xoshiro256 rng(config.seed);
    TypedState state;
    state.n = config.n;
    state.lambda = config.lambda;
    state.W = config.law.values();
    if (config.exact_counts) {
        state.N = rounded_type_counts(config.law, config.n);
    } else {
        // multinomial counts, realized the same way an i.i.d. draw would be
        const WeightSample sample = sample_weights(config.law, config.n, rng.next());
        state.N = sample.type_counts;
    }
    state.X.assign(m, 0);
    if (config.init_fraction < 0.0) {
        state.X = state.N;
    } else {
        const double f = std::min(config.init_fraction, 1.0);
        for (std::size_t i = 0; i < m; ++i)
            state.X[i] = std::min(state.N[i],
                                  static_cast<std::int64_t>(std::llround(
                                      f * static_cast<double>(state.N[i]))));
        std::int64_t total = std::accumulate(state.X.begin(), state.X.end(), std::int64_t{0});
        if (total == 0 && f > 0.0) {
            const auto imax = static_cast<std::size_t>(
                std::max_element(state.N.begin(), state.N.end()) - state.N.begin());
            state.X[imax] = 1;
        }
    }
    state.recompute_cached();

    RunSummary out;
    out.type_totals = state.N;
    std::size_t next_snap = 0;
    std::uint64_t since_recompute = 0;
    auto record_through = [&](double limit, bool inclusive) {
        while (next_snap < config.snapshot_times.size()) {
            const double s = config.snapshot_times[next_snap];
            if (inclusive ? s > limit : s >= limit) break;
            SnapshotStat snap;
            snap.time = s;
            snap.count_infected = state.total_infected;
            snap.per_type = state.X;
            out.snapshots.push_back(std::move(snap));
            ++next_snap;
        }
    };

    while (true) {
        if (state.total_infected == 0) {
            out.extinction_time = state.clock;
            record_through(config.t_max, true);
            out.final_alive = false;
            break;
        }
        if (out.events >= config.max_events) {
            out.budget_exceeded = true;
            out.final_alive = true;
            break;
        }
        const double dt = rng.exponential(typed_total_rate(state));
        if (state.clock + dt > config.t_max) {
            record_through(config.t_max, true);
            out.final_alive = true;
            break;
        }
        // snapshots before the event see the pre-event state
        record_through(state.clock + dt, false);
        typed_apply_jump(state, rng, dt);
        ++out.events;
        if (++since_recompute >= (std::uint64_t{1} << 20)) {
            state.recompute_cached();
            since_recompute = 0;
        }
    }
    return out;
}

DriftReport drift_check(const WeightLaw& law, double lambda, const RegionSpec& region) {
    if (!law.is_discrete()) throw InvariantError("drift_check needs a discrete law");
    if (!(region.eta > 0.0) || !(region.eta <= region.eps))
        throw InvariantError("region needs 0 < eta <= eps");
    const auto& W = law.values();
    const auto& p = law.probs();
    const std::size_t m = W.size();
    DriftReport rep;
    double inner = 0.0;  // sum_j p_j eta W_j^2 / (1 + eta W_j)
    double e_w2 = 0.0;   // E[w^2/(1+eta w)]
    for (std::size_t j = 0; j < m; ++j) {
        inner += p[j] * region.eta * W[j] * W[j] / (1.0 + region.eta * W[j]);
        e_w2 += p[j] * W[j] * W[j] / (1.0 + region.eta * W[j]);
    }
    rep.theta_plus.resize(m);
    rep.theta_minus.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        rep.theta_plus[i] = lambda * p[i] * W[i] / (1.0 + region.eps * W[i]) * inner;
        rep.theta_minus[i] = p[i] * region.eps * W[i] / (1.0 + region.eps * W[i]);
    }
    rep.delta = lambda * region.eta / region.eps * e_w2 - 1.0;
    rep.positive = rep.delta > 0.0;
    return rep;
}

}  // namespace wcp
