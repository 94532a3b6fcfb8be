#include "wcp/oracle.hpp"

#include <bit>
#include <cmath>

#include "wcp/errors.hpp"

namespace wcp {

namespace {

constexpr int kMaxOracleN = 12;
// run past the nominal 1e-12 contract so compositions keep headroom
constexpr double kPoissonTail = 1e-13;

std::uint32_t init_state_bits(const InitSpec& init, int n) {
    const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1u);
    switch (init.kind) {
        case InitSpec::Kind::All:
            return full;
        case InitSpec::Kind::Single:
            if (init.vertex < 0 || init.vertex >= n)
                throw InvariantError("init vertex out of range");
            return 1u << init.vertex;
        case InitSpec::Kind::Set: {
            std::uint32_t s = 0;
            for (const auto v : init.vertices) {
                if (v < 0 || v >= n) throw InvariantError("init vertex out of range");
                s |= 1u << v;
            }
            return s;
        }
    }
    return full;
}

struct Generator {
    int n;
    double lambda_over_n;
    std::vector<double> w;
    std::vector<double> w_inf;  // per state, sum of weights over infected bits

    // one transported step of the uniformized kernel: out = in * (I + Q/nu)
    void apply(const std::vector<double>& in, std::vector<double>& out, double nu) const {
        const std::size_t states = in.size();
        std::fill(out.begin(), out.end(), 0.0);
        for (std::size_t s = 0; s < states; ++s) {
            const double mass = in[s];
            if (mass == 0.0) continue;
            const auto bits = static_cast<std::uint32_t>(s);
            double outrate = 0.0;
            for (int i = 0; i < n; ++i) {
                const std::uint32_t b = 1u << i;
                double rate;
                if (bits & b) {
                    rate = 1.0;  // recovery
                } else {
                    rate = lambda_over_n * w[static_cast<std::size_t>(i)] * w_inf[s];
                }
                if (rate == 0.0) continue;
                outrate += rate;
                out[s ^ b] += mass * (rate / nu);
            }
            out[s] += mass * (1.0 - outrate / nu);
        }
    }
};

Generator make_generator(const WeightSample& sample, double lambda) {
    if (sample.n > kMaxOracleN)
        throw TooLarge("exact computation is limited to n <= 12 vertices");
    Generator g;
    g.n = static_cast<int>(sample.n);
    g.lambda_over_n = lambda / static_cast<double>(sample.n);
    g.w = sample.w;
    const std::size_t states = std::size_t{1} << g.n;
    g.w_inf.assign(states, 0.0);
    for (std::size_t s = 1; s < states; ++s) {
        const int low = std::countr_zero(static_cast<std::uint32_t>(s));
        g.w_inf[s] = g.w_inf[s & (s - 1)] + g.w[static_cast<std::size_t>(low)];
    }
    return g;
}

// uniformization with automatic time splitting to keep nu*t moderate
void evolve_in_place(const Generator& g, std::vector<double>& dist, double t,
                     double& error_bound) {
    if (t <= 0.0) return;
    const std::size_t states = dist.size();
    // max total infection rate over states is bounded by the best split of
    // total weight into infected/healthy halves
    double total_w = 0.0;
    for (const double x : g.w) total_w += x;
    const double nu = static_cast<double>(g.n) +
                      g.lambda_over_n * 0.25 * total_w * total_w + 1e-9;
    int pieces = 1;
    double tp = t;
    while (nu * tp > 500.0) {
        pieces *= 2;
        tp = t / pieces;
    }
    std::vector<double> next(states);
    for (int piece = 0; piece < pieces; ++piece) {
        const double m = nu * tp;
        // Poisson(m) weights accumulated until the tail is negligible
        double logw = -m;  // log of pmf at k=0
        double cumulative = 0.0;
        std::vector<double> acc(states, 0.0);
        for (std::int64_t k = 0;; ++k) {
            if (k > 0) {
                logw += std::log(m / static_cast<double>(k));
                g.apply(dist, next, nu);
                dist.swap(next);
            }
            const double wk = std::exp(logw);
            cumulative += wk;
            for (std::size_t s = 0; s < states; ++s) acc[s] += wk * dist[s];
            if (cumulative >= 1.0 - kPoissonTail &&
                static_cast<double>(k) >= m) break;
            if (k > static_cast<std::int64_t>(m + 60.0 * std::sqrt(m + 1.0) + 200.0))
                break;
        }
        error_bound += std::max(0.0, 1.0 - cumulative);
        dist = std::move(acc);
    }
}

}  // namespace

std::vector<double> evolve_distribution(const WeightSample& sample, double lambda,
                                        std::vector<double> dist, double t,
                                        double* error_bound) {
    const Generator g = make_generator(sample, lambda);
    const std::size_t states = std::size_t{1} << g.n;
    if (dist.size() != states) throw InvariantError("distribution has wrong size");
    double err = 0.0;
    evolve_in_place(g, dist, t, err);
    if (error_bound) *error_bound += err;
    return dist;
}

OracleResult exact_marginals(const WeightSample& sample, double lambda, double t,
                             const InitSpec& init) {
    if (t < 0.0) throw InvariantError("time must be >= 0");
    const Generator g = make_generator(sample, lambda);
    const std::size_t states = std::size_t{1} << g.n;
    const std::uint32_t s0 = init_state_bits(init, g.n);

    std::vector<double> dist(states, 0.0);
    dist[s0] = 1.0;
    double err = 0.0;
    evolve_in_place(g, dist, t, err);

    OracleResult res;
    res.n = g.n;
    res.lambda = lambda;
    res.t = t;
    for (int i = 0; i < g.n; ++i)
        if (s0 & (1u << i)) res.init.push_back(i);
    res.marginals.assign(static_cast<std::size_t>(g.n), 0.0);
    for (std::size_t s = 1; s < states; ++s) {
        if (dist[s] == 0.0) continue;
        for (int i = 0; i < g.n; ++i)
            if (s & (1u << i)) res.marginals[static_cast<std::size_t>(i)] += dist[s];
    }
    res.survival = 1.0 - dist[0];
    res.truncation_error_bound = err;
    return res;
}

double duality_gap(const WeightSample& sample, double lambda, double t) {
    const OracleResult from_all = exact_marginals(sample, lambda, t, InitSpec::all());
    double gap = 0.0;
    for (std::int64_t i = 0; i < sample.n; ++i) {
        const OracleResult single =
            exact_marginals(sample, lambda, t, InitSpec::single(i));
        gap = std::max(gap, std::abs(single.survival -
                                     from_all.marginals[static_cast<std::size_t>(i)]));
    }
    return gap;
}

double monotonicity_gap(const WeightSample& low, const WeightSample& high,
                        double lambda, double t) {
    if (low.n != high.n) throw DomainMismatch("weight vectors differ in length");
    if (low.n > 10) throw TooLarge("monotonicity check is limited to n <= 10");
    for (std::size_t i = 0; i < low.w.size(); ++i)
        if (low.w[i] > high.w[i])
            throw DomainMismatch("weight vectors are not coordinatewise ordered");
    const OracleResult a = exact_marginals(low, lambda, t, InitSpec::all());
    const OracleResult b = exact_marginals(high, lambda, t, InitSpec::all());
    double gap = b.marginals[0] - a.marginals[0];
    for (std::size_t i = 1; i < a.marginals.size(); ++i)
        gap = std::min(gap, b.marginals[i] - a.marginals[i]);
    return gap;
}

}  // namespace wcp
