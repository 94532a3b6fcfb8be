#include "wcp/branching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wcp/errors.hpp"
#include "wcp/meanfield.hpp"
#include "wcp/rng.hpp"

namespace wcp {

namespace {

bool sample_supercritical(const WeightSample& sample, double lambda) {
    return lambda * sample.sum_w2 / static_cast<double>(sample.n) > 1.0;
}

}  // namespace

std::vector<double> extinction_probs(const WeightSample& sample, double lambda) {
    std::vector<double> rho(sample.w.size(), 1.0);
    if (!sample_supercritical(sample, lambda)) return rho;
    const double s = sigma_hat(sample, lambda);
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = 1.0 / (1.0 + s * sample.w[i]);
    return rho;
}

std::vector<double> mean_matrix_action(const WeightSample& sample, double lambda,
                                       double t, std::span<const double> v) {
    if (t < 0.0) throw InvariantError("time must be >= 0");
    if (v.size() != sample.w.size()) throw DomainMismatch("vector length != n");
    const double norm2 = sample.sum_w2;
    std::vector<double> out(v.size());
    const double bulk = std::exp(-t);
    if (norm2 == 0.0) {
        for (std::size_t i = 0; i < v.size(); ++i) out[i] = bulk * v[i];
        return out;
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) dot += sample.w[i] * v[i];
    const double c = dot / norm2;
    const double top =
        std::exp((lambda * norm2 / static_cast<double>(sample.n) - 1.0) * t);
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = top * c * sample.w[i] + bulk * (v[i] - c * sample.w[i]);
    return out;
}

double conditioned_top_eig(const WeightSample& sample, double lambda) {
    if (!sample_supercritical(sample, lambda))
        throw NotSupercritical("conditioned spectrum needs lambda > n / sum w^2");
    const std::vector<double> rho = extinction_probs(sample, lambda);
    const std::size_t n = rho.size();
    std::vector<double> u(n);  // u_i = rho_i w_i
    double max_inv_rho = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = rho[i] * sample.w[i];
        max_inv_rho = std::max(max_inv_rho, 1.0 / rho[i]);
    }
    const double coef = lambda / static_cast<double>(sample.n);
    const double shift = 1.0 + max_inv_rho;  // makes the shifted operator positive

    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += u[i] * x[i];
        dot *= coef;
        for (std::size_t i = 0; i < n; ++i)
            y[i] = (dot * u[i] - x[i]) / rho[i] + shift * x[i];
    };

    std::vector<double> x(u), y(n);
    double norm = 0.0;
    for (const double xi : x) norm += xi * xi;
    norm = std::sqrt(norm);
    if (norm == 0.0) return -1.0;  // all weights zero: pure death at rate 1
    for (auto& xi : x) xi /= norm;

    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 100000; ++iter) {
        apply(x, y);
        double rayleigh = 0.0, ynorm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            rayleigh += x[i] * y[i];
            ynorm += y[i] * y[i];
        }
        ynorm = std::sqrt(ynorm);
        for (std::size_t i = 0; i < n; ++i) x[i] = y[i] / ynorm;
        if (std::abs(rayleigh - prev) < 1e-10) return rayleigh - shift;
        prev = rayleigh;
    }
    throw NoConvergence("power iteration did not settle in 1e5 iterations");
}

SpectralReport spectral_report(const WeightSample& sample, double lambda) {
    SpectralReport rep;
    rep.n = sample.n;
    rep.lambda = lambda;
    rep.top_eig_A = lambda * sample.sum_w2 / static_cast<double>(sample.n) - 1.0;
    rep.supercritical = sample_supercritical(sample, lambda);
    if (rep.supercritical) {
        rep.extinction = extinction_probs(sample, lambda);
        double s = 0.0;
        for (std::size_t i = 0; i < rep.extinction.size(); ++i)
            s += sample.w[i] * sample.w[i] * rep.extinction[i] * rep.extinction[i];
        rep.top_eig_bound_conditioned =
            lambda / static_cast<double>(sample.n) * s - 1.0;
        rep.top_eig_conditioned_numeric = conditioned_top_eig(sample, lambda);
    } else {
        rep.top_eig_bound_conditioned = std::numeric_limits<double>::quiet_NaN();
        rep.top_eig_conditioned_numeric = std::numeric_limits<double>::quiet_NaN();
    }
    return rep;
}

MtbpResult mtbp_simulate(const WeightSample& sample, double lambda,
                         std::int64_t init_type, double t_max, std::uint64_t seed,
                         std::int64_t cap) {
    if (!(t_max > 0.0)) throw InvariantError("t_max must be > 0");
    if (init_type < 0 || init_type >= sample.n)
        throw InvariantError("init_type out of range");
    // static child-type sampler: prefix sums of w
    std::vector<double> cum(sample.w.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < cum.size(); ++i) {
        acc += sample.w[i];
        cum[i] = acc;
    }
    const double birth_coef = lambda * sample.sum_w / static_cast<double>(sample.n);

    Xoshiro256 rng(seed);
    std::vector<std::int32_t> alive{static_cast<std::int32_t>(init_type)};
    double weight_alive = sample.w[static_cast<std::size_t>(init_type)];
    double clock = 0.0;
    MtbpResult res;
    while (true) {
        if (alive.empty()) {
            res.extinction_time = clock;
            return res;
        }
        if (static_cast<std::int64_t>(alive.size()) >= cap) {
            res.survived = true;
            res.hit_cap = true;
            return res;
        }
        const double death = static_cast<double>(alive.size());
        // aggregate birth rate: lambda * (sum of living weights) * sum_w / n
        const double birth_rate = birth_coef * weight_alive;
        const double total = death + birth_rate;
        const double dt = rng.exponential(total);
        if (clock + dt > t_max) {
            res.survived = true;
            return res;
        }
        clock += dt;
        ++res.events;
        if (rng.next_double() * total < death) {
            const auto k = static_cast<std::size_t>(rng.bounded(alive.size()));
            weight_alive -= sample.w[static_cast<std::size_t>(alive[k])];
            alive[k] = alive.back();
            alive.pop_back();
        } else {
            const double u = rng.next_double() * sample.sum_w;
            const auto it = std::upper_bound(cum.begin(), cum.end(), u);
            auto j = static_cast<std::size_t>(it - cum.begin());
            if (j >= cum.size()) j = cum.size() - 1;
            alive.push_back(static_cast<std::int32_t>(j));
            weight_alive += sample.w[j];
        }
    }
}

std::vector<double> symmetric_eigenvalues(std::vector<double> a, int dim) {
    if (dim < 1 || a.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim))
        throw InvariantError("matrix size mismatch");
    auto at = [&](int i, int j) -> double& {
        return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(dim) +
                 static_cast<std::size_t>(j)];
    };
    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < dim; ++i)
            for (int j = i + 1; j < dim; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-28) break;
        for (int p = 0; p < dim - 1; ++p) {
            for (int q = p + 1; q < dim; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < dim; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < dim; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> eig(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) eig[static_cast<std::size_t>(i)] = at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

DiagEigOutcome diag_eig_property(int dim, int trials, std::uint64_t seed) {
    if (trials < 1 || dim < 2) throw InvariantError("need trials >= 1, dim >= 2");
    DiagEigOutcome out;
    out.trials = trials;
    Xoshiro256 rng(seed);
    const auto d = static_cast<std::size_t>(dim);
    for (int trial = 0; trial < trials; ++trial) {
        // U = Q diag(values) Q^T with lambda_0 = max value < 0
        std::vector<double> values(d);
        double lambda0 = -std::numeric_limits<double>::infinity();
        for (auto& v : values) {
            v = -0.1 - 4.9 * rng.next_double();
            lambda0 = std::max(lambda0, v);
        }
        std::vector<double> u(d * d, 0.0);
        for (std::size_t i = 0; i < d; ++i) u[i * d + i] = values[i];
        // random orthogonal conjugation by plane rotations
        for (int r = 0; r < 4 * dim * dim; ++r) {
            const auto p = static_cast<std::size_t>(rng.bounded(d));
            auto q = static_cast<std::size_t>(rng.bounded(d - 1));
            if (q >= p) ++q;
            const double angle = 2.0 * 3.14159265358979323846 * rng.next_double();
            const double c = std::cos(angle), s = std::sin(angle);
            for (std::size_t k = 0; k < d; ++k) {
                const double akp = u[k * d + p], akq = u[k * d + q];
                u[k * d + p] = c * akp - s * akq;
                u[k * d + q] = s * akp + c * akq;
            }
            for (std::size_t k = 0; k < d; ++k) {
                const double apk = u[p * d + k], aqk = u[q * d + k];
                u[p * d + k] = c * apk - s * aqk;
                u[q * d + k] = s * apk + c * aqk;
            }
        }
        // D^{1/2} U D^{1/2} shares its spectrum with D U
        std::vector<double> dsqrt(d);
        for (auto& x : dsqrt) x = std::sqrt(1.0 + 9.0 * rng.next_double());
        std::vector<double> scaled(d * d);
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                scaled[i * d + j] = dsqrt[i] * u[i * d + j] * dsqrt[j];
        const std::vector<double> eig = symmetric_eigenvalues(std::move(scaled), dim);
        const double excess = eig.back() - lambda0;
        out.worst_excess = std::max(out.worst_excess, excess);
        if (excess <= 1e-9) ++out.passed;
    }
    return out;
}

}  // namespace wcp
