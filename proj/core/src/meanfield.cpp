#include "wcp/meanfield.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

#include "wcp/errors.hpp"

namespace wcp {

namespace {

constexpr double kQuadTol = 1e-12;
constexpr double kResidualTol = 1e-10;

boost::math::quadrature::tanh_sinh<double>& integrator() {
    // node tables are built lazily and are not shared across threads
    thread_local boost::math::quadrature::tanh_sinh<double> quad(16);
    return quad;
}

// generic bisection for the decreasing map sigma -> lambda * E(sigma),
// run essentially to double-precision exhaustion of the bracket
struct RootResult {
    double sigma;
    std::int64_t iters;
    double residual;
};

template <class Fn>
RootResult solve_stationarity(const Fn& lambda_e, const char* what) {
    double lo = 0.0;  // lambda_e(0+) > 1 by the supercriticality precondition
    double hi = 1.0;
    std::int64_t iters = 0;
    while (lambda_e(hi) >= 1.0) {
        lo = hi;
        hi *= 2.0;
        if (++iters > 1100 || hi > 1e300)
            throw NumericalError(std::string(what) + ": bracketing failed");
    }
    double best = 0.5 * (lo + hi);
    double best_res = std::numeric_limits<double>::infinity();
    for (; iters < 1500; ++iters) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const double f = lambda_e(mid);
        const double res = std::abs(f - 1.0);
        if (res < best_res) {
            best_res = res;
            best = mid;
        }
        if (f == 1.0) break;
        if (f > 1.0)
            lo = mid;
        else
            hi = mid;
        // the residual check keeps the returned root honest at extreme scales
        if (hi - lo < 1e-13 * mid && res <= 0.5 * kResidualTol) break;
    }
    return {best, iters, best_res};
}

// int_0^1 t^a / (t + c) dt for a > -1, c >= 2, via the alternating series
// sum_k (-1)^k c^-(k+1) / (a + k + 1); truncation error below the first
// dropped term, i.e. < 2^-80 of the leading one.
double power_over_linear_series(double a, double c) {
    double sum = 0.0;
    double cpow = 1.0 / c;
    double sign = 1.0;
    for (int k = 0; k < 80; ++k) {
        sum += sign * cpow / (a + k + 1);
        sign = -sign;
        cpow /= c;
    }
    return sum;
}

}  // namespace

double lambda_c(const WeightLaw& law) {
    const double m2 = law.moment(2);
    return std::isinf(m2) ? 0.0 : 1.0 / m2;
}

double expectation_w2_over(const WeightLaw& law, double sigma) {
    if (law.is_discrete()) {
        const auto& vals = law.values();
        const auto& probs = law.probs();
        double s = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i)
            s += probs[i] * vals[i] * vals[i] / (1.0 + sigma * vals[i]);
        return s;
    }
    // int_{xm}^inf (a) xm^a x^(2-a-1) / (1+sigma x) dx with a = alpha-1,
    // compactified by x = xm/t onto t in (0,1]:
    //   (alpha-1) xm^2 int_0^1 t^(alpha-3) / (t + sigma xm) dt
    const double a = law.alpha();
    const double xm = law.xm();
    const double sx = sigma * xm;
    const double scale = (a - 1.0) * xm * xm;
    if (sigma == 0.0 && a <= 3.0) return std::numeric_limits<double>::infinity();
    if (sx >= 2.0) return scale * power_over_linear_series(a - 3.0, sx);
    auto f = [&](double t) { return std::pow(t, a - 3.0) / (t + sx); };
    double err = 0.0;
    const double val = integrator().integrate(f, 0.0, 1.0, kQuadTol, &err);
    return scale * val;
}

double expectation_infected_fraction(const WeightLaw& law, double sigma) {
    if (law.is_discrete()) {
        const auto& vals = law.values();
        const auto& probs = law.probs();
        double s = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i)
            s += probs[i] * profile_value(sigma, vals[i]);
        return s;
    }
    // E[sigma w/(1+sigma w)] = (alpha-1) sigma xm int_0^1 t^(alpha-2)/(t+sigma xm) dt
    const double a = law.alpha();
    const double xm = law.xm();
    const double sx = sigma * xm;
    if (sx >= 2.0)
        return (a - 1.0) * sigma * xm * power_over_linear_series(a - 2.0, sx);
    auto f = [&](double t) { return std::pow(t, a - 2.0) / (t + sx); };
    double err = 0.0;
    const double val = integrator().integrate(f, 0.0, 1.0, kQuadTol, &err);
    return (a - 1.0) * sigma * xm * val;
}

double sigma(const WeightLaw& law, double lambda) {
    if (!(lambda > lambda_c(law)))
        throw NotSupercritical("sigma requires lambda > lambda_c");
    auto f = [&](double s) { return lambda * expectation_w2_over(law, s); };
    return solve_stationarity(f, "sigma").sigma;
}

double sigma_hat(const WeightSample& sample, double lambda) {
    const double threshold = static_cast<double>(sample.n) / sample.sum_w2;
    if (!(lambda > threshold))
        throw NotSupercritical("sigma_hat requires lambda > n / sum w^2");
    const double inv_n = 1.0 / static_cast<double>(sample.n);
    auto f = [&](double s) {
        double acc = 0.0;
        if (sample.has_types()) {
            for (std::size_t t = 0; t < sample.type_values.size(); ++t) {
                const double w = sample.type_values[t];
                acc += static_cast<double>(sample.type_counts[t]) * w * w / (1.0 + s * w);
            }
        } else {
            for (const double w : sample.w) acc += w * w / (1.0 + s * w);
        }
        return lambda * inv_n * acc;
    };
    return solve_stationarity(f, "sigma_hat").sigma;
}

double rho(const WeightLaw& law, double lambda) {
    return expectation_infected_fraction(law, sigma(law, lambda));
}

MeanFieldSolution solve_meanfield(const WeightLaw& law, double lambda) {
    MeanFieldSolution out;
    out.lambda = lambda;
    out.lambda_c = lambda_c(law);
    if (lambda > out.lambda_c) {
        auto f = [&](double s) { return lambda * expectation_w2_over(law, s); };
        const RootResult r = solve_stationarity(f, "sigma");
        out.has_sigma = true;
        out.sigma = r.sigma;
        out.solver_iters = r.iters;
        out.residual = r.residual;
        out.rho = expectation_infected_fraction(law, r.sigma);
    }
    return out;
}

std::vector<double> profile(const WeightLaw& law, double lambda) {
    if (!law.is_discrete())
        throw InvariantError("per-type profile requires a discrete law");
    const double s = sigma(law, lambda);
    std::vector<double> p(law.type_count());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = profile_value(s, law.values()[i]);
    return p;
}

std::vector<double> profile(const WeightSample& sample, double lambda) {
    const double s = sigma_hat(sample, lambda);
    std::vector<double> p(sample.w.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = profile_value(s, sample.w[i]);
    return p;
}

std::function<double(double)> profile_fn(const WeightLaw& law, double lambda) {
    const double s = sigma(law, lambda);
    return [s](double x) { return profile_value(s, x); };
}

OdeTrajectory ode_flow(const WeightLaw& law, double lambda,
                       const std::vector<double>& p0, double t_end, double dt) {
    if (!law.is_discrete()) throw InvariantError("ode_flow requires a discrete law");
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw InvariantError("ode_flow needs dt > 0, t_end >= 0");
    const auto& vals = law.values();
    const auto& probs = law.probs();
    const std::size_t m = vals.size();
    if (p0.size() != m) throw InvariantError("p0 size must match the number of types");
    for (const double p : p0)
        if (!(p >= 0.0 && p <= 1.0)) throw InvariantError("p0 entries must lie in [0,1]");

    auto rhs = [&](const std::vector<double>& p, std::vector<double>& out) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) s += p[j] * vals[j] * probs[j];
        for (std::size_t i = 0; i < m; ++i)
            out[i] = -p[i] + (1.0 - p[i]) * lambda * vals[i] * s;
    };

    OdeTrajectory traj;
    std::vector<double> p = p0, k1(m), k2(m), k3(m), k4(m), tmp(m);
    const auto steps = static_cast<std::int64_t>(std::ceil(t_end / dt - 1e-12));
    traj.times.reserve(static_cast<std::size_t>(steps) + 1);
    traj.states.reserve(static_cast<std::size_t>(steps) + 1);
    traj.times.push_back(0.0);
    traj.states.push_back(p);
    for (std::int64_t step = 1; step <= steps; ++step) {
        rhs(p, k1);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = p[i] + 0.5 * dt * k1[i];
        rhs(tmp, k2);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = p[i] + 0.5 * dt * k2[i];
        rhs(tmp, k3);
        for (std::size_t i = 0; i < m; ++i) tmp[i] = p[i] + dt * k3[i];
        rhs(tmp, k4);
        double clamp = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double v = p[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            const double c = std::clamp(v, 0.0, 1.0);
            clamp = std::max(clamp, std::abs(v - c));
            p[i] = c;
        }
        if (clamp > 1e-9)
            throw StepTooLarge("ode_flow clamped a state by more than 1e-9; reduce dt");
        traj.times.push_back(static_cast<double>(step) * dt);
        traj.states.push_back(p);
    }
    return traj;
}

double sigma_asymptotic(double alpha, double C, double delta, double lambda_c,
                        double third_moment) {
    if (!(alpha > 2.0)) throw UnsupportedAlpha("tail index must exceed 2");
    if (!(delta > 0.0)) throw InvariantError("delta must be > 0");
    const double pi = 3.14159265358979323846;
    if (alpha < 3.0) {
        const double pref = C * pi * (alpha - 1.0) / std::sin(pi * alpha);
        return std::pow(pref * delta, 1.0 / (3.0 - alpha));
    }
    if (alpha == 3.0) return std::exp(-1.0 / (2.0 * C * delta));
    if (alpha < 4.0) {
        const double pref = -std::sin(pi * alpha) / (C * lambda_c * lambda_c * (alpha - 1.0) * pi);
        return std::pow(pref, 1.0 / (alpha - 3.0)) * std::pow(delta, 1.0 / (alpha - 3.0));
    }
    if (alpha == 4.0)
        return delta / (3.0 * C * lambda_c * lambda_c * std::log(1.0 / delta));
    return delta / (lambda_c * lambda_c * third_moment);
}

double mellin_check(double alpha) {
    if (!(alpha > 2.0 && alpha < 3.0))
        throw UnsupportedAlpha("mellin_check requires alpha in (2,3)");
    // split at 1 and map the tail back to (0,1] by z -> 1/z
    auto f = [&](double z) {
        return (std::pow(z, 2.0 - alpha) + std::pow(z, alpha - 3.0)) / (1.0 + z);
    };
    double err = 0.0;
    return integrator().integrate(f, 0.0, 1.0, kQuadTol, &err);
}

double mellin_check_truncated(double alpha, double cut) {
    if (!(alpha > 2.0 && alpha <= 3.0))
        throw UnsupportedAlpha("mellin_check_truncated requires alpha in (2,3]");
    if (!(cut > 0.0 && cut < 1.0)) throw InvariantError("cut must lie in (0,1)");
    auto head = [&](double z) { return std::pow(z, 2.0 - alpha) / (1.0 + z); };
    auto tail = [&](double z) { return std::pow(z, alpha - 3.0) / (1.0 + z); };
    double err = 0.0;
    const double a = integrator().integrate(head, cut, 1.0, kQuadTol, &err);
    const double b = integrator().integrate(tail, 0.0, 1.0, kQuadTol, &err);
    return a + b;
}

}  // namespace wcp
