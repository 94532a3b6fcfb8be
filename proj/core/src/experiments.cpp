#include "wcp/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "wcp/errors.hpp"
#include "wcp/kernel_full.hpp"
#include "wcp/kernel_typed.hpp"
#include "wcp/pool.hpp"
#include "wcp/rng.hpp"
#include "wcp/stats.hpp"

namespace wcp {

namespace {

using nlohmann::json;

template <class T>
std::vector<T> grid_field(const json& j, const char* scalar_key, const char* grid_key) {
    std::vector<T> out;
    if (j.contains(grid_key)) {
        for (const auto& v : j.at(grid_key)) out.push_back(v.get<T>());
    } else if (j.contains(scalar_key)) {
        out.push_back(j.at(scalar_key).get<T>());
    }
    return out;
}

}  // namespace

ExperimentSpec load_spec_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("bad experiment spec JSON: ") + e.what(),
                         static_cast<std::size_t>(e.byte));
    }
    ExperimentSpec spec;
    try {
        spec.name = j.value("name", std::string("experiment"));
        spec.experiment = j.at("experiment").get<std::string>();
        if (j.contains("law")) spec.law = parse_weight_law(j.at("law").get<std::string>());
        spec.lambdas = grid_field<double>(j, "lambda", "lambda_grid");
        spec.ns = grid_field<std::int64_t>(j, "n", "n_grid");
        spec.reps = j.value("reps", std::int64_t{1});
        spec.ts = grid_field<double>(j, "t", "t_grid");
        spec.t_max = j.value("t_max", 0.0);
        spec.kernel = j.value("kernel", std::string("full"));
        spec.seed = j.value("seed", std::uint64_t{0});
        spec.exact_counts = j.value("exact_counts", false);
        spec.output = j.value("output", std::string());
        spec.alpha = j.value("alpha", 0.0);
        spec.deltas = grid_field<double>(j, "delta", "delta_grid");
    } catch (const json::exception& e) {
        throw InvariantError(std::string("bad experiment spec: ") + e.what());
    }
    if (spec.reps < 1) throw InvariantError("reps must be >= 1");
    if (spec.kernel != "full" && spec.kernel != "typed")
        throw InvariantError("kernel must be 'full' or 'typed'");
    return spec;
}

ExperimentSpec load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open spec file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_spec_json(ss.str());
}

std::string canonical_spec_json(const ExperimentSpec& spec) {
    json j;
    j["name"] = spec.name;
    j["experiment"] = spec.experiment;
    j["law"] = spec.law.to_string();
    j["lambda_grid"] = spec.lambdas;
    j["n_grid"] = spec.ns;
    j["reps"] = spec.reps;
    j["t_grid"] = spec.ts;
    j["t_max"] = spec.t_max;
    j["kernel"] = spec.kernel;
    j["seed"] = spec.seed;
    j["exact_counts"] = spec.exact_counts;
    j["alpha"] = spec.alpha;
    j["delta_grid"] = spec.deltas;
    return j.dump();  // keys serialize in sorted order
}

std::uint64_t spec_hash(const ExperimentSpec& spec) {
    // FNV-1a over the canonical serialization
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (const char c : canonical_spec_json(spec)) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

namespace {

void stamp(Table& t, const ExperimentSpec& spec) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(spec.seed));
    t.add_comment("seed", buf);
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(spec_hash(spec)));
    t.add_comment("spec-hash", buf);
    t.add_comment("name", spec.name);
}

struct RepOutcome {
    bool alive_end = false;
    double extinction_time = std::numeric_limits<double>::quiet_NaN();
    std::int64_t infected_at_end = 0;
    std::int64_t n_at_end = 0;
    // per snapshot: alive flag and per-type infected fractions
    std::vector<char> alive_at;
    std::vector<std::vector<double>> type_frac;
};

// One replica on either kernel with a common outcome shape. Replica seeds
// derive from `base`; the full kernel redraws its weight sample per replica
// so both kernels model i.i.d. weights.
RepOutcome run_replica(const ExperimentSpec& spec, double lambda, std::int64_t n,
                       double t_max, const std::vector<double>& snaps,
                       std::uint64_t base, std::int64_t rep) {
    RepOutcome out;
    const std::uint64_t seed = derive_seed(base, static_cast<std::uint64_t>(rep));
    if (spec.kernel == "typed") {
        TypedConfig cfg;
        cfg.law = spec.law;
        cfg.lambda = lambda;
        cfg.n = n;
        cfg.t_max = t_max;
        cfg.snapshot_times = snaps;
        cfg.seed = seed;
        cfg.exact_counts = spec.exact_counts;
        const RunSummary run = run_typed(cfg);
        out.alive_end = run.final_alive;
        if (run.extinction_time) out.extinction_time = *run.extinction_time;
        out.n_at_end = n;
        out.alive_at.assign(snaps.size(), 0);
        out.type_frac.assign(snaps.size(), {});
        for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
            const auto& snap = run.snapshots[k];
            out.alive_at[k] = snap.count_infected > 0;
            if (k + 1 == run.snapshots.size() && snap.time == t_max)
                out.infected_at_end = snap.count_infected;
            // per-type totals are realization-dependent in multinomial mode
            std::vector<double> frac(snap.per_type.size(), 0.0);
            for (std::size_t t = 0; t < frac.size(); ++t)
                frac[t] = run.type_totals[t] > 0
                              ? static_cast<double>(snap.per_type[t]) /
                                    static_cast<double>(run.type_totals[t])
                              : 0.0;
            out.type_frac[k] = std::move(frac);
        }
    } else {
        const WeightSample sample =
            sample_weights(spec.law, n, derive_seed(seed, 0x5A11));
        SimConfig cfg;
        cfg.lambda = lambda;
        cfg.sample = &sample;
        cfg.init = InitSpec::all();
        cfg.t_max = t_max;
        cfg.snapshot_times = snaps;
        cfg.seed = derive_seed(seed, 0x5A12);
        const RunSummary run = run_full(cfg);
        out.alive_end = run.final_alive;
        if (run.extinction_time) out.extinction_time = *run.extinction_time;
        out.n_at_end = n;
        out.alive_at.assign(snaps.size(), 0);
        out.type_frac.assign(snaps.size(), {});
        for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
            const auto& snap = run.snapshots[k];
            out.alive_at[k] = snap.count_infected > 0;
            if (k + 1 == run.snapshots.size() && snap.time == t_max)
                out.infected_at_end = snap.count_infected;
            std::vector<double> frac(snap.per_type.size(), 0.0);
            for (std::size_t t = 0; t < frac.size(); ++t)
                frac[t] = sample.type_counts[t] > 0
                              ? static_cast<double>(snap.per_type[t]) /
                                    static_cast<double>(sample.type_counts[t])
                              : 0.0;
            out.type_frac[k] = std::move(frac);
        }
    }
    return out;
}

std::vector<RepOutcome> run_replicas(const ExperimentSpec& spec, double lambda,
                                     std::int64_t n, double t_max,
                                     const std::vector<double>& snaps,
                                     std::uint64_t base, unsigned workers) {
    std::vector<RepOutcome> outcomes(static_cast<std::size_t>(spec.reps));
    parallel_for(spec.reps, workers, [&](std::int64_t r) {
        outcomes[static_cast<std::size_t>(r)] =
            run_replica(spec, lambda, n, t_max, snaps, base, r);
    });
    return outcomes;
}

double single_lambda(const ExperimentSpec& spec) {
    if (spec.lambdas.size() != 1)
        throw InvariantError("this experiment needs exactly one lambda");
    return spec.lambdas[0];
}

}  // namespace

Table extinction_scaling(const ExperimentSpec& spec, unsigned workers) {
    const double lambda = single_lambda(spec);
    const double lc = lambda_c(spec.law);
    if (!(lambda < lc))
        throw GuardTripped("extinction_scaling labeled subcritical but lambda >= lambda_c");
    if (spec.ns.empty()) throw InvariantError("n grid is empty");

    Table t({"n", "reps", "extinct", "mean_time", "sd_time", "max_time"});
    stamp(t, spec);
    std::vector<double> log_ns, means;
    for (std::size_t g = 0; g < spec.ns.size(); ++g) {
        const std::int64_t n = spec.ns[g];
        const double t_max =
            spec.t_max > 0.0 ? spec.t_max
                             : 10.0 * std::log(static_cast<double>(n)) + 200.0;
        const std::uint64_t base = derive_seed(spec.seed, g);
        const auto outcomes = run_replicas(spec, lambda, n, t_max, {}, base, workers);
        std::vector<double> times;
        std::int64_t extinct = 0;
        for (const auto& o : outcomes) {
            if (!o.alive_end && std::isfinite(o.extinction_time)) {
                times.push_back(o.extinction_time);
                ++extinct;
            }
        }
        const SummaryStats st = summarize(times);
        t.add_row({n, spec.reps, extinct, st.mean, st.sd, st.max});
        log_ns.push_back(std::log(static_cast<double>(n)));
        means.push_back(st.mean);
    }
    if (log_ns.size() >= 2) {
        const LinearFit fit = linear_fit(log_ns, means);
        t.add_comment("slope_vs_log_n", format_value(fit.slope));
        t.add_comment("intercept", format_value(fit.intercept));
        t.add_comment("r2", format_value(fit.r2));
    }
    return t;
}

Table survival_persistence(const ExperimentSpec& spec, unsigned workers) {
    const double lambda = single_lambda(spec);
    if (!(lambda > lambda_c(spec.law)))
        throw GuardTripped("survival_persistence labeled supercritical but lambda <= lambda_c");
    if (spec.ns.empty()) throw InvariantError("n grid is empty");
    const double t_max = spec.t_max > 0.0 ? spec.t_max : 1000.0;

    Table t({"n", "reps", "alive", "fraction_alive"});
    stamp(t, spec);
    for (std::size_t g = 0; g < spec.ns.size(); ++g) {
        const std::int64_t n = spec.ns[g];
        const std::uint64_t base = derive_seed(spec.seed, g);
        const auto outcomes = run_replicas(spec, lambda, n, t_max, {}, base, workers);
        std::int64_t alive = 0;
        for (const auto& o : outcomes) alive += o.alive_end ? 1 : 0;
        t.add_row({n, spec.reps, alive,
                   static_cast<double>(alive) / static_cast<double>(spec.reps)});
    }
    return t;
}

Table profile_accuracy(const ExperimentSpec& spec, unsigned workers) {
    const double lambda = single_lambda(spec);
    if (!(lambda > lambda_c(spec.law)))
        throw GuardTripped("profile_accuracy needs lambda > lambda_c");
    if (spec.ns.size() != 1) throw InvariantError("profile_accuracy needs exactly one n");
    if (spec.ts.empty()) throw InvariantError("profile_accuracy needs a t grid");
    if (!spec.law.is_discrete())
        throw InvariantError("profile_accuracy compares per-type frequencies; needs a discrete law");
    const std::int64_t n = spec.ns[0];
    std::vector<double> snaps = spec.ts;
    std::sort(snaps.begin(), snaps.end());
    const double t_max = spec.t_max > 0.0 ? spec.t_max : snaps.back();

    const std::vector<double> target = profile(spec.law, lambda);
    const std::uint64_t base = derive_seed(spec.seed, 0);
    const auto outcomes = run_replicas(spec, lambda, n, t_max, snaps, base, workers);

    Table t({"t", "type", "weight", "empirical_freq", "meanfield_p", "abs_error",
             "alive_reps"});
    stamp(t, spec);
    double max_err = 0.0;
    std::vector<double> spread_lo(target.size(),
                                  std::numeric_limits<double>::infinity());
    std::vector<double> spread_hi(target.size(),
                                  -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < snaps.size(); ++k) {
        std::int64_t alive = 0;
        std::vector<double> freq(target.size(), 0.0);
        for (const auto& o : outcomes) {
            if (k < o.alive_at.size() && o.alive_at[k]) {
                ++alive;
                for (std::size_t ty = 0; ty < freq.size(); ++ty)
                    freq[ty] += o.type_frac[k][ty];
            }
        }
        for (std::size_t ty = 0; ty < freq.size(); ++ty) {
            const double f = alive > 0 ? freq[ty] / static_cast<double>(alive) : 0.0;
            const double err = f - target[ty];
            max_err = std::max(max_err, std::abs(err));
            spread_lo[ty] = std::min(spread_lo[ty], err);
            spread_hi[ty] = std::max(spread_hi[ty], err);
            t.add_row({snaps[k], static_cast<std::int64_t>(ty), spec.law.values()[ty],
                       f, target[ty], std::abs(err), alive});
        }
    }
    double max_spread = 0.0;
    for (std::size_t ty = 0; ty < target.size(); ++ty)
        max_spread = std::max(max_spread, spread_hi[ty] - spread_lo[ty]);
    t.add_comment("max_abs_error", format_value(max_err));
    t.add_comment("max_error_spread_over_t", format_value(max_spread));
    return t;
}

Table rho_curve(const ExperimentSpec& spec, unsigned workers) {
    if (spec.lambdas.empty()) throw InvariantError("lambda grid is empty");
    if (spec.ns.size() != 1) throw InvariantError("rho_curve needs exactly one n");
    const double lc = lambda_c(spec.law);
    for (const double l : spec.lambdas)
        if (!(l > lc)) throw GuardTripped("rho_curve needs every lambda > lambda_c");
    const std::int64_t n = spec.ns[0];
    const double t_max = spec.t_max > 0.0 ? spec.t_max : 50.0;

    Table t({"lambda", "rho_meanfield", "rho_empirical", "alive_reps", "reps"});
    stamp(t, spec);
    for (std::size_t g = 0; g < spec.lambdas.size(); ++g) {
        const double lambda = spec.lambdas[g];
        const std::uint64_t base = derive_seed(spec.seed, g);
        const auto outcomes =
            run_replicas(spec, lambda, n, t_max, {t_max}, base, workers);
        std::int64_t alive = 0;
        double infected = 0.0;
        for (const auto& o : outcomes) {
            if (o.alive_end) {
                ++alive;
                infected += static_cast<double>(o.infected_at_end) /
                            static_cast<double>(o.n_at_end);
            }
        }
        const double emp = alive > 0 ? infected / static_cast<double>(alive) : 0.0;
        t.add_row({lambda, rho(spec.law, lambda), emp, alive, spec.reps});
    }
    return t;
}

ExponentFit exponent_fit(double alpha, const WeightLaw& law,
                         const std::vector<double>& deltas) {
    if (!(alpha > 2.0)) throw UnsupportedAlpha("tail index must exceed 2");
    if (deltas.empty()) throw InvariantError("delta grid is empty");
    const double C =
        law.is_discrete() ? 1.0 : law.tail_constant();
    const double lc = lambda_c(law);
    const double ew3 = law.moment(3);

    ExponentFit fit;
    fit.report.alpha = alpha;
    fit.report.regime = alpha < 3.0   ? AlphaRegime::Below3
                        : alpha == 3.0 ? AlphaRegime::At3
                        : alpha < 4.0  ? AlphaRegime::ThreeToFour
                        : alpha == 4.0 ? AlphaRegime::At4
                                       : AlphaRegime::Above4;
    std::vector<double> logs_d, logs_s;
    for (const double d : deltas) {
        const double lambda = alpha <= 3.0 ? d : lc + d;
        const double s_num = sigma(law, lambda);
        const double s_asym = sigma_asymptotic(alpha, C, d, lc, ew3);
        fit.report.deltas.push_back(d);
        fit.report.sigma_numeric.push_back(s_num);
        fit.report.sigma_asymptotic.push_back(s_asym);
        fit.report.ratios.push_back(s_num / s_asym);
        if (alpha == 3.0) {
            fit.corrected.push_back(std::log(s_num) * 2.0 * C * d);
        } else if (alpha == 4.0) {
            fit.corrected.push_back(s_num * std::log(1.0 / s_num) * 3.0 * C * lc * lc / d);
        } else {
            fit.corrected.push_back(s_num / s_asym);
        }
        logs_d.push_back(std::log(d));
        logs_s.push_back(std::log(s_num));
    }
    fit.theoretical_exponent = alpha < 3.0   ? 1.0 / (3.0 - alpha)
                               : alpha == 3.0 ? std::numeric_limits<double>::quiet_NaN()
                               : alpha < 4.0  ? 1.0 / (alpha - 3.0)
                                              : 1.0;
    if (alpha != 3.0 && deltas.size() >= 2)
        fit.fitted_exponent = linear_fit(logs_d, logs_s).slope;
    else
        fit.fitted_exponent = std::numeric_limits<double>::quiet_NaN();
    return fit;
}

Table exponent_fit_table(const ExperimentSpec& spec) {
    WeightLaw law = spec.law;
    if (!law.is_discrete() && law.alpha() != spec.alpha && spec.alpha > 0.0)
        law = WeightLaw::pareto(spec.alpha, law.xm());
    if (law.is_discrete() && spec.alpha > 0.0) law = WeightLaw::pareto(spec.alpha, 1.0);
    const ExponentFit fit = exponent_fit(law.alpha(), law, spec.deltas);

    Table t({"alpha", "delta", "sigma_numeric", "sigma_asymptotic", "ratio",
             "corrected"});
    stamp(t, spec);
    for (std::size_t i = 0; i < fit.report.deltas.size(); ++i)
        t.add_row({law.alpha(), fit.report.deltas[i], fit.report.sigma_numeric[i],
                   fit.report.sigma_asymptotic[i], fit.report.ratios[i],
                   fit.corrected[i]});
    t.add_comment("fitted_exponent", format_value(fit.fitted_exponent));
    t.add_comment("theoretical_exponent", format_value(fit.theoretical_exponent));
    return t;
}

Table run_experiment(const ExperimentSpec& spec, unsigned workers) {
    if (spec.experiment == "extinction_scaling") return extinction_scaling(spec, workers);
    if (spec.experiment == "survival_persistence")
        return survival_persistence(spec, workers);
    if (spec.experiment == "profile_accuracy") return profile_accuracy(spec, workers);
    if (spec.experiment == "rho_curve") return rho_curve(spec, workers);
    if (spec.experiment == "exponent_fit") return exponent_fit_table(spec);
    throw InvariantError("unknown experiment: " + spec.experiment);
}

}  // namespace wcp
