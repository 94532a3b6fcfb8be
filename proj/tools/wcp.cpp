// Command-line front end for the weighted contact process toolkit.
//
// Exit codes: 0 success, 2 configuration error, 3 guard-rail trip
// (an experiment labeled with the wrong criticality regime), 4 numerical
// failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "wcp/branching.hpp"
#include "wcp/errors.hpp"
#include "wcp/experiments.hpp"
#include "wcp/kernel_full.hpp"
#include "wcp/kernel_typed.hpp"
#include "wcp/meanfield.hpp"
#include "wcp/oracle.hpp"
#include "wcp/pool.hpp"
#include "wcp/records.hpp"
#include "wcp/rng.hpp"
#include "wcp/stats.hpp"
#include "wcp/weight_law.hpp"

namespace {

using nlohmann::json;

struct GlobalOptions {
    std::uint64_t seed = 0;
    unsigned workers = 0;  // 0 = hardware default
    std::string format = "csv";
    std::string output;  // empty = stdout
    std::string log_level = "quiet";
};

void log_info(const GlobalOptions& g, const std::string& line) {
    if (g.log_level != "quiet") std::fprintf(stderr, "%s\n", line.c_str());
}

unsigned effective_workers(const GlobalOptions& g) {
    return g.workers == 0 ? wcp::default_workers() : g.workers;
}

wcp::OutputFormat parse_format(const std::string& f) {
    if (f == "csv") return wcp::OutputFormat::Csv;
    if (f == "json") return wcp::OutputFormat::JsonLines;
    throw wcp::InvariantError("format must be csv or json");
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw wcp::IoError("cannot open output file: " + path);
    out << text;
}

wcp::InitSpec parse_init(const std::string& text) {
    if (text == "all") return wcp::InitSpec::all();
    if (text.rfind("single:", 0) == 0)
        return wcp::InitSpec::single(std::stoll(text.substr(7)));
    if (text.rfind("set:", 0) == 0) {
        std::vector<std::int64_t> vs;
        std::stringstream ss(text.substr(4));
        std::string item;
        while (std::getline(ss, item, ',')) vs.push_back(std::stoll(item));
        return wcp::InitSpec::set(std::move(vs));
    }
    throw wcp::InvariantError("init must be all, single:<i> or set:<i,j,...>");
}

std::string json_double(double x) {
    if (std::isnan(x)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const GlobalOptions& g, const std::string& kernel,
                 const std::string& law_text, std::int64_t n, double lambda,
                 const std::string& init_text, double t_max,
                 std::vector<double> snapshots, std::int64_t reps,
                 std::uint64_t max_events, bool exact_counts, bool bitmaps) {
    const wcp::WeightLaw law = wcp::parse_weight_law(law_text);
    std::sort(snapshots.begin(), snapshots.end());

    std::vector<std::string> cols{"rep", "extinction_time", "events", "final_alive",
                                  "budget_exceeded"};
    const std::size_t ntypes = law.is_discrete() ? law.type_count() : 0;
    for (const double t : snapshots) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "count@%g", t);
        cols.push_back(buf);
        for (std::size_t ty = 0; ty < ntypes; ++ty) {
            std::snprintf(buf, sizeof buf, "type%zu@%g", ty, t);
            cols.push_back(buf);
        }
        if (bitmaps) {
            std::snprintf(buf, sizeof buf, "bitmap@%g", t);
            cols.push_back(buf);
        }
    }
    wcp::Table table(cols);
    table.add_comment("seed", std::to_string(g.seed));
    table.add_comment("law", law.to_string());
    table.add_comment("kernel", kernel);

    std::vector<wcp::RunSummary> runs(static_cast<std::size_t>(reps));
    std::optional<wcp::WeightSample> shared_sample;
    if (kernel == "full") shared_sample = wcp::sample_weights(law, n, g.seed);
    wcp::parallel_for(reps, effective_workers(g), [&](std::int64_t r) {
        const std::uint64_t seed = wcp::derive_seed(g.seed, static_cast<std::uint64_t>(r));
        if (kernel == "typed") {
            wcp::TypedConfig cfg;
            cfg.law = law;
            cfg.lambda = lambda;
            cfg.n = n;
            cfg.init_fraction = init_text == "all" ? -1.0
                                : init_text.rfind("frac:", 0) == 0
                                    ? std::stod(init_text.substr(5))
                                    : throw wcp::InvariantError(
                                          "typed init must be all or frac:<f>");
            cfg.t_max = t_max;
            cfg.snapshot_times = snapshots;
            cfg.max_events = max_events;
            cfg.seed = seed;
            cfg.exact_counts = exact_counts;
            runs[static_cast<std::size_t>(r)] = wcp::run_typed(cfg);
        } else {
            wcp::SimConfig cfg;
            cfg.lambda = lambda;
            cfg.sample = &*shared_sample;
            cfg.init = parse_init(init_text);
            cfg.t_max = t_max;
            cfg.snapshot_times = snapshots;
            cfg.max_events = max_events;
            cfg.seed = seed;
            cfg.record_bitmaps = bitmaps;
            runs[static_cast<std::size_t>(r)] = wcp::run_full(cfg);
        }
    });

    for (std::int64_t r = 0; r < reps; ++r) {
        const wcp::RunSummary& run = runs[static_cast<std::size_t>(r)];
        std::vector<wcp::Value> row;
        row.emplace_back(r);
        row.emplace_back(run.extinction_time ? *run.extinction_time
                                             : std::nan(""));
        row.emplace_back(static_cast<std::int64_t>(run.events));
        row.emplace_back(static_cast<std::int64_t>(run.final_alive));
        row.emplace_back(static_cast<std::int64_t>(run.budget_exceeded));
        for (std::size_t k = 0; k < snapshots.size(); ++k) {
            const bool have = k < run.snapshots.size();
            row.emplace_back(have ? run.snapshots[k].count_infected : std::int64_t{-1});
            for (std::size_t ty = 0; ty < ntypes; ++ty)
                row.emplace_back(have && ty < run.snapshots[k].per_type.size()
                                     ? run.snapshots[k].per_type[ty]
                                     : std::int64_t{-1});
            if (bitmaps) {
                std::string hex;
                if (have)
                    for (const auto word : run.snapshots[k].bitmap) {
                        char buf[20];
                        std::snprintf(buf, sizeof buf, "%016llx",
                                      static_cast<unsigned long long>(word));
                        hex += buf;
                    }
                row.emplace_back(hex);
            }
        }
        table.add_row(std::move(row));
    }
    wcp::emit(table, parse_format(g.format), g.output);
    return 0;
}

// ---------------------------------------------------------------- meanfield

int cmd_meanfield(const GlobalOptions& g, const std::string& law_text,
                  const std::vector<double>& lambdas) {
    const wcp::WeightLaw law = wcp::parse_weight_law(law_text);
    std::string out;
    for (const double l : lambdas) {
        const wcp::MeanFieldSolution sol = wcp::solve_meanfield(law, l);
        out += "{\"lambda\":" + json_double(sol.lambda);
        out += ",\"lambda_c\":" + json_double(sol.lambda_c);
        out += ",\"sigma\":" + (sol.has_sigma ? json_double(sol.sigma) : "null");
        out += ",\"rho\":" + (sol.has_sigma ? json_double(sol.rho) : "null");
        out += ",\"residual\":" + json_double(sol.residual);
        out += ",\"solver_iters\":" + std::to_string(sol.solver_iters);
        out += "}\n";
    }
    write_text(g.output, out);
    return 0;
}

// ---------------------------------------------------------------- critical

int cmd_critical(const GlobalOptions& g, const std::vector<std::string>& law_texts) {
    wcp::Table table({"law", "moment2", "lambda_c"});
    for (const auto& text : law_texts) {
        const wcp::WeightLaw law = wcp::parse_weight_law(text);
        table.add_row({law.to_string(), law.moment(2), wcp::lambda_c(law)});
    }
    wcp::emit(table, parse_format(g.format), g.output);
    return 0;
}

// ---------------------------------------------------------------- exponents

int cmd_exponents(const GlobalOptions& g, double alpha, double xm,
                  const std::vector<double>& deltas) {
    wcp::ExperimentSpec spec;
    spec.name = "exponents";
    spec.experiment = "exponent_fit";
    spec.law = wcp::WeightLaw::pareto(alpha, xm);
    spec.alpha = alpha;
    spec.deltas = deltas;
    spec.seed = g.seed;
    const wcp::Table table = wcp::exponent_fit_table(spec);
    wcp::emit(table, wcp::OutputFormat::Csv, g.output);
    return 0;
}

// ---------------------------------------------------------------- branching

int cmd_branching(const GlobalOptions& g, const std::string& law_text, std::int64_t n,
                  double lambda, bool full_vector) {
    const wcp::WeightLaw law = wcp::parse_weight_law(law_text);
    const wcp::WeightSample sample = wcp::sample_weights(law, n, g.seed);
    const wcp::SpectralReport rep = wcp::spectral_report(sample, lambda);
    json j;
    j["n"] = rep.n;
    j["lambda"] = rep.lambda;
    j["top_eig_A"] = rep.top_eig_A;
    j["bulk_eig_A"] = rep.bulk_eig_A;
    j["supercritical"] = rep.supercritical;
    if (rep.supercritical) {
        j["top_eig_bound_conditioned"] = rep.top_eig_bound_conditioned;
        j["top_eig_conditioned_numeric"] = rep.top_eig_conditioned_numeric;
        double lo = 1.0, hi = 0.0, identity = 0.0;
        for (std::size_t i = 0; i < rep.extinction.size(); ++i) {
            lo = std::min(lo, rep.extinction[i]);
            hi = std::max(hi, rep.extinction[i]);
            identity += sample.w[i] * sample.w[i] * rep.extinction[i];
        }
        j["extinction_min"] = lo;
        j["extinction_max"] = hi;
        j["identity_residual"] =
            std::abs(lambda / static_cast<double>(sample.n) * identity - 1.0);
        if (full_vector) j["extinction"] = rep.extinction;
    }
    write_text(g.output, j.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- oracle

int cmd_oracle(const GlobalOptions& g, const std::string& law_text,
               const std::string& weights_text, std::int64_t n, double lambda, double t,
               const std::string& init_text) {
    wcp::WeightSample sample = [&] {
        if (!weights_text.empty()) {
            std::vector<double> w;
            std::stringstream ss(weights_text);
            std::string item;
            while (std::getline(ss, item, ',')) w.push_back(std::stod(item));
            return wcp::weight_sample_from_values(std::move(w));
        }
        return wcp::sample_weights(wcp::parse_weight_law(law_text), n, g.seed);
    }();
    const wcp::OracleResult res =
        wcp::exact_marginals(sample, lambda, t, parse_init(init_text));
    json j;
    j["n"] = res.n;
    j["lambda"] = res.lambda;
    j["t"] = res.t;
    j["init"] = res.init;
    j["marginals"] = res.marginals;
    j["survival"] = res.survival;
    j["method"] = "uniformization";
    j["truncation_error_bound"] = res.truncation_error_bound;
    write_text(g.output, j.dump(2) + "\n");
    return 0;
}

// ---------------------------------------------------------------- validate

int cmd_validate(const GlobalOptions& g, const std::string& suite, int trials) {
    bool ok = true;
    if (suite == "appendix") {
        const wcp::DiagEigOutcome out = wcp::diag_eig_property(8, trials, g.seed);
        ok = out.passed == out.trials;
        std::printf("%s diagonal-scaling eigenvalue bound: %d/%d trials, worst excess %.3g\n",
                    ok ? "PASS" : "FAIL", out.passed, out.trials, out.worst_excess);
    } else if (suite == "duality") {
        const std::vector<std::vector<double>> vectors = {
            {1.0},
            {1.0, 1.0, 1.0},
            {1.0, 2.0, 0.5, 1.5},
            {1.0, 1.0, 2.0, 2.0, 3.0, 3.0},
            {0.0, 0.5, 1.0, 1.0, 2.0, 2.5, 3.0, 4.0},
        };
        for (const auto& w : vectors) {
            const auto sample = wcp::weight_sample_from_values(w);
            const double gap = wcp::duality_gap(sample, 1.3, 2.0);
            const bool pass = gap <= 1e-9;
            ok = ok && pass;
            std::printf("%s duality gap %.3e at n=%zu\n", pass ? "PASS" : "FAIL", gap,
                        w.size());
        }
    } else if (suite == "monotone") {
        wcp::Xoshiro256 rng(g.seed);
        for (int k = 0; k < 10; ++k) {
            const int n = 3 + static_cast<int>(rng.bounded(4));  // 3..6
            std::vector<double> lo(static_cast<std::size_t>(n)), hi(lo);
            for (int i = 0; i < n; ++i) {
                lo[static_cast<std::size_t>(i)] = 0.25 + 2.0 * rng.next_double();
                hi[static_cast<std::size_t>(i)] =
                    lo[static_cast<std::size_t>(i)] + 2.0 * rng.next_double();
            }
            const double gap = wcp::monotonicity_gap(wcp::weight_sample_from_values(lo),
                                                     wcp::weight_sample_from_values(hi),
                                                     1.0 + rng.next_double(), 1.5);
            const bool pass = gap >= -1e-9;
            ok = ok && pass;
            std::printf("%s monotonicity gap %.3e at n=%d\n", pass ? "PASS" : "FAIL", gap,
                        n);
        }
    } else {
        throw wcp::InvariantError("suite must be appendix, duality or monotone");
    }
    return ok ? 0 : 1;
}

// ---------------------------------------------------------------- exp / sample

int cmd_exp_run(const GlobalOptions& g, const std::string& spec_path,
                const std::string& output_override) {
    wcp::ExperimentSpec spec = wcp::load_spec_file(spec_path);
    log_info(g, "running experiment '" + spec.name + "' (" + spec.experiment + ", " +
                    std::to_string(spec.reps) + " reps, " +
                    std::to_string(effective_workers(g)) + " workers)");
    const wcp::Table table = wcp::run_experiment(spec, effective_workers(g));
    std::string out = !output_override.empty() ? output_override
                      : !g.output.empty()      ? g.output
                                               : spec.output;
    wcp::emit(table, parse_format(g.format), out);
    log_info(g, "wrote " + std::to_string(table.size()) + " rows to " +
                    (out.empty() ? std::string("stdout") : out));
    return 0;
}

int cmd_sample_weights(const GlobalOptions& g, const std::string& law_text,
                       std::int64_t n) {
    const wcp::WeightLaw law = wcp::parse_weight_law(law_text);
    const wcp::WeightSample sample = wcp::sample_weights(law, n, g.seed);
    wcp::Table table({"vertex", "weight"});
    table.add_comment("seed", std::to_string(g.seed));
    table.add_comment("law", law.to_string());
    table.add_comment("sum_w", wcp::format_value(sample.sum_w));
    table.add_comment("sum_w2", wcp::format_value(sample.sum_w2));
    table.add_comment("sum_w3", wcp::format_value(sample.sum_w3));
    for (std::int64_t v = 0; v < sample.n; ++v)
        table.add_row({v, sample.w[static_cast<std::size_t>(v)]});
    wcp::emit(table, parse_format(g.format), g.output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted contact process toolkit"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--seed", g.seed, "global RNG seed (env WCP_SEED overrides)");
    app.add_option("--workers", g.workers, "worker threads (0 = hardware)");
    app.add_option("--format", g.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--output,-o", g.output, "output path ('-' = stdout)");
    app.add_option("--log-level", g.log_level, "stderr verbosity")
        ->check(CLI::IsMember({"quiet", "info"}));

    // simulate
    auto* sim = app.add_subcommand("simulate", "run the event-driven kernels");
    sim->fallthrough();
    std::string sim_kernel = "full", sim_law, sim_init = "all";
    std::int64_t sim_n = 1000, sim_reps = 1;
    double sim_lambda = 1.0, sim_tmax = 10.0;
    std::vector<double> sim_snaps;
    std::uint64_t sim_max_events = UINT64_MAX;
    bool sim_exact = false, sim_bitmaps = false;
    sim->add_option("--kernel", sim_kernel, "full or typed")
        ->check(CLI::IsMember({"full", "typed"}));
    sim->add_option("--dist", sim_law, "weight law literal")->required();
    sim->add_option("--n", sim_n, "number of vertices");
    sim->add_option("--lambda", sim_lambda, "infection parameter");
    sim->add_option("--init", sim_init, "all | single:<i> | set:<i,j> | frac:<f>");
    sim->add_option("--t-max", sim_tmax, "time horizon");
    sim->add_option("--snapshots", sim_snaps, "snapshot times")->delimiter(',');
    sim->add_option("--reps", sim_reps, "replica count");
    sim->add_option("--max-events", sim_max_events, "event budget per replica");
    sim->add_flag("--exact-counts", sim_exact, "typed: rounded p_i*n type counts");
    sim->add_flag("--bitmaps", sim_bitmaps, "record full per-vertex bitmaps");

    // meanfield
    auto* mf = app.add_subcommand("meanfield", "threshold, sigma and rho");
    mf->fallthrough();
    std::string mf_law;
    std::vector<double> mf_lambdas;
    mf->add_option("--dist", mf_law, "weight law literal")->required();
    mf->add_option("--lambda", mf_lambdas, "lambda values")->required()->delimiter(',');

    // critical
    auto* crit = app.add_subcommand("critical", "threshold table for laws");
    crit->fallthrough();
    std::vector<std::string> crit_laws;
    crit->add_option("--dist", crit_laws, "weight law literal (repeatable)")->required();

    // exponents
    auto* expo = app.add_subcommand("exponents", "near-critical sigma asymptotics");
    expo->fallthrough();
    double expo_alpha = 2.5, expo_xm = 1.0;
    std::vector<double> expo_deltas;
    expo->add_option("--alpha", expo_alpha, "tail index > 2")->required();
    expo->add_option("--xm", expo_xm, "pareto scale");
    expo->add_option("--deltas", expo_deltas, "distance-to-threshold grid")
        ->required()
        ->delimiter(',');

    // branching
    auto* br = app.add_subcommand("branching", "branching-process spectral report");
    br->fallthrough();
    std::string br_law;
    std::int64_t br_n = 100;
    double br_lambda = 2.0;
    bool br_full = false;
    br->add_option("--dist", br_law, "weight law literal")->required();
    br->add_option("--n", br_n, "number of types");
    br->add_option("--lambda", br_lambda, "infection parameter");
    br->add_flag("--full-vector", br_full, "include the whole extinction vector");

    // oracle
    auto* orc = app.add_subcommand("oracle", "exact transient computation (n <= 12)");
    orc->fallthrough();
    std::string orc_law, orc_weights, orc_init = "all";
    std::int64_t orc_n = 8;
    double orc_lambda = 1.0, orc_t = 1.0;
    orc->add_option("--dist", orc_law, "weight law literal");
    orc->add_option("--weights", orc_weights, "explicit weights w1,w2,...");
    orc->add_option("--n", orc_n, "number of vertices");
    orc->add_option("--lambda", orc_lambda, "infection parameter");
    orc->add_option("--t", orc_t, "time");
    orc->add_option("--init", orc_init, "all | single:<i> | set:<i,j,...>");

    // validate
    auto* val = app.add_subcommand("validate", "property suites");
    val->fallthrough();
    std::string val_suite;
    int val_trials = 200;
    val->add_option("--suite", val_suite, "appendix | duality | monotone")->required();
    val->add_option("--trials", val_trials, "trial count (appendix)");

    // exp
    auto* exp_cmd = app.add_subcommand("exp", "scripted experiments");
    exp_cmd->fallthrough();
    auto* exp_run = exp_cmd->add_subcommand("run", "run an experiment spec");
    exp_run->fallthrough();
    std::string exp_spec, exp_out;
    exp_run->add_option("spec", exp_spec, "spec JSON path")->required();
    exp_run->add_option("--output", exp_out, "override the spec's output path");
    exp_cmd->require_subcommand(1);

    // sample-weights
    auto* sw = app.add_subcommand("sample-weights", "draw and emit a weight vector");
    sw->fallthrough();
    std::string sw_law;
    std::int64_t sw_n = 10;
    sw->add_option("--dist", sw_law, "weight law literal")->required();
    sw->add_option("--n", sw_n, "number of vertices");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (const char* env = std::getenv("WCP_SEED")) g.seed = std::strtoull(env, nullptr, 10);

    try {
        if (sim->parsed())
            return cmd_simulate(g, sim_kernel, sim_law, sim_n, sim_lambda, sim_init,
                                sim_tmax, sim_snaps, sim_reps, sim_max_events, sim_exact,
                                sim_bitmaps);
        if (mf->parsed()) return cmd_meanfield(g, mf_law, mf_lambdas);
        if (crit->parsed()) return cmd_critical(g, crit_laws);
        if (expo->parsed()) return cmd_exponents(g, expo_alpha, expo_xm, expo_deltas);
        if (br->parsed()) return cmd_branching(g, br_law, br_n, br_lambda, br_full);
        if (orc->parsed())
            return cmd_oracle(g, orc_law, orc_weights, orc_n, orc_lambda, orc_t, orc_init);
        if (val->parsed()) return cmd_validate(g, val_suite, val_trials);
        if (exp_cmd->parsed()) return cmd_exp_run(g, exp_spec, exp_out);
        if (sw->parsed()) return cmd_sample_weights(g, sw_law, sw_n);
    } catch (const wcp::GuardTripped& e) {
        std::fprintf(stderr, "guard tripped: %s\n", e.what());
        return 3;
    } catch (const wcp::NotSupercritical& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const wcp::NoConvergence& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const wcp::StepTooLarge& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const wcp::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
