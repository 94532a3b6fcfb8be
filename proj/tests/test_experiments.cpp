#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wcp/errors.hpp"
#include "wcp/experiments.hpp"
#include "wcp/records.hpp"
#include "wcp/stats.hpp"

using namespace wcp;

namespace {

ExperimentSpec base_spec(const std::string& experiment) {
    ExperimentSpec spec;
    spec.name = "test";
    spec.experiment = experiment;
    spec.law = WeightLaw::discrete({1.0, 2.0}, {0.5, 0.5});
    spec.seed = 4711;
    return spec;
}

double comment_value(const Table& t, const std::string& key) {
    for (const auto& c : t.comments()) {
        if (c.rfind(key + "=", 0) == 0) return std::stod(c.substr(key.size() + 1));
    }
    FAIL("missing comment key: ", key);
    return 0.0;
}

std::string render(const Table& t) {
    std::stringstream ss;
    write_table(t, OutputFormat::Csv, ss);
    return ss.str();
}

}  // namespace

TEST_CASE("spec json round trip and hashing") {
    const std::string text = R"({
        "name": "demo",
        "experiment": "rho_curve",
        "law": "discrete:W=1,2;p=0.5,0.5",
        "lambda_grid": [1.0, 2.0],
        "n": 100,
        "reps": 5,
        "t_max": 3.0,
        "kernel": "typed",
        "seed": 7
    })";
    const ExperimentSpec spec = load_spec_json(text);
    CHECK(spec.name == "demo");
    CHECK(spec.lambdas == std::vector<double>{1.0, 2.0});
    CHECK(spec.ns == std::vector<std::int64_t>{100});
    CHECK(spec.kernel == "typed");
    const std::uint64_t h1 = spec_hash(spec);
    ExperimentSpec other = spec;
    CHECK(spec_hash(other) == h1);
    other.seed = 8;
    CHECK(spec_hash(other) != h1);

    CHECK_THROWS_AS(load_spec_json("{"), ParseError);
    CHECK_THROWS_AS(load_spec_json("{\"experiment\": \"rho_curve\", \"reps\": 0}"),
                    InvariantError);
}

TEST_CASE("regime guards refuse mislabeled runs") {
    auto sub = base_spec("extinction_scaling");
    sub.lambdas = {1.0};  // above the 0.4 threshold
    sub.ns = {100};
    sub.reps = 2;
    CHECK_THROWS_AS(extinction_scaling(sub, 1), GuardTripped);

    auto sup = base_spec("survival_persistence");
    sup.lambdas = {0.2};
    sup.ns = {100};
    sup.reps = 2;
    CHECK_THROWS_AS(survival_persistence(sup, 1), GuardTripped);

    auto rc = base_spec("rho_curve");
    rc.lambdas = {1.0, 0.3};
    rc.ns = {100};
    rc.reps = 2;
    CHECK_THROWS_AS(rho_curve(rc, 1), GuardTripped);
}

TEST_CASE("extinction scaling slope in the deep subcritical regime") {
    // at lambda far below the threshold the mean extinction time stays close
    // to the pure-death harmonic number, affine in log n
    auto spec = base_spec("extinction_scaling");
    spec.lambdas = {0.05};
    spec.kernel = "typed";
    spec.ns = {300, 3000, 30000};
    spec.reps = 60;
    spec.t_max = 200.0;
    const Table t = extinction_scaling(spec, 1);
    REQUIRE(t.size() == 3);
    // all replicas extinct
    for (const auto& row : t.rows())
        CHECK(std::get<std::int64_t>(row[2]) == spec.reps);
    CHECK(comment_value(t, "r2") > 0.9);
    CHECK(comment_value(t, "slope_vs_log_n") > 0.5);
}

TEST_CASE("survival persistence in the supercritical phase") {
    auto spec = base_spec("survival_persistence");
    spec.lambdas = {0.8};
    spec.kernel = "typed";
    spec.ns = {500};
    spec.reps = 30;
    spec.t_max = 100.0;
    const Table t = survival_persistence(spec, 1);
    REQUIRE(t.size() == 1);
    CHECK(std::get<double>(t.rows()[0][3]) == 1.0);
}

TEST_CASE("rho curve matches the stationary density") {
    auto spec = base_spec("rho_curve");
    spec.law = WeightLaw::discrete({1.0}, {1.0});
    spec.lambdas = {2.0};
    spec.kernel = "typed";
    spec.ns = {2000};
    spec.reps = 40;
    spec.t_max = 30.0;
    const Table t = rho_curve(spec, 1);
    REQUIRE(t.size() == 1);
    CHECK(std::get<double>(t.rows()[0][1]) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(std::get<double>(t.rows()[0][2]) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("profile accuracy against the stationary profile") {
    auto spec = base_spec("profile_accuracy");
    spec.lambdas = {1.0};
    spec.kernel = "typed";
    spec.ns = {2000};
    spec.reps = 60;
    spec.ts = {25.0, 50.0};
    const Table t = profile_accuracy(spec, 1);
    REQUIRE(t.size() == 4);  // two times, two types
    CHECK(comment_value(t, "max_abs_error") < 0.05);
}

TEST_CASE("exponent fit recovers the linear regime") {
    const auto law = WeightLaw::pareto(5.0, 1.0);
    const ExponentFit fit = exponent_fit(5.0, law, {1e-4, 3e-4, 1e-3});
    CHECK(fit.theoretical_exponent == 1.0);
    CHECK(fit.fitted_exponent == doctest::Approx(1.0).epsilon(0.02));
    for (const double r : fit.corrected) CHECK(r == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("experiment output is byte-identical across worker counts") {
    auto spec = base_spec("rho_curve");
    spec.lambdas = {1.0, 2.0};
    spec.kernel = "typed";
    spec.ns = {300};
    spec.reps = 20;
    spec.t_max = 10.0;
    const std::string a = render(rho_curve(spec, 1));
    const std::string b = render(rho_curve(spec, 4));
    const std::string c = render(rho_curve(spec, 3));
    CHECK(a == b);
    CHECK(a == c);
}

TEST_CASE("run_experiment dispatch and stamps") {
    auto spec = base_spec("rho_curve");
    spec.lambdas = {1.0};
    spec.kernel = "typed";
    spec.ns = {100};
    spec.reps = 5;
    spec.t_max = 5.0;
    const Table t = run_experiment(spec, 1);
    bool has_seed = false, has_hash = false;
    for (const auto& c : t.comments()) {
        has_seed |= c.rfind("seed=", 0) == 0;
        has_hash |= c.rfind("spec-hash=", 0) == 0;
    }
    CHECK(has_seed);
    CHECK(has_hash);
    auto bogus = spec;
    bogus.experiment = "nonsense";
    CHECK_THROWS_AS(run_experiment(bogus, 1), InvariantError);
}

TEST_CASE("statistics helpers") {
    const std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
    const SummaryStats s = summarize(xs);
    CHECK(s.mean == 2.5);
    CHECK(s.max == 4.0);
    CHECK(s.sd == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-12));

    const std::vector<double> x = {0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y = {1.0, 3.0, 5.0, 7.0};
    const LinearFit f = linear_fit(x, y);
    CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

    // chi-square sanity: uniform counts against the uniform law
    const std::vector<std::int64_t> counts = {250, 249, 251, 250};
    const std::vector<double> probs = {0.25, 0.25, 0.25, 0.25};
    CHECK(chi_square_gof(counts, probs).p_value > 0.9);

    // identical samples give a KS p-value of 1
    std::vector<double> a, b;
    for (int i = 0; i < 500; ++i) {
        a.push_back(i);
        b.push_back(i);
    }
    CHECK(ks_two_sample(a, b).statistic == 0.0);
    CHECK(ks_two_sample(a, b).p_value == 1.0);
}
