#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "wcp/errors.hpp"
#include "wcp/oracle.hpp"
#include "wcp/weight_law.hpp"

using namespace wcp;

TEST_CASE("pure death at n = 1") {
    const auto s = weight_sample_from_values({1.0});
    const OracleResult r = exact_marginals(s, 5.0, 1.0, InitSpec::single(0));
    CHECK(r.survival == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK(r.marginals[0] == doctest::Approx(std::exp(-1.0)).epsilon(1e-10));
    CHECK(r.truncation_error_bound <= 1e-10);
}

TEST_CASE("two-vertex survival closed form") {
    // with w = (1,1), lambda = 2, both infected: the infected-count chain has
    // generator a' = -2a + b, b' = 2a - 2b, eigenvalues -2 +- sqrt(2)
    const auto s = weight_sample_from_values({1.0, 1.0});
    const double t = 1.0;
    const OracleResult r = exact_marginals(s, 2.0, t, InitSpec::all());
    const double sq = std::sqrt(2.0);
    const double expected = 0.5 * ((1.0 + sq) * std::exp((-2.0 + sq) * t) +
                                   (1.0 - sq) * std::exp((-2.0 - sq) * t));
    CHECK(r.survival == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("time zero returns the initial condition") {
    const auto s = weight_sample_from_values({1.0, 2.0, 0.5});
    const OracleResult r = exact_marginals(s, 1.0, 0.0, InitSpec::set({0, 2}));
    CHECK(r.marginals[0] == 1.0);
    CHECK(r.marginals[1] == 0.0);
    CHECK(r.marginals[2] == 1.0);
    CHECK(r.survival == 1.0);
}

TEST_CASE("size cap") {
    std::vector<double> w(13, 1.0);
    CHECK_THROWS_AS(exact_marginals(weight_sample_from_values(w), 1.0, 1.0,
                                    InitSpec::all()),
                    TooLarge);
}

TEST_CASE("lambda zero factorizes into independent deaths") {
    const auto s = weight_sample_from_values({1.0, 2.0, 3.0});
    const double t = 0.7;
    const OracleResult r = exact_marginals(s, 0.0, t, InitSpec::all());
    for (const double m : r.marginals)
        CHECK(m == doctest::Approx(std::exp(-t)).epsilon(1e-10));
    CHECK(r.survival ==
          doctest::Approx(1.0 - std::pow(1.0 - std::exp(-t), 3.0)).epsilon(1e-9));
}

TEST_CASE("self-duality gap vanishes") {
    CHECK(duality_gap(weight_sample_from_values({1.0}), 1.0, 1.0) <= 1e-9);
    const auto hetero = weight_sample_from_values({1.0, 1.0, 2.0, 2.0, 3.0, 3.0});
    CHECK(duality_gap(hetero, 1.3, 2.0) <= 1e-9);
    // no interaction at lambda = 0
    CHECK(duality_gap(weight_sample_from_values({1.0, 2.0, 0.5}), 0.0, 1.5) <= 1e-9);
}

TEST_CASE("monotonicity in the weights") {
    const auto same = weight_sample_from_values({1.0, 2.0, 1.5, 0.5});
    CHECK(monotonicity_gap(same, same, 1.0, 1.0) == doctest::Approx(0.0).epsilon(1e-12));

    const auto low = weight_sample_from_values({1.0, 1.0, 1.0, 1.0});
    const auto high = weight_sample_from_values({2.0, 2.0, 2.0, 2.0});
    const double gap = monotonicity_gap(low, high, 1.0, 1.0);
    CHECK(gap >= -1e-9);
    CHECK(gap > 0.01);  // strictly more infection under larger weights

    // weights irrelevant without infection
    CHECK(std::abs(monotonicity_gap(low, high, 0.0, 1.0)) <= 1e-9);

    CHECK_THROWS_AS(monotonicity_gap(high, low, 1.0, 1.0), DomainMismatch);
    CHECK_THROWS_AS(
        monotonicity_gap(low, weight_sample_from_values({2.0, 2.0}), 1.0, 1.0),
        DomainMismatch);
}

TEST_CASE("probability conservation and absorbing monotonicity") {
    const auto s = weight_sample_from_values({0.5, 1.0, 1.0, 2.0, 3.0});
    const std::size_t states = std::size_t{1} << 5;
    std::vector<double> dist(states, 0.0);
    dist[states - 1] = 1.0;  // all infected
    double prev_dead = 0.0;
    for (int step = 0; step < 6; ++step) {
        double err = 0.0;
        dist = evolve_distribution(s, 1.5, std::move(dist), 0.5, &err);
        double total = 0.0;
        for (const double p : dist) total += p;
        CHECK(std::abs(total - 1.0) < 1e-12);
        CHECK(dist[0] >= prev_dead - 1e-12);  // absorbing mass never shrinks
        prev_dead = dist[0];
        CHECK(err <= 1e-10);
    }
}

TEST_CASE("semigroup property") {
    const auto s = weight_sample_from_values({1.0, 2.0, 0.5, 1.5, 1.0, 2.5});
    const OracleResult direct = exact_marginals(s, 1.2, 3.0, InitSpec::all());

    const std::size_t states = std::size_t{1} << 6;
    std::vector<double> dist(states, 0.0);
    dist[states - 1] = 1.0;
    dist = evolve_distribution(s, 1.2, std::move(dist), 1.5);
    dist = evolve_distribution(s, 1.2, std::move(dist), 1.5);
    for (int i = 0; i < 6; ++i) {
        double marginal = 0.0;
        for (std::size_t st = 0; st < states; ++st)
            if (st & (std::size_t{1} << i)) marginal += dist[st];
        CHECK(marginal ==
              doctest::Approx(direct.marginals[static_cast<std::size_t>(i)]).epsilon(1e-9));
    }
}

TEST_CASE("zero-weight vertices never get reinfected") {
    const auto s = weight_sample_from_values({0.0, 1.0, 2.0});
    const double t = 2.0;
    const OracleResult r = exact_marginals(s, 2.0, t, InitSpec::all());
    // the zero-weight vertex decays as a pure death regardless of the rest
    CHECK(r.marginals[0] == doctest::Approx(std::exp(-t)).epsilon(1e-10));
    CHECK(r.marginals[1] > r.marginals[0]);
}
