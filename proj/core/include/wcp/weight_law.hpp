#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace wcp {

enum class LawKind { Discrete, Pareto };

// Vertex-weight distribution. Two families:
//   Discrete — atoms W_1 < ... < W_m with probabilities p_i;
//   Pareto   — scale xm > 0 and index alpha > 2, with P(w > x) = (x/xm)^{-(alpha-1)}
//              for x >= xm. alpha > 2 keeps the mean finite.
// Immutable after construction; safe to share across threads.
class WeightLaw {
  public:
    static WeightLaw discrete(std::vector<double> values, std::vector<double> probs);
    static WeightLaw pareto(double alpha, double xm);

    LawKind kind() const { return kind_; }
    bool is_discrete() const { return kind_ == LawKind::Discrete; }

    // Discrete accessors
    const std::vector<double>& values() const;
    const std::vector<double>& probs() const;
    std::size_t type_count() const;

    // Pareto accessors
    double alpha() const;
    double xm() const;
    // C in P(w > x) = C x^{-(alpha-1)}
    double tail_constant() const;

    // E[w^k] for k in {1,2,3}; +infinity when the moment diverges
    double moment(int k) const;

    // P(w > x); right-continuous convention, so tail(xm) == 1 for Pareto
    double tail(double x) const;

    // Law of kappa_m(w) = min(floor(w*m)/m, m). Always Discrete with support
    // in {0, 1/m, ..., m}; a zero atom is kept when present.
    WeightLaw truncate(int m) const;

    // Law literal, e.g. "discrete:W=1,2;p=0.5,0.5" or "pareto:alpha=3.5,xm=1"
    std::string to_string() const;

  private:
    WeightLaw() = default;
    LawKind kind_ = LawKind::Discrete;
    std::vector<double> values_;
    std::vector<double> probs_;
    double alpha_ = 0.0;
    double xm_ = 0.0;
};

// Parses the law literal grammar. Throws ParseError with the offending
// position, or InvariantError when the parsed parameters are invalid.
WeightLaw parse_weight_law(std::string_view text);

// A realized weight vector with cached aggregates. For samples drawn from a
// Discrete law, type_of[v] indexes into type_values and type_counts.
struct WeightSample {
    std::int64_t n = 0;
    std::vector<double> w;
    double sum_w = 0.0;
    double sum_w2 = 0.0;
    double sum_w3 = 0.0;
    // empty for non-discrete samples
    std::vector<std::int32_t> type_of;
    std::vector<double> type_values;
    std::vector<std::int64_t> type_counts;

    bool has_types() const { return !type_values.empty(); }
};

// i.i.d. draw of n weights; deterministic in (law, n, seed).
WeightSample sample_weights(const WeightLaw& law, std::int64_t n, std::uint64_t seed);

// Wraps an explicit user-supplied weight vector (types inferred from the
// distinct values present).
WeightSample weight_sample_from_values(std::vector<double> w);

// min(floor(x*m)/m, m)
double kappa(double x, int m);

}  // namespace wcp
