#include "wcp/weight_law.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>

#include "wcp/errors.hpp"
#include "wcp/rng.hpp"

namespace wcp {

namespace {
constexpr double kProbSumTol = 1e-12;
}

WeightLaw WeightLaw::discrete(std::vector<double> values, std::vector<double> probs) {
    if (values.empty() || values.size() != probs.size())
        throw InvariantError("discrete law needs matching, nonempty W and p lists");
    double psum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] >= 0.0) || !std::isfinite(values[i]))
            throw InvariantError("discrete law weights must be finite and >= 0");
        if (i > 0 && !(values[i] > values[i - 1]))
            throw InvariantError("discrete law weights must be strictly increasing");
        if (!(probs[i] > 0.0))
            throw InvariantError("discrete law probabilities must be > 0");
        psum += probs[i];
    }
    if (std::abs(psum - 1.0) > kProbSumTol)
        throw InvariantError("discrete law probabilities must sum to 1");
    WeightLaw law;
    law.kind_ = LawKind::Discrete;
    law.values_ = std::move(values);
    law.probs_ = std::move(probs);
    return law;
}

WeightLaw WeightLaw::pareto(double alpha, double xm) {
    if (!(alpha > 2.0) || !std::isfinite(alpha))
        throw InvariantError("pareto law requires alpha > 2");
    if (!(xm > 0.0) || !std::isfinite(xm))
        throw InvariantError("pareto law requires xm > 0");
    WeightLaw law;
    law.kind_ = LawKind::Pareto;
    law.alpha_ = alpha;
    law.xm_ = xm;
    return law;
}

const std::vector<double>& WeightLaw::values() const {
    if (kind_ != LawKind::Discrete) throw InvariantError("not a discrete law");
    return values_;
}

const std::vector<double>& WeightLaw::probs() const {
    if (kind_ != LawKind::Discrete) throw InvariantError("not a discrete law");
    return probs_;
}

std::size_t WeightLaw::type_count() const { return values().size(); }

double WeightLaw::alpha() const {
    if (kind_ != LawKind::Pareto) throw InvariantError("not a pareto law");
    return alpha_;
}

double WeightLaw::xm() const {
    if (kind_ != LawKind::Pareto) throw InvariantError("not a pareto law");
    return xm_;
}

double WeightLaw::tail_constant() const { return std::pow(xm(), alpha() - 1.0); }

double WeightLaw::moment(int k) const {
    if (k < 1 || k > 3) throw InvariantError("moment order must be 1, 2 or 3");
    if (kind_ == LawKind::Discrete) {
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
            s += probs_[i] * std::pow(values_[i], k);
        return s;
    }
    const double a = alpha_ - 1.0;  // tail exponent
    if (a <= static_cast<double>(k)) return std::numeric_limits<double>::infinity();
    return a * std::pow(xm_, k) / (a - k);
}

double WeightLaw::tail(double x) const {
    if (!(x >= 0.0)) throw InvariantError("tail argument must be >= 0");
    if (kind_ == LawKind::Discrete) {
        double s = 0.0;
        for (std::size_t i = 0; i < values_.size(); ++i)
            if (values_[i] > x) s += probs_[i];
        return s;
    }
    if (x < xm_) return 1.0;
    return std::pow(x / xm_, -(alpha_ - 1.0));
}

double kappa(double x, int m) {
    const double md = static_cast<double>(m);
    return std::min(std::floor(x * md) / md, md);
}

WeightLaw WeightLaw::truncate(int m) const {
    if (m < 1) throw InvariantError("truncation level must be >= 1");
    const double md = static_cast<double>(m);
    // atom index j represents the value j/m, j in [0, m*m]
    std::map<std::int64_t, double> atoms;
    if (kind_ == LawKind::Discrete) {
        for (std::size_t i = 0; i < values_.size(); ++i) {
            const auto j = static_cast<std::int64_t>(
                std::llround(kappa(values_[i], m) * md));
            atoms[j] += probs_[i];
        }
    } else {
        const auto jmax = static_cast<std::int64_t>(m) * m;
        auto j0 = static_cast<std::int64_t>(std::floor(xm_ * md));
        j0 = std::min(j0, jmax);
        // P(w >= x); no atoms, so this equals tail()
        auto tail_ge = [&](double x) { return x <= xm_ ? 1.0 : tail(x); };
        for (std::int64_t j = j0; j < jmax; ++j) {
            const double p = tail_ge(j / md) - tail_ge((j + 1) / md);
            if (p > 0.0) atoms[j] += p;
        }
        const double ptop = tail_ge(md);
        if (ptop > 0.0) atoms[jmax] += ptop;
    }
    std::vector<double> vals, probs;
    vals.reserve(atoms.size());
    probs.reserve(atoms.size());
    double psum = 0.0;
    for (const auto& [j, p] : atoms) {
        vals.push_back(j / md);
        probs.push_back(p);
        psum += p;
    }
    // remove accumulated roundoff so the result passes its own invariants
    for (auto& p : probs) p /= psum;
    return WeightLaw::discrete(std::move(vals), std::move(probs));
}

std::string WeightLaw::to_string() const {
    char buf[32];
    std::string out;
    if (kind_ == LawKind::Discrete) {
        out = "discrete:W=";
        for (std::size_t i = 0; i < values_.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", values_[i]);
            out += (i ? "," : "");
            out += buf;
        }
        out += ";p=";
        for (std::size_t i = 0; i < probs_.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", probs_[i]);
            out += (i ? "," : "");
            out += buf;
        }
    } else {
        std::snprintf(buf, sizeof buf, "%.17g", alpha_);
        out = "pareto:alpha=";
        out += buf;
        out += ",xm=";
        std::snprintf(buf, sizeof buf, "%.17g", xm_);
        out += buf;
    }
    return out;
}

namespace {

double parse_number(std::string_view text, std::size_t base, std::size_t& pos) {
    const char* begin = text.data() + pos;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("expected a number", base + pos);
    pos += static_cast<std::size_t>(end - begin);
    return v;
}

// comma-separated number list used by the law literal grammar
std::vector<double> parse_numbers(std::string_view text, std::size_t base, std::size_t& pos) {
    std::vector<double> out;
    out.push_back(parse_number(text, base, pos));
    while (pos < text.size() && text[pos] == ',') {
        ++pos;
        out.push_back(parse_number(text, base, pos));
    }
    return out;
}

void expect(std::string_view text, std::size_t base, std::size_t& pos, std::string_view token) {
    if (text.substr(pos, token.size()) != token)
        throw ParseError("expected '" + std::string(token) + "'", base + pos);
    pos += token.size();
}

}  // namespace

WeightLaw parse_weight_law(std::string_view text) {
    std::size_t pos = 0;
    if (text.rfind("discrete:", 0) == 0) {
        pos = 9;
        expect(text, 0, pos, "W=");
        std::vector<double> values = parse_numbers(text, 0, pos);
        expect(text, 0, pos, ";p=");
        std::vector<double> probs = parse_numbers(text, 0, pos);
        if (pos != text.size()) throw ParseError("trailing characters in law literal", pos);
        return WeightLaw::discrete(std::move(values), std::move(probs));
    }
    if (text.rfind("pareto:", 0) == 0) {
        pos = 7;
        expect(text, 0, pos, "alpha=");
        const double alpha = parse_number(text, 0, pos);
        expect(text, 0, pos, ",xm=");
        const double xm = parse_number(text, 0, pos);
        if (pos != text.size()) throw ParseError("trailing characters in law literal", pos);
        return WeightLaw::pareto(alpha, xm);
    }
    throw ParseError("law literal must start with 'discrete:' or 'pareto:'", 0);
}

namespace {

void finalize_aggregates(WeightSample& s) {
    s.sum_w = s.sum_w2 = s.sum_w3 = 0.0;
    for (const double x : s.w) {
        s.sum_w += x;
        s.sum_w2 += x * x;
        s.sum_w3 += x * x * x;
    }
}

}  // namespace

WeightSample sample_weights(const WeightLaw& law, std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw InvariantError("sample size must be >= 1");
    WeightSample s;
    s.n = n;
    s.w.resize(static_cast<std::size_t>(n));
    Xoshiro256 rng(seed);
    if (law.is_discrete()) {
        const auto& vals = law.values();
        const auto& probs = law.probs();
        std::vector<double> cum(probs.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            cum[i] = acc;
        }
        cum.back() = 1.0;
        s.type_of.resize(static_cast<std::size_t>(n));
        s.type_values = vals;
        s.type_counts.assign(vals.size(), 0);
        for (std::int64_t v = 0; v < n; ++v) {
            const double u = rng.next_double();
            const auto it = std::upper_bound(cum.begin(), cum.end(), u);
            const auto t = static_cast<std::size_t>(it - cum.begin());
            const auto ti = std::min(t, vals.size() - 1);
            s.type_of[static_cast<std::size_t>(v)] = static_cast<std::int32_t>(ti);
            s.type_counts[ti] += 1;
            s.w[static_cast<std::size_t>(v)] = vals[ti];
        }
    } else {
        const double inv_exp = -1.0 / (law.alpha() - 1.0);
        for (auto& x : s.w) x = law.xm() * std::pow(rng.next_double_pos(), inv_exp);
    }
    finalize_aggregates(s);
    return s;
}

WeightSample weight_sample_from_values(std::vector<double> w) {
    if (w.empty()) throw InvariantError("weight vector must be nonempty");
    for (const double x : w)
        if (!(x >= 0.0) || !std::isfinite(x))
            throw InvariantError("weights must be finite and >= 0");
    WeightSample s;
    s.n = static_cast<std::int64_t>(w.size());
    s.w = std::move(w);
    std::vector<double> distinct(s.w);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    s.type_values = distinct;
    s.type_counts.assign(distinct.size(), 0);
    s.type_of.resize(s.w.size());
    for (std::size_t v = 0; v < s.w.size(); ++v) {
        const auto it = std::lower_bound(distinct.begin(), distinct.end(), s.w[v]);
        const auto t = static_cast<std::size_t>(it - distinct.begin());
        s.type_of[v] = static_cast<std::int32_t>(t);
        s.type_counts[t] += 1;
    }
    finalize_aggregates(s);
    return s;
}

}  // namespace wcp
