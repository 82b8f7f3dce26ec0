#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recur/quantization.hpp"
#include "recur/recurrence.hpp"

namespace recur {

// A finite union of right-semi-closed intervals (lo, hi] plus isolated
// points; the only set shapes estimate queries need. Intervals are kept
// sorted and disjoint.
class query_set {
  public:
    struct interval {
        double lo;  // -inf allowed
        double hi;  // +inf allowed; membership is lo < x <= hi
    };

    static query_set empty() { return query_set(); }

    static query_set everything() {
        return from_intervals({{-std::numeric_limits<double>::infinity(),
                                std::numeric_limits<double>::infinity()}});
    }

    static query_set from_intervals(std::vector<interval> ivs) {
        query_set q;
        q.intervals_ = std::move(ivs);
        q.normalize();
        return q;
    }

    static query_set from_points(std::vector<double> pts) {
        query_set q;
        q.points_ = std::move(pts);
        q.normalize();
        return q;
    }

    // Grammar: components separated by ';'. A component is either a point
    // set "{v1,v2,...}" or an interval "(a,b]" with "-inf"/"inf" accepted at
    // the open ends; the leading "(" may be omitted.
    static query_set parse(const std::string& text) {
        query_set q;
        std::size_t pos = 0;
        const auto skip_ws = [&] {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
        };
        skip_ws();
        if (pos == text.size()) throw std::invalid_argument("query: empty");
        while (pos < text.size()) {
            skip_ws();
            if (pos < text.size() && text[pos] == '{') {
                const auto close = text.find('}', pos);
                if (close == std::string::npos) throw std::invalid_argument("query: missing '}'");
                for (const auto& tok : split(text.substr(pos + 1, close - pos - 1), ','))
                    q.points_.push_back(parse_number(tok));
                pos = close + 1;
            } else {
                auto end = text.find(';', pos);
                if (end == std::string::npos) end = text.size();
                q.intervals_.push_back(parse_interval(text.substr(pos, end - pos)));
                pos = end;
            }
            skip_ws();
            if (pos < text.size()) {
                if (text[pos] != ';') throw std::invalid_argument("query: expected ';'");
                ++pos;
            }
        }
        q.normalize();
        return q;
    }

    bool contains(double x) const {
        for (double p : points_)
            if (x == p) return true;
        for (const auto& iv : intervals_)
            if (iv.lo < x && x <= iv.hi) return true;
        return false;
    }

    const std::vector<interval>& intervals() const { return intervals_; }
    const std::vector<double>& points() const { return points_; }

  private:
    static std::vector<std::string> split(const std::string& s, char sep) {
        std::vector<std::string> out;
        std::size_t start = 0;
        while (start <= s.size()) {
            auto end = s.find(sep, start);
            if (end == std::string::npos) end = s.size();
            out.push_back(s.substr(start, end - start));
            start = end + 1;
            if (end == s.size()) break;
        }
        return out;
    }

    static double parse_number(const std::string& tok) {
        std::string t;
        for (char c : tok)
            if (!std::isspace(static_cast<unsigned char>(c))) t += c;
        if (t.empty()) throw std::invalid_argument("query: empty number");
        if (t == "inf" || t == "+inf") return std::numeric_limits<double>::infinity();
        if (t == "-inf") return -std::numeric_limits<double>::infinity();
        std::size_t used = 0;
        const double v = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument("query: bad number '" + tok + "'");
        return v;
    }

    static interval parse_interval(std::string comp) {
        // trim
        while (!comp.empty() && std::isspace(static_cast<unsigned char>(comp.front())))
            comp.erase(comp.begin());
        while (!comp.empty() && std::isspace(static_cast<unsigned char>(comp.back())))
            comp.pop_back();
        if (comp.empty()) throw std::invalid_argument("query: empty interval");
        if (comp.front() == '(') comp.erase(comp.begin());
        bool closed_right = false;
        if (!comp.empty() && (comp.back() == ']' || comp.back() == ')')) {
            closed_right = comp.back() == ']';
            comp.pop_back();
        }
        const auto parts = split(comp, ',');
        if (parts.size() != 2) throw std::invalid_argument("query: interval needs 'lo,hi'");
        interval iv{parse_number(parts[0]), parse_number(parts[1])};
        if (!closed_right && std::isfinite(iv.hi))
            throw std::invalid_argument("query: intervals must be right-closed '(a,b]'");
        if (!(iv.lo < iv.hi)) throw std::invalid_argument("query: interval bounds out of order");
        return iv;
    }

    void normalize() {
        std::sort(intervals_.begin(), intervals_.end(),
                  [](const interval& a, const interval& b) { return a.lo < b.lo; });
        std::vector<interval> merged;
        for (const auto& iv : intervals_) {
            if (!merged.empty() && iv.lo <= merged.back().hi)
                merged.back().hi = std::max(merged.back().hi, iv.hi);
            else
                merged.push_back(iv);
        }
        intervals_ = std::move(merged);
        std::sort(points_.begin(), points_.end());
        points_.erase(std::unique(points_.begin(), points_.end()), points_.end());
        for (double p : points_)
            if (std::isnan(p)) throw std::invalid_argument("query: NaN point");
    }

    std::vector<interval> intervals_;
    std::vector<double> points_;
};

// The estimate as a bare sample multiset {X_{-tau_1}, ..., X_{-tau_k}}; every
// derived probability is an exact multiple of 1/k.
struct empirical_conditional {
    std::vector<double> samples;
    std::int64_t k = 0;
};

// Wrap an already-built ladder's matched samples.
inline std::optional<empirical_conditional> estimate_from_ladder(const recurrence_ladder& ladder,
                                                                 const past_window& past) {
    if (ladder.kappa() == 0) return std::nullopt;
    return empirical_conditional{matched_samples(ladder, past), ladder.kappa()};
}

// Build the ladder over the window and return the matched-sample multiset;
// nullopt when no pattern of length 1 recurs (kappa = 0), i.e. the window is
// too short to say anything.
inline std::optional<empirical_conditional> estimate_conditional(const past_window& past,
                                                                 const partition_scheme& scheme) {
    return estimate_from_ladder(build_ladder(past, scheme), past);
}

inline double prob(const empirical_conditional& ec, const query_set& C) {
    if (ec.k < 1) throw std::invalid_argument("prob: empty estimate");
    std::int64_t hits = 0;
    for (double s : ec.samples) hits += C.contains(s) ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(ec.k);
}

inline double cdf(const empirical_conditional& ec, double x) {
    if (ec.k < 1) throw std::invalid_argument("cdf: empty estimate");
    std::int64_t hits = 0;
    for (double s : ec.samples) hits += s <= x ? 1 : 0;
    return static_cast<double>(hits) / static_cast<double>(ec.k);
}

inline double mean(const empirical_conditional& ec) {
    if (ec.k < 1) throw std::invalid_argument("mean: empty estimate");
    double sum = 0.0;
    for (double s : ec.samples) sum += s;
    return sum / static_cast<double>(ec.k);
}

struct regression_config {
    double bound_D = 1.0;
    bool clip = false;
};

// The truncation map: clamp to [-D, D].
inline double clip_to_bound(double x, double D) { return std::clamp(x, -D, D); }

// Mean of the matched samples, optionally clipped.
inline double regress(const empirical_conditional& ec, const regression_config& cfg = {}) {
    if (cfg.clip && cfg.bound_D <= 0) throw std::invalid_argument("regress: bound_D must be > 0");
    if (ec.k < 1) throw std::invalid_argument("regress: empty estimate");
    double sum = 0.0;
    for (double s : ec.samples) sum += cfg.clip ? clip_to_bound(s, cfg.bound_D) : s;
    return sum / static_cast<double>(ec.k);
}

// The regression estimate of E(X_0 | past): mean of the matched samples,
// optionally clipped. nullopt when kappa = 0.
inline std::optional<double> regress(const past_window& past, const partition_scheme& scheme,
                                     const regression_config& cfg = {}) {
    const auto ec = estimate_conditional(past, scheme);
    if (!ec) return std::nullopt;
    return regress(*ec, cfg);
}

// One-step-ahead forecast of X_t from (X_0, ..., X_{t-1}): the prefix is
// treated as a past window with X_{t-1} in the most-recent slot, then fed
// through regress — literally the same code path.
inline std::optional<double> online_predict(const std::vector<double>& prefix,
                                            const partition_scheme& scheme,
                                            const regression_config& cfg = {}) {
    if (prefix.empty()) throw std::invalid_argument("online_predict: empty prefix");
    return regress(past_window{prefix}, scheme, cfg);
}

}  // namespace recur
