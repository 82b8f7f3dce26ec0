#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "recur/estimators.hpp"
#include "recur/pattern_recognition.hpp"
#include "recur/rng.hpp"

namespace recur {

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730951); }

inline double normal_pdf(double z) {
    return std::exp(-0.5 * z * z) / 2.5066282746310002;  // sqrt(2*pi)
}

// A labeled sample path plus the held-out true label of the query point,
// kept aside so experiments can score misclassification.
struct labeled_path {
    labeled_series series;
    int true_label = 0;
};

// A seedable stationary-ergodic path generator with whatever pieces of the
// exact conditional law are analytically available. Empty std::function
// members mean that oracle component is unavailable.
struct process_model {
    enum class oracle_kind { full, markov1, none };

    std::string name;
    oracle_kind oracle = oracle_kind::none;
    bool labeled = false;

    // Scalar path of the given length, oldest value first (so the vector is
    // directly usable as a past window with X_{-1} at the back).
    std::function<std::vector<double>(std::uint64_t seed, std::int64_t len)> sample;

    // Labeled path with `len` past pairs plus the query row.
    std::function<labeled_path(std::uint64_t seed, std::int64_t len)> sample_labeled;

    // Conditional law of the next value given the most recent one (ignored
    // by i.i.d. models): support/probability pairs, mean, and CDF.
    std::function<std::vector<std::pair<double, double>>(double last)> cond_pmf;
    std::function<double(double last)> cond_mean;
    std::function<double(double last, double u)> cond_cdf;

    // Labeled models: exact P(Y = 1 | X = x).
    std::function<double(double x)> eta_given_x;
};

namespace detail {

// Solve pi P = pi, sum(pi) = 1 by Gaussian elimination with partial
// pivoting on (P^T - I) with the last equation replaced by normalization.
inline std::vector<double> stationary_distribution(const std::vector<std::vector<double>>& P) {
    const std::size_t n = P.size();
    std::vector<std::vector<double>> A(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A[i][j] = P[j][i] - (i == j ? 1.0 : 0.0);
    for (std::size_t j = 0; j < n; ++j) A[n - 1][j] = 1.0;
    A[n - 1][n] = 1.0;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        std::swap(A[piv], A[col]);
        if (std::abs(A[col][col]) < 1e-14)
            throw std::invalid_argument("markov_chain: singular stationarity system");
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = A[r][col] / A[col][col];
            for (std::size_t c = col; c <= n; ++c) A[r][c] -= f * A[col][c];
        }
    }
    std::vector<double> pi(n);
    for (std::size_t i = 0; i < n; ++i) pi[i] = A[i][n] / A[i][i];
    return pi;
}

// Wielandt's criterion: a nonnegative matrix is primitive (irreducible and
// aperiodic) iff its boolean adjacency power n^2 - 2n + 2 is all-positive.
inline bool is_primitive(const std::vector<std::vector<double>>& P) {
    const std::size_t n = P.size();
    if (n == 1) return P[0][0] > 0.0;
    std::vector<std::vector<bool>> A(n, std::vector<bool>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) A[i][j] = P[i][j] > 0.0;
    const std::size_t target = n * n - 2 * n + 2;
    auto cur = A;
    for (std::size_t step = 1; step < target; ++step) {
        std::vector<std::vector<bool>> next(n, std::vector<bool>(n, false));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                if (cur[i][k])
                    for (std::size_t j = 0; j < n; ++j)
                        if (A[k][j]) next[i][j] = true;
        cur = std::move(next);
    }
    for (const auto& row : cur)
        for (bool b : row)
            if (!b) return false;
    return true;
}

}  // namespace detail

// Independent Bernoulli(p) values in {0, 1}.
inline process_model iid_bernoulli(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("iid_bernoulli: need 0 < p < 1");
    process_model m;
    m.name = "bernoulli";
    m.oracle = process_model::oracle_kind::full;
    m.sample = [p](std::uint64_t seed, std::int64_t len) {
        rng r(seed);
        std::vector<double> out(static_cast<std::size_t>(len));
        for (auto& x : out) x = r.bernoulli(p) ? 1.0 : 0.0;
        return out;
    };
    m.cond_pmf = [p](double) {
        return std::vector<std::pair<double, double>>{{0.0, 1.0 - p}, {1.0, p}};
    };
    m.cond_mean = [p](double) { return p; };
    m.cond_cdf = [p](double, double u) { return u < 0.0 ? 0.0 : (u < 1.0 ? 1.0 - p : 1.0); };
    return m;
}

// Independent Uniform(0, 1) values.
inline process_model iid_uniform() {
    process_model m;
    m.name = "uniform";
    m.oracle = process_model::oracle_kind::full;
    m.sample = [](std::uint64_t seed, std::int64_t len) {
        rng r(seed);
        std::vector<double> out(static_cast<std::size_t>(len));
        for (auto& x : out) x = r.uniform01();
        return out;
    };
    m.cond_mean = [](double) { return 0.5; };
    m.cond_cdf = [](double, double u) { return u < 0.0 ? 0.0 : (u < 1.0 ? u : 1.0); };
    return m;
}

// Deterministic constant series.
inline process_model constant_process(double c) {
    process_model m;
    m.name = "constant";
    m.oracle = process_model::oracle_kind::full;
    m.sample = [c](std::uint64_t, std::int64_t len) {
        return std::vector<double>(static_cast<std::size_t>(len), c);
    };
    m.cond_pmf = [c](double) { return std::vector<std::pair<double, double>>{{c, 1.0}}; };
    m.cond_mean = [c](double) { return c; };
    m.cond_cdf = [c](double, double u) { return u < c ? 0.0 : 1.0; };
    return m;
}

// Finite-state Markov chain started exactly from its stationary law, so
// every finite window is strictly stationary. The transition matrix must be
// irreducible and aperiodic. emission maps state index to output value and
// must be injective (it defaults to the identity on state indices).
inline process_model markov_chain(std::vector<std::vector<double>> P,
                                  std::vector<double> emission = {}) {
    const std::size_t n = P.size();
    if (n == 0) throw std::invalid_argument("markov_chain: empty matrix");
    for (const auto& row : P) {
        if (row.size() != n) throw std::invalid_argument("markov_chain: matrix not square");
        double s = 0.0;
        for (double v : row) {
            if (v < 0.0) throw std::invalid_argument("markov_chain: negative entry");
            s += v;
        }
        if (std::abs(s - 1.0) > 1e-12)
            throw std::invalid_argument("markov_chain: row does not sum to 1");
    }
    if (!detail::is_primitive(P))
        throw std::invalid_argument("markov_chain: matrix must be irreducible and aperiodic");
    if (emission.empty()) {
        emission.resize(n);
        for (std::size_t i = 0; i < n; ++i) emission[i] = static_cast<double>(i);
    }
    if (emission.size() != n) throw std::invalid_argument("markov_chain: emission size mismatch");
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (emission[i] == emission[j])
                throw std::invalid_argument("markov_chain: emission must be injective");

    const auto pi = detail::stationary_distribution(P);
    const auto state_of = [emission, n](double last) -> std::size_t {
        for (std::size_t i = 0; i < n; ++i)
            if (emission[i] == last) return i;
        throw std::domain_error("markov_chain oracle: value is not an emission");
    };

    process_model m;
    m.name = "markov";
    m.oracle = process_model::oracle_kind::markov1;
    m.sample = [P, pi, emission](std::uint64_t seed, std::int64_t len) {
        rng r(seed);
        std::vector<double> out(static_cast<std::size_t>(len));
        std::size_t s = r.discrete(pi);
        for (auto& x : out) {
            x = emission[s];
            s = r.discrete(P[s]);
        }
        return out;
    };
    m.cond_pmf = [P, emission, state_of, n](double last) {
        const auto s = state_of(last);
        std::vector<std::pair<double, double>> pmf;
        pmf.reserve(n);
        for (std::size_t j = 0; j < n; ++j) pmf.emplace_back(emission[j], P[s][j]);
        return pmf;
    };
    m.cond_mean = [P, emission, state_of, n](double last) {
        const auto s = state_of(last);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += emission[j] * P[s][j];
        return acc;
    };
    m.cond_cdf = [P, emission, state_of, n](double last, double u) {
        const auto s = state_of(last);
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (emission[j] <= u) acc += P[s][j];
        return acc;
    };
    return m;
}

inline std::vector<double> markov_stationary(const std::vector<std::vector<double>>& P) {
    return detail::stationary_distribution(P);
}

// AR(1) clamped to [-D, D]: X_n = clamp(a X_{n-1} + eps_n). Bounded, ergodic,
// with a closed-form conditional law: given X_{-1} = x the next value is a
// Gaussian N(a x, sd^2) with its tails collapsed onto -D and D.
inline process_model clipped_ar1(double a, double sd, double D, std::int64_t burn_in = 10000) {
    if (!(std::abs(a) < 1.0)) throw std::invalid_argument("clipped_ar1: need |a| < 1");
    if (!(sd > 0.0)) throw std::invalid_argument("clipped_ar1: need sd > 0");
    if (!(D > 0.0)) throw std::invalid_argument("clipped_ar1: need D > 0");
    if (burn_in < 0) throw std::invalid_argument("clipped_ar1: negative burn-in");

    process_model m;
    m.name = "clipped_ar1";
    m.oracle = process_model::oracle_kind::markov1;
    m.sample = [a, sd, D, burn_in](std::uint64_t seed, std::int64_t len) {
        rng r(seed);
        double x = clip_to_bound(r.normal(0.0, sd / std::sqrt(1.0 - a * a)), D);
        for (std::int64_t i = 0; i < burn_in; ++i)
            x = clip_to_bound(a * x + r.normal(0.0, sd), D);
        std::vector<double> out(static_cast<std::size_t>(len));
        for (auto& v : out) {
            x = clip_to_bound(a * x + r.normal(0.0, sd), D);
            v = x;
        }
        return out;
    };
    m.cond_mean = [a, sd, D](double last) {
        const double mu = a * last;
        const double alpha = (-D - mu) / sd;
        const double beta = (D - mu) / sd;
        return -D * normal_cdf(alpha) + D * (1.0 - normal_cdf(beta)) +
               mu * (normal_cdf(beta) - normal_cdf(alpha)) -
               sd * (normal_pdf(beta) - normal_pdf(alpha));
    };
    m.cond_cdf = [a, sd, D](double last, double u) {
        if (u < -D) return 0.0;
        if (u >= D) return 1.0;
        return normal_cdf((u - a * last) / sd);
    };
    return m;
}

// Zero-entropy ergodic stress case: the indicator of a rotating point
// falling below a threshold. Deterministic given the seed's initial phase;
// no finite-order conditional oracle exists, so none is offered.
inline process_model rotation_process(double alpha = 0.6180339887498949,
                                      double threshold = 0.5) {
    process_model m;
    m.name = "rotation";
    m.oracle = process_model::oracle_kind::none;
    m.sample = [alpha, threshold](std::uint64_t seed, std::int64_t len) {
        rng r(seed);
        double phase = r.uniform01();
        const double step = alpha - std::floor(alpha);
        std::vector<double> out(static_cast<std::size_t>(len));
        for (auto& x : out) {
            x = phase < threshold ? 1.0 : 0.0;
            phase += step;
            if (phase >= 1.0) phase -= 1.0;
        }
        return out;
    };
    return m;
}

// One labeled cell: features land uniformly in (anchor, anchor + width] and
// carry labels that are 1 with probability p.
struct labeled_cell {
    double anchor = 0.0;
    double width = 1.0;
    double p = 0.5;
};

// I.i.d. continuous features drawn uniformly from one of several disjoint
// cells (each cell equally likely), labels Bernoulli with the cell's label
// probability. The exact a-posteriori probability is the cell's p, so the
// classifier has a closed-form target. The default cells are two narrow
// dyadic-aligned intervals, which keeps recurrence times short enough to
// watch convergence at desk scale.
inline process_model labeled_cell_process(std::vector<labeled_cell> cells = {
                                              {0.25, 0x1.0p-16, 0.1},
                                              {0.75, 0x1.0p-16, 0.9}}) {
    if (cells.empty()) throw std::invalid_argument("labeled_cell_process: no cells");
    for (const auto& c : cells) {
        if (!(c.width > 0.0)) throw std::invalid_argument("labeled_cell_process: width <= 0");
        if (c.p < 0.0 || c.p > 1.0)
            throw std::invalid_argument("labeled_cell_process: label prob outside [0,1]");
    }
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            const auto& a = cells[i];
            const auto& b = cells[j];
            if (a.anchor < b.anchor + b.width && b.anchor < a.anchor + a.width)
                throw std::invalid_argument("labeled_cell_process: cells overlap");
        }

    process_model m;
    m.name = "labeled_cells";
    m.oracle = process_model::oracle_kind::full;
    m.labeled = true;
    m.sample_labeled = [cells](std::uint64_t seed, std::int64_t len) {
        rng r(seed);
        labeled_path out;
        out.series.d = 1;
        out.series.features.reserve(static_cast<std::size_t>(len) + 1);
        out.series.labels.reserve(static_cast<std::size_t>(len));
        for (std::int64_t i = 0; i <= len; ++i) {
            const auto& c = cells[static_cast<std::size_t>(r.uniform_int(
                static_cast<std::int64_t>(cells.size())))];
            out.series.features.push_back(c.anchor + c.width * (1.0 - r.uniform01()));
            const int y = r.bernoulli(c.p) ? 1 : 0;
            if (i < len)
                out.series.labels.push_back(y);
            else
                out.true_label = y;
        }
        return out;
    };
    m.eta_given_x = [cells](double x) {
        for (const auto& c : cells)
            if (c.anchor < x && x <= c.anchor + c.width) return c.p;
        throw std::domain_error("labeled_cell_process: x outside every cell");
    };
    return m;
}

}  // namespace recur
