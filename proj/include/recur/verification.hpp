#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "recur/estimators.hpp"
#include "recur/io.hpp"
#include "recur/pattern_recognition.hpp"
#include "recur/processes.hpp"
#include "recur/quantization.hpp"
#include "recur/recurrence.hpp"
#include "recur/rng.hpp"

namespace recur {

// Independent re-implementation of the ladder: plain double loop, fresh
// quantization at every comparison, no caching and no hashing. Exists only
// to cross-check build_ladder; keep it dumb.
inline recurrence_ladder brute_force_ladder(const past_window& past,
                                            const partition_scheme& scheme) {
    if (past.values.empty()) throw std::invalid_argument("brute_force_ladder: empty past");
    const auto n = static_cast<std::int64_t>(past.values.size());
    const auto& v = past.values;
    recurrence_ladder ladder;
    for (int k = 1;; ++k) {
        const std::int64_t L = ladder.lambdas.back();
        if (L + 1 > n) break;
        if (k > scheme.max_level()) break;
        std::int64_t found = 0;
        for (std::int64_t t = 1; L + t <= n && found == 0; ++t) {
            bool match = true;
            for (std::int64_t i = 0; i < L && match; ++i) {
                const auto a = scheme.quantize(k, v[static_cast<std::size_t>(n - L - t + i)]);
                const auto b = scheme.quantize(k, v[static_cast<std::size_t>(n - L + i)]);
                if (a.index != b.index) match = false;
            }
            if (match) found = t;
        }
        if (found == 0) break;
        ladder.taus.push_back(found);
        ladder.lambdas.push_back(L + found);
        ladder.matched_indices.push_back(-found);
    }
    return ladder;
}

inline bool ladders_equal(const recurrence_ladder& a, const recurrence_ladder& b) {
    return a.taus == b.taus && a.lambdas == b.lambdas &&
           a.matched_indices == b.matched_indices;
}

struct equivalence_result {
    std::int64_t checked = 0;
    std::int64_t mismatches = 0;
    bool ok() const { return checked > 0 && mismatches == 0; }
};

// Randomized cross-check of the accelerated ladder against the brute-force
// scanner (and the cached-symbol reference) on binary strings and on
// real-valued strings under the dyadic scheme. Real inputs mix a continuous
// family with strings drawn from small palettes of dyadic rationals, which
// produce deep ladders and exercise cell-boundary handling.
inline equivalence_result run_equivalence(std::int64_t n_binary, std::int64_t n_real,
                                          std::uint64_t master_seed,
                                          std::int64_t min_len = 8, std::int64_t max_len = 512) {
    equivalence_result res;
    const auto alpha2 = partition_scheme::alphabet(2);
    const auto dyadic = partition_scheme::dyadic();
    const auto check = [&res](const past_window& w, const partition_scheme& s) {
        const auto fast = build_ladder(w, s);
        const auto slow = brute_force_ladder(w, s);
        const auto ref = naive_ladder(w, s);
        ++res.checked;
        if (!ladders_equal(fast, slow) || !ladders_equal(fast, ref)) ++res.mismatches;
    };

    for (std::int64_t i = 0; i < n_binary; ++i) {
        rng r(derive_seed(master_seed, {stream::equivalence, 1, static_cast<std::uint64_t>(i)}));
        const auto len = min_len + r.uniform_int(max_len - min_len + 1);
        past_window w;
        w.values.resize(static_cast<std::size_t>(len));
        for (auto& x : w.values) x = r.bernoulli(0.5) ? 1.0 : 0.0;
        check(w, alpha2);
    }
    for (std::int64_t i = 0; i < n_real; ++i) {
        rng r(derive_seed(master_seed, {stream::equivalence, 2, static_cast<std::uint64_t>(i)}));
        const auto len = min_len + r.uniform_int(max_len - min_len + 1);
        past_window w;
        w.values.resize(static_cast<std::size_t>(len));
        if (i % 2 == 0) {
            for (auto& x : w.values) x = 3.0 * r.uniform01() - 1.5;
        } else {
            // palette of dyadic rationals (multiples of 1/16 in [-2, 2))
            std::vector<double> palette(4);
            for (auto& p : palette) p = static_cast<double>(r.uniform_int(64) - 32) / 16.0;
            for (auto& x : w.values)
                x = palette[static_cast<std::size_t>(r.uniform_int(4))];
        }
        check(w, dyadic);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Distributional identity check (Monte Carlo).
//
// On an atom B = {the level-(j-1) quantized last-m window equals b and the
// stage-(j-1) window length equals m}, the matched sample X_{-tau_j} has the
// same conditional law as X_0. The check estimates the unconditional
// frequencies of B & {X_{-tau_j} in C} and B & {X_0 in C} over N independent
// stationary paths and compares them within a standard-error budget —
// exactly the atom-by-atom reduction that makes the identity testable
// without estimating conditional probabilities.

struct identity_check_config {
    // Conditioning event. `pattern` fixes the whole stage-(j-1) window: its
    // length equals the pattern length and every level-(j-1) cell matches.
    // `last_cell` conditions only on the cell of the most recent value — a
    // disjoint union of pattern events, so the identity holds there too.
    enum class atom_kind { pattern, last_cell };

    int j = 2;                             // stage under test; >= 2
    atom_kind kind = atom_kind::pattern;
    std::vector<std::int64_t> atom_pattern;  // level-(j-1) cell indices, oldest first
    query_set C;
    std::int64_t paths = 100000;
    std::int64_t window_len = 512;
    double se_multiple = 3.0;
};

struct identity_check_report {
    enum class verdict_t { pass, fail, inconclusive };

    std::int64_t n_paths = 0;
    std::int64_t n_atom = 0;          // paths landing in B
    std::int64_t hits_tau = 0;        // B & {X_{-tau_j} in C}
    std::int64_t hits_x0 = 0;         // B & {X_0 in C}
    std::int64_t undetermined = 0;    // in B but tau_j not found in the window
    double freq_tau = 0.0;
    double freq_x0 = 0.0;
    double se_pooled = 0.0;
    verdict_t verdict = verdict_t::inconclusive;
};

inline identity_check_report run_identity_check(const process_model& model,
                                                const partition_scheme& scheme,
                                                const identity_check_config& cfg,
                                                std::uint64_t master_seed) {
    if (cfg.j < 2) throw std::invalid_argument("identity check: stage j must be >= 2");
    if (cfg.atom_pattern.empty()) throw std::invalid_argument("identity check: empty atom");
    if (cfg.kind == identity_check_config::atom_kind::last_cell && cfg.atom_pattern.size() != 1)
        throw std::invalid_argument("identity check: last_cell takes exactly one cell");
    if (cfg.window_len < static_cast<std::int64_t>(cfg.atom_pattern.size()) + 1)
        throw std::invalid_argument("identity check: window shorter than atom");
    identity_check_report rep;
    rep.n_paths = cfg.paths;
    const auto m = static_cast<std::int64_t>(cfg.atom_pattern.size());

    for (std::int64_t p = 0; p < cfg.paths; ++p) {
        const auto seed = derive_seed(master_seed,
                                      {stream::identity_check, static_cast<std::uint64_t>(p)});
        const auto path = model.sample(seed, cfg.window_len + 1);
        const double x0 = path.back();
        past_window past{std::vector<double>(path.begin(), path.end() - 1)};

        // Only stages 1..j matter here; capping keeps big windows affordable.
        const auto ladder = build_ladder(past, scheme, cfg.j);
        bool in_atom = true;
        if (cfg.kind == identity_check_config::atom_kind::last_cell) {
            const auto c = scheme.quantize(cfg.j - 1, past.at_neg(1));
            in_atom = c.index == cfg.atom_pattern[0];
        } else {
            if (ladder.kappa() < cfg.j - 1) continue;          // lambda_{j-1} > window
            if (ladder.lambdas[static_cast<std::size_t>(cfg.j - 1)] != m) continue;
            for (std::int64_t i = 0; i < m && in_atom; ++i) {
                const auto c = scheme.quantize(cfg.j - 1, past.at_neg(m - i));
                if (c.index != cfg.atom_pattern[static_cast<std::size_t>(i)]) in_atom = false;
            }
        }
        if (!in_atom) continue;
        ++rep.n_atom;
        if (cfg.C.contains(x0)) ++rep.hits_x0;
        if (ladder.kappa() >= cfg.j) {
            const auto tau_j = ladder.taus[static_cast<std::size_t>(cfg.j - 1)];
            if (cfg.C.contains(past.at_neg(tau_j))) ++rep.hits_tau;
        } else {
            ++rep.undetermined;
        }
    }

    if (cfg.paths == 0 || rep.n_atom == 0) {
        rep.verdict = identity_check_report::verdict_t::inconclusive;
        return rep;
    }
    const auto N = static_cast<double>(cfg.paths);
    rep.freq_tau = static_cast<double>(rep.hits_tau) / N;
    rep.freq_x0 = static_cast<double>(rep.hits_x0) / N;
    const double se1 = std::sqrt(rep.freq_tau * (1.0 - rep.freq_tau) / N);
    const double se2 = std::sqrt(rep.freq_x0 * (1.0 - rep.freq_x0) / N);
    rep.se_pooled = std::sqrt(se1 * se1 + se2 * se2);
    rep.verdict = std::abs(rep.freq_tau - rep.freq_x0) <= cfg.se_multiple * rep.se_pooled
                      ? identity_check_report::verdict_t::pass
                      : identity_check_report::verdict_t::fail;
    return rep;
}

// ---------------------------------------------------------------------------
// Experiment drivers. Each emits one record per (t, seed, metric); aggregates
// are recomputed from the records so reports stay self-describing.

struct record {
    std::string process;
    std::int64_t t = 0;
    std::int64_t seed = 0;
    std::int64_t k = 0;
    std::string metric;
    double value = 0.0;
    bool na = false;
};

struct convergence_report {
    std::vector<record> records;

    std::vector<double> values(const std::string& metric, std::int64_t t) const {
        std::vector<double> out;
        for (const auto& r : records)
            if (!r.na && r.metric == metric && r.t == t) out.push_back(r.value);
        return out;
    }

    double mean_of(const std::string& metric, std::int64_t t) const {
        const auto v = values(metric, t);
        if (v.empty()) throw std::runtime_error("no values for metric " + metric);
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
    }

    double median_of(const std::string& metric, std::int64_t t) const {
        auto v = values(metric, t);
        if (v.empty()) throw std::runtime_error("no values for metric " + metric);
        std::sort(v.begin(), v.end());
        const auto n = v.size();
        return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    }
};

inline void check_sizes(const std::vector<std::int64_t>& sizes) {
    if (sizes.empty()) throw std::invalid_argument("experiment: no sample sizes");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 1) throw std::invalid_argument("experiment: sizes must be >= 1");
        if (i > 0 && sizes[i] <= sizes[i - 1])
            throw std::invalid_argument("experiment: sizes must increase");
    }
}

struct consistency_options {
    std::optional<query_set> query;
    std::vector<double> cdf_grid;
    std::optional<double> clip_bound;
};

// Fixed-window estimation error against the analytic conditional law.
//
// One path per seed, of the largest configured length; each smaller t is
// evaluated on the most-recent-t stretch of the same path. That mirrors the
// object under study — the window grows into the past while "now" stays
// put — and makes per-seed error curves comparable across t (a ladder found
// on a short window is a prefix of the ladder on a longer one). Metrics per
// (t, seed): total-variation error when the law is a pmf, Kolmogorov
// distance on the configured grid when a CDF oracle exists, absolute error
// of the conditional-mean estimate, the raw estimate itself, and the
// probability of the configured query set. Windows with kappa = 0 yield NA
// records.
inline convergence_report consistency_experiment(const process_model& model,
                                                 const partition_scheme& scheme,
                                                 const std::vector<std::int64_t>& sizes,
                                                 std::int64_t n_seeds, std::uint64_t master_seed,
                                                 const consistency_options& opts = {}) {
    check_sizes(sizes);
    if (n_seeds < 1) throw std::invalid_argument("experiment: need at least one seed");
    if (!model.sample) throw std::invalid_argument("experiment: process has no scalar sampler");
    const std::int64_t tmax = sizes.back();
    convergence_report rep;

    const bool have_pmf = static_cast<bool>(model.cond_pmf);
    const bool have_cdf = static_cast<bool>(model.cond_cdf) && !opts.cdf_grid.empty();
    const bool have_mean = static_cast<bool>(model.cond_mean);

    regression_config rc;
    if (opts.clip_bound) rc = regression_config{*opts.clip_bound, true};

    for (std::int64_t seed = 0; seed < n_seeds; ++seed) {
        const auto path = model.sample(
            derive_seed(master_seed, {stream::consistency, static_cast<std::uint64_t>(seed)}),
            tmax);
        const double last = path.back();
        for (const std::int64_t t : sizes) {
            past_window window{std::vector<double>(path.end() - t, path.end())};
            const auto ladder = build_ladder(window, scheme);
            const auto ec = estimate_from_ladder(ladder, window);
            const auto emit = [&](const std::string& metric, double value, bool na) {
                rep.records.push_back(
                    {model.name, t, seed, ladder.kappa(), metric, na ? 0.0 : value, na});
            };
            const bool na = !ec;
            if (have_pmf) {
                double tv = 0.0;
                if (ec) {
                    for (const auto& [v, pv] : model.cond_pmf(last)) {
                        std::int64_t cnt = 0;
                        for (double s : ec->samples) cnt += s == v ? 1 : 0;
                        tv += std::abs(static_cast<double>(cnt) / static_cast<double>(ec->k) - pv);
                    }
                    tv *= 0.5;
                }
                emit("tv", tv, na);
            }
            if (have_cdf) {
                double kol = 0.0;
                if (ec)
                    for (double u : opts.cdf_grid)
                        kol = std::max(kol, std::abs(cdf(*ec, u) - model.cond_cdf(last, u)));
                emit("kolmogorov", kol, na);
            }
            if (have_mean) {
                emit("abs_mean_err", ec ? std::abs(regress(*ec, rc) - model.cond_mean(last)) : 0.0,
                     na);
                // same NA mask as the estimate so cross-seed means pair up
                emit("oracle_mean", model.cond_mean(last), na);
            }
            emit("estimate_mean", ec ? regress(*ec, rc) : 0.0, na);
            if (opts.query) emit("prob_query", ec ? prob(*ec, *opts.query) : 0.0, na);
        }
    }
    return rep;
}

// One-step-ahead forecasting error along a growing prefix: at each
// checkpoint t the prefix (X_0 .. X_{t-1}) predicts X_t, scored against the
// analytic conditional mean given X_{t-1}.
inline convergence_report online_experiment(const process_model& model,
                                            const partition_scheme& scheme,
                                            const std::vector<std::int64_t>& checkpoints,
                                            std::int64_t n_seeds, std::uint64_t master_seed,
                                            std::optional<double> clip_bound = {}) {
    check_sizes(checkpoints);
    if (n_seeds < 1) throw std::invalid_argument("experiment: need at least one seed");
    if (!model.cond_mean) throw std::invalid_argument("online experiment: no mean oracle");
    const std::int64_t tmax = checkpoints.back();
    convergence_report rep;
    regression_config rc;
    if (clip_bound) rc = regression_config{*clip_bound, true};

    for (std::int64_t seed = 0; seed < n_seeds; ++seed) {
        const auto path = model.sample(
            derive_seed(master_seed, {stream::online, static_cast<std::uint64_t>(seed)}), tmax);
        for (const std::int64_t t : checkpoints) {
            past_window prefix{std::vector<double>(path.begin(), path.begin() + t)};
            const auto ladder = build_ladder(prefix, scheme);
            const auto ec = estimate_from_ladder(ladder, prefix);
            const double oracle = model.cond_mean(path[static_cast<std::size_t>(t - 1)]);
            rep.records.push_back({model.name, t, seed, ladder.kappa(), "abs_online_err",
                                   ec ? std::abs(regress(*ec, rc) - oracle) : 0.0, !ec});
        }
    }
    return rep;
}

// Classification error along the t ladder: per seed one labeled path; each
// t evaluates the most recent t labeled pairs against the fixed query row.
// Records the estimation error of eta, the certified excess-risk ceiling,
// and the realized misclassification of both the plug-in and the best
// decision against the held-out true label.
inline convergence_report classification_experiment(const process_model& model,
                                                    const partition_scheme& scheme,
                                                    const std::vector<std::int64_t>& sizes,
                                                    std::int64_t n_seeds,
                                                    std::uint64_t master_seed) {
    check_sizes(sizes);
    if (n_seeds < 1) throw std::invalid_argument("experiment: need at least one seed");
    if (!model.labeled || !model.sample_labeled)
        throw std::invalid_argument("classification experiment: process is not labeled");
    if (!model.eta_given_x)
        throw std::invalid_argument("classification experiment: no eta oracle");
    const std::int64_t tmax = sizes.back();
    convergence_report rep;

    for (std::int64_t seed = 0; seed < n_seeds; ++seed) {
        const auto lp = model.sample_labeled(
            derive_seed(master_seed, {stream::classification, static_cast<std::uint64_t>(seed)}),
            tmax);
        if (lp.series.d != 1)
            throw std::invalid_argument("classification experiment: oracle needs scalar features");
        const double x0 = lp.series.feature_row(lp.series.past_length())[0];
        const double eta_true = model.eta_given_x(x0);
        const int bayes = eta_true >= 0.5 ? 1 : 0;
        for (const std::int64_t t : sizes) {
            const auto sub = lp.series.suffix(static_cast<std::size_t>(t));
            const auto est = estimate_eta(sub, scheme);
            const auto k = est ? est->k : 0;
            const auto emit = [&](const std::string& metric, double value) {
                rep.records.push_back({model.name, t, seed, k, metric, est ? value : 0.0, !est});
            };
            emit("abs_eta_err", est ? std::abs(est->eta - eta_true) : 0.0);
            emit("excess_bound", est ? excess_risk_bound(est->eta, eta_true) : 0.0);
            emit("miscls", est && est->decision != lp.true_label ? 1.0 : 0.0);
            emit("bayes_miscls", bayes != lp.true_label ? 1.0 : 0.0);
        }
    }
    return rep;
}

// CSV rendering: '#' header lines carry version/config/master seed so every
// file is self-describing and re-runnable; then one row per record.
inline std::string report_to_csv(const convergence_report& rep,
                                 const std::vector<std::string>& header_lines) {
    std::string out;
    for (const auto& h : header_lines) out += "# " + h + "\n";
    out += "process,t,seed,k,metric_name,value\n";
    for (const auto& r : rep.records) {
        out += r.process + "," + std::to_string(r.t) + "," + std::to_string(r.seed) + "," +
               std::to_string(r.k) + "," + r.metric + "," + (r.na ? "NA" : to_g17(r.value)) +
               "\n";
    }
    return out;
}

inline void write_report_csv(const std::string& path, const convergence_report& rep,
                             const std::vector<std::string>& header_lines) {
    atomic_write_text(path, report_to_csv(rep, header_lines));
}

}  // namespace recur
