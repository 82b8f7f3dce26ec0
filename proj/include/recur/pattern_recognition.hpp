#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "recur/quantization.hpp"
#include "recur/recurrence.hpp"

namespace recur {

// Paired series for two-class prediction: d-dimensional feature rows
// (X_{-t}, ..., X_{-1}, X_0) stored flat, and binary labels
// (Y_{-t}, ..., Y_{-1}). The query point X_0 is present; Y_0 is what the
// classifier predicts, so it is absent.
struct labeled_series {
    std::size_t d = 1;
    std::vector<double> features;  // (t+1) * d values, row-major, oldest first
    std::vector<int> labels;       // t values in {0,1}, oldest first

    std::size_t feature_count() const { return d == 0 ? 0 : features.size() / d; }
    std::size_t past_length() const { return labels.size(); }

    const double* feature_row(std::size_t i) const { return features.data() + i * d; }

    void validate() const {
        if (d < 1) throw std::invalid_argument("labeled_series: d must be >= 1");
        if (features.size() % d != 0)
            throw std::invalid_argument("labeled_series: feature size not a multiple of d");
        if (feature_count() != labels.size() + 1)
            throw std::invalid_argument("labeled_series: need exactly one more feature row than labels");
        for (int y : labels)
            if (y != 0 && y != 1) throw std::invalid_argument("labeled_series: labels must be 0/1");
    }

    // View of the most recent t labeled pairs plus the query row.
    labeled_series suffix(std::size_t t) const {
        if (t > past_length()) throw std::out_of_range("labeled_series::suffix");
        labeled_series out;
        out.d = d;
        out.features.assign(features.end() - static_cast<std::ptrdiff_t>((t + 1) * d),
                            features.end());
        out.labels.assign(labels.end() - static_cast<std::ptrdiff_t>(t), labels.end());
        return out;
    }
};

struct eta_estimate {
    double eta = 0.0;
    std::int64_t k = 0;
    int decision = 0;  // 1 iff eta >= 1/2
};

namespace detail {

inline constexpr std::uint64_t tuple_base = 0x9E3779B97F4A7C15ULL % (hash_mod - 3) + 2;

inline std::uint64_t combine_symbol(std::uint64_t h, std::int64_t v) {
    return addmod(mulmod(h, tuple_base), hash_symbol(v));
}

}  // namespace detail

// Ladder over joint feature/label patterns anchored at the query point: at
// stage k the pattern is the level-k quantized features at the last
// lambda_{k-1}+1 time points including X_0, together with the labels at the
// lambda_{k-1} strictly-past points (no label at the final slot). tau_k is
// the smallest back-shift at which the whole pattern recurs.
// Multidimensional features quantize per coordinate.
inline recurrence_ladder pr_build_ladder(const labeled_series& data,
                                         const partition_scheme& scheme) {
    data.validate();
    const std::size_t T = data.past_length();
    const std::size_t rows = T + 1;
    const std::size_t d = data.d;

    recurrence_ladder ladder;
    if (T == 0) return ladder;

    std::vector<std::int64_t> cells(rows * d);   // level-k cell index per coordinate
    std::vector<std::int64_t> row_sig(rows);     // hash prefilter per feature row
    std::vector<std::int64_t> joint(T);          // row signature + label, past rows only
    detail::prefix_hash ph;
    const auto pow = detail::hash_powers(T);

    const auto rows_match_exact = [&](std::size_t a, std::size_t b, std::size_t len) {
        // len feature rows starting at a vs b, labels where both slots are past
        for (std::size_t i = 0; i < len; ++i) {
            for (std::size_t j = 0; j < d; ++j)
                if (cells[(a + i) * d + j] != cells[(b + i) * d + j]) return false;
            if (a + i < T && b + i < T && data.labels[a + i] != data.labels[b + i])
                return false;
        }
        return true;
    };

    const bool fixed_symbols = scheme.is_alphabet();
    for (int k = 1;; ++k) {
        const auto L = static_cast<std::size_t>(ladder.lambdas.back());
        if (L + 1 > T) break;
        if (k > scheme.max_level()) break;
        if (!fixed_symbols || k == 1) {
            for (std::size_t i = 0; i < rows; ++i) {
                std::uint64_t h = 0;
                for (std::size_t j = 0; j < d; ++j) {
                    cells[i * d + j] = scheme.quantize(k, data.feature_row(i)[j]).index;
                    h = detail::combine_symbol(h, cells[i * d + j]);
                }
                row_sig[i] = static_cast<std::int64_t>(h);
            }
            for (std::size_t i = 0; i < T; ++i)
                joint[i] = static_cast<std::int64_t>(
                    detail::combine_symbol(static_cast<std::uint64_t>(row_sig[i]),
                                           data.labels[i]));
            ph.build(joint);
        }
        // pattern: joint rows [T-L, T) plus the unlabeled anchor row T
        const std::uint64_t pat = ph.window(T - L, T, pow[L]);
        std::optional<std::int64_t> tau;
        for (std::size_t t = 1; t + L <= T; ++t) {
            const std::size_t p = T - L - t;
            if (ph.window(p, p + L, pow[L]) == pat && row_sig[p + L] == row_sig[T] &&
                rows_match_exact(p, T - L, L + 1)) {
                tau = static_cast<std::int64_t>(t);
                break;
            }
        }
        if (!tau) break;
        ladder.taus.push_back(*tau);
        ladder.lambdas.push_back(static_cast<std::int64_t>(L) + *tau);
        ladder.matched_indices.push_back(-*tau);
    }
    return ladder;
}

// Labels picked out by the ladder: (Y_{-tau_1}, ..., Y_{-tau_kappa}).
inline std::vector<int> matched_labels(const recurrence_ladder& ladder,
                                       const labeled_series& data) {
    const std::size_t T = data.past_length();
    std::vector<int> out;
    out.reserve(ladder.taus.size());
    for (std::int64_t tau : ladder.taus)
        out.push_back(data.labels[T - static_cast<std::size_t>(tau)]);
    return out;
}

/// The a-posteriori estimate: eta = average of the matched labels, decision
// by the >= 1/2 rule (ties go to class 1). nullopt when kappa = 0.
inline std::optional<eta_estimate> estimate_eta(const labeled_series& data,
                                                const partition_scheme& scheme) {
    const auto ladder = pr_build_ladder(data, scheme);
    if (ladder.kappa() == 0) return std::nullopt;
    const auto ys = matched_labels(ladder, data);
    double sum = 0.0;
    for (int y : ys) sum += y;
    const double eta = sum / static_cast<double>(ys.size());
    return eta_estimate{eta, ladder.kappa(), eta >= 0.5 ? 1 : 0};
}

// Certified ceiling on the conditional excess misclassification probability
// of the plug-in decision relative to the best possible decision.
inline double excess_risk_bound(double eta_hat, double eta_true) {
    if (eta_hat < 0 || eta_hat > 1 || eta_true < 0 || eta_true > 1)
        throw std::invalid_argument("excess_risk_bound: inputs must lie in [0,1]");
    return 2.0 * std::abs(eta_hat - eta_true);
}

}  // namespace recur
