#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "recur/quantization.hpp"

namespace recur {

// A finite stretch of past observations (X_{-t}, ..., X_{-1}); the most
// recent value sits at the back. values[i] is X_{-(t-i)}.
struct past_window {
    std::vector<double> values;

    std::int64_t length() const { return static_cast<std::int64_t>(values.size()); }

    // X_{-j} for j >= 1.
    double at_neg(std::int64_t j) const {
        if (j < 1 || j > length()) throw std::out_of_range("past_window::at_neg");
        return values[static_cast<std::size_t>(length() - j)];
    }
};

// The recurrence ladder: search-depth offsets tau_j, window lengths
// lambda_j (lambda_0 = 1, lambda_j = tau_j + lambda_{j-1}) and the matched
// sample positions -tau_j. The number of completed stages is kappa().
struct recurrence_ladder {
    std::vector<std::int64_t> taus;
    std::vector<std::int64_t> lambdas{1};
    std::vector<std::int64_t> matched_indices;

    std::int64_t kappa() const { return static_cast<std::int64_t>(taus.size()); }
};

namespace detail {

// Polynomial rolling hash mod 2^61-1. Hash hits are always verified against
// the underlying symbols, so collisions cannot produce wrong answers.
inline constexpr std::uint64_t hash_mod = (std::uint64_t{1} << 61) - 1;
inline constexpr std::uint64_t hash_base = 0x1B873593A7F4C15DULL % (hash_mod - 3) + 2;

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
    const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    std::uint64_t r = (static_cast<std::uint64_t>(p) & hash_mod) +
                      static_cast<std::uint64_t>(p >> 61);
    if (r >= hash_mod) r -= hash_mod;
    return r;
}

inline std::uint64_t addmod(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = a + b;  // both < 2^61, no overflow
    if (r >= hash_mod) r -= hash_mod;
    return r;
}

inline std::uint64_t submod(std::uint64_t a, std::uint64_t b) {
    return a >= b ? a - b : a + hash_mod - b;
}

inline std::uint64_t hash_symbol(std::int64_t v) {
    return static_cast<std::uint64_t>(v) % hash_mod + 1;
}

// Prefix hashes over a symbol array plus a shared power table.
struct prefix_hash {
    std::vector<std::uint64_t> h;  // h[i] = hash of symbols [0, i)

    void build(const std::vector<std::int64_t>& sym) {
        h.assign(sym.size() + 1, 0);
        for (std::size_t i = 0; i < sym.size(); ++i)
            h[i + 1] = addmod(mulmod(h[i], hash_base), hash_symbol(sym[i]));
    }

    // Hash of symbols [l, r) given pow[r - l] = base^(r-l).
    std::uint64_t window(std::size_t l, std::size_t r, std::uint64_t pow_len) const {
        return submod(h[r], mulmod(h[l], pow_len));
    }
};

inline std::vector<std::uint64_t> hash_powers(std::size_t n) {
    std::vector<std::uint64_t> p(n + 1);
    p[0] = 1;
    for (std::size_t i = 1; i <= n; ++i) p[i] = mulmod(p[i - 1], hash_base);
    return p;
}

inline bool windows_equal(const std::vector<std::int64_t>& sym, std::size_t a,
                          std::size_t b, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i)
        if (sym[a + i] != sym[b + i]) return false;
    return true;
}

// Smallest t > 0 with sym[n-L-t .. n-1-t] == sym[n-L .. n-1], restricted to
// candidates that fit in the window (L + t <= n). Hash-accelerated scan with
// exact verification of every hit.
inline std::optional<std::int64_t> find_recurrence_hashed(
    const std::vector<std::int64_t>& sym, const prefix_hash& ph,
    const std::vector<std::uint64_t>& pow, std::size_t L) {
    const std::size_t n = sym.size();
    if (L + 1 > n) return std::nullopt;
    const std::uint64_t pat = ph.window(n - L, n, pow[L]);
    for (std::size_t t = 1; t + L <= n; ++t) {
        const std::size_t p = n - L - t;
        if (ph.window(p, p + L, pow[L]) == pat && windows_equal(sym, p, n - L, L))
            return static_cast<std::int64_t>(t);
    }
    return std::nullopt;
}

// Reference scan: direct elementwise comparison, no hashing.
inline std::optional<std::int64_t> find_recurrence_naive(
    const std::vector<std::int64_t>& sym, std::size_t L) {
    const std::size_t n = sym.size();
    if (L + 1 > n) return std::nullopt;
    for (std::size_t t = 1; t + L <= n; ++t)
        if (windows_equal(sym, n - L - t, n - L, L)) return static_cast<std::int64_t>(t);
    return std::nullopt;
}

// Level-k cell indices of the whole window.
inline void quantize_indices(const past_window& past, const partition_scheme& scheme,
                             int k, std::vector<std::int64_t>& out) {
    out.resize(past.values.size());
    for (std::size_t i = 0; i < past.values.size(); ++i)
        out[i] = scheme.quantize(k, past.values[i]).index;
}

template <bool Hashed>
recurrence_ladder build_ladder_impl(const past_window& past, const partition_scheme& scheme,
                                    std::int64_t max_stages) {
    if (past.values.empty()) throw std::invalid_argument("build_ladder: empty past");
    const std::size_t n = past.values.size();

    recurrence_ladder ladder;
    std::vector<std::int64_t> sym;
    prefix_hash ph;
    std::vector<std::uint64_t> pow;
    if constexpr (Hashed) pow = hash_powers(n);

    const bool fixed_symbols = scheme.is_alphabet();  // identical at every level
    for (int k = 1;; ++k) {
        if (ladder.kappa() >= max_stages) break;
        const std::int64_t L = ladder.lambdas.back();
        if (L + 1 > static_cast<std::int64_t>(n)) break;  // no shift fits the window
        if (k > scheme.max_level()) break;                // dyadic depth cap
        if (!fixed_symbols || k == 1) {
            quantize_indices(past, scheme, k, sym);
            if constexpr (Hashed) ph.build(sym);
        }
        std::optional<std::int64_t> tau;
        if constexpr (Hashed)
            tau = find_recurrence_hashed(sym, ph, pow, static_cast<std::size_t>(L));
        else
            tau = find_recurrence_naive(sym, static_cast<std::size_t>(L));
        if (!tau) break;
        ladder.taus.push_back(*tau);
        ladder.lambdas.push_back(L + *tau);
        ladder.matched_indices.push_back(-*tau);
    }
    return ladder;
}

}  // namespace detail

// Smallest t > 0 such that the level-k quantized segment of length
// lambda_prev ending at -1-t equals the one ending at -1; nullopt when no
// such t fits inside the window (the data ran out, not an error).
inline std::optional<std::int64_t> next_recurrence(const past_window& past,
                                                   const partition_scheme& scheme, int k,
                                                   std::int64_t lambda_prev) {
    if (lambda_prev < 1) throw std::invalid_argument("next_recurrence: lambda_prev < 1");
    if (past.length() < lambda_prev)
        throw std::invalid_argument("next_recurrence: window shorter than pattern");
    std::vector<std::int64_t> sym;
    detail::quantize_indices(past, scheme, k, sym);
    return detail::find_recurrence_naive(sym, static_cast<std::size_t>(lambda_prev));
}

// Full ladder over the window: stage k searches with quantizer level k and
// pattern length lambda_{k-1}; stops at the first stage whose recurrence
// does not fit, which is exactly the sample-size cap kappa_t = max{k :
// lambda_k <= t}. kappa may be 0. Hash-accelerated; every hit re-verified.
inline recurrence_ladder build_ladder(const past_window& past, const partition_scheme& scheme) {
    return detail::build_ladder_impl<true>(past, scheme,
                                           std::numeric_limits<std::int64_t>::max());
}

// Same, truncated after max_stages completed stages; cheaper when a caller
// only needs the early part of the ladder.
inline recurrence_ladder build_ladder(const past_window& past, const partition_scheme& scheme,
                                      std::int64_t max_stages) {
    if (max_stages < 0) throw std::invalid_argument("build_ladder: negative stage cap");
    return detail::build_ladder_impl<true>(past, scheme, max_stages);
}

// Reference implementation: identical contract, plain windowed comparison.
inline recurrence_ladder naive_ladder(const past_window& past, const partition_scheme& scheme) {
    return detail::build_ladder_impl<false>(past, scheme,
                                            std::numeric_limits<std::int64_t>::max());
}

// The sample multiset (X_{-tau_1}, ..., X_{-tau_kappa}) in ladder order.
inline std::vector<double> matched_samples(const recurrence_ladder& ladder,
                                           const past_window& past) {
    std::vector<double> out;
    out.reserve(ladder.taus.size());
    for (std::int64_t tau : ladder.taus) out.push_back(past.at_neg(tau));
    return out;
}

}  // namespace recur
