#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace recur {

// One cell of a level-k partition of the reals. Cells are right semi-closed
// intervals (lo, hi]; index runs over 0 .. level_size(k)-1 from left to right.
struct cell_id {
    int level = 0;
    std::int64_t index = 0;

    friend bool operator==(const cell_id& a, const cell_id& b) {
        return a.level == b.level && a.index == b.index;
    }
    friend bool operator!=(const cell_id& a, const cell_id& b) { return !(a == b); }
};

// A refining sequence of interval partitions with a per-level quantizer.
//
// Two flavours:
//  - dyadic: level k covers [-k, k] with cells of width 2^-k plus two
//    unbounded tail cells. Every level-k breakpoint is a level-(k+1)
//    breakpoint, cell widths shrink to 0 and the covered range grows,
//    so the sequence refines and asymptotically separates all reals.
//  - alphabet(n): inputs are symbols 0..n-1 and every level maps each
//    symbol to its own cell (identity at all levels); used for series
//    that are already discrete.
class partition_scheme {
  public:
    enum class kind_t { dyadic, alphabet };

    // Deepest dyadic level whose cell count and cell indices fit in int64.
    static constexpr int dyadic_max_level = 56;

    static partition_scheme dyadic() { return partition_scheme(kind_t::dyadic, 0); }

    static partition_scheme alphabet(std::int64_t n) {
        if (n < 1) throw std::invalid_argument("alphabet size must be >= 1");
        return partition_scheme(kind_t::alphabet, n);
    }

    kind_t kind() const { return kind_; }
    bool is_alphabet() const { return kind_ == kind_t::alphabet; }
    std::int64_t alphabet_size() const { return alpha_n_; }

    // Largest usable level. Alphabet levels are all identical, so any
    // positive level is valid there.
    int max_level() const {
        return kind_ == kind_t::alphabet ? std::numeric_limits<int>::max()
                                         : dyadic_max_level;
    }

    // Number of cells m_k at level k.
    std::int64_t level_size(int k) const {
        check_level(k);
        if (kind_ == kind_t::alphabet) return alpha_n_;
        // 2k * 2^k interior cells plus two tails.
        return 2 * static_cast<std::int64_t>(k) * (std::int64_t{1} << k) + 2;
    }

    // Map x to its cell at level k. Boundary values belong to the cell they
    // right-close; +-inf land in the tail cells; NaN is rejected.
    cell_id quantize(int k, double x) const {
        check_level(k);
        if (std::isnan(x)) throw std::domain_error("quantize: NaN has no cell");
        if (kind_ == kind_t::alphabet) {
            if (!(x >= 0.0) || !(x < static_cast<double>(alpha_n_)) ||
                x != std::floor(x)) {
                throw std::domain_error("quantize: value is not an alphabet symbol");
            }
            return cell_id{k, static_cast<std::int64_t>(x)};
        }
        const double kd = static_cast<double>(k);
        const std::int64_t half = static_cast<std::int64_t>(k) << k;  // k * 2^k
        if (x <= -kd) return cell_id{k, 0};
        if (x > kd) return cell_id{k, 2 * half + 1};
        // Interior: cell j has bounds (b_{j-1}, b_j], b_j = -k + j*2^-k, so
        // j = ceil(x*2^k) + k*2^k. Scaling by 2^k is exact in binary floating
        // point for the magnitudes admitted above.
        const double scaled = std::ldexp(x, k);
        const auto c = static_cast<std::int64_t>(std::ceil(scaled));
        return cell_id{k, c + half};
    }

    // Elementwise quantize of a window; rejects empty input.
    std::vector<cell_id> quantize_window(int k, const std::vector<double>& window) const {
        if (window.empty()) throw std::invalid_argument("quantize_window: empty window");
        std::vector<cell_id> out;
        out.reserve(window.size());
        for (double x : window) out.push_back(quantize(k, x));
        return out;
    }

    // Bounds (lo, hi] of a cell; tails report -+inf on the open side.
    // Alphabet cells report (v-1, v] around the integer symbol v.
    std::pair<double, double> cell_bounds(const cell_id& c) const {
        check_level(c.level);
        const double inf = std::numeric_limits<double>::infinity();
        if (kind_ == kind_t::alphabet) {
            if (c.index < 0 || c.index >= alpha_n_)
                throw std::out_of_range("cell_bounds: bad alphabet index");
            const auto v = static_cast<double>(c.index);
            return {v - 1.0, v};
        }
        const int k = c.level;
        const std::int64_t m = level_size(k);
        if (c.index < 0 || c.index >= m) throw std::out_of_range("cell_bounds: bad index");
        if (c.index == 0) return {-inf, -static_cast<double>(k)};
        if (c.index == m - 1) return {static_cast<double>(k), inf};
        const std::int64_t half = static_cast<std::int64_t>(k) << k;
        const double lo = std::ldexp(static_cast<double>(c.index - 1 - half), -k);
        return {lo, lo + std::ldexp(1.0, -k)};
    }

  private:
    partition_scheme(kind_t kind, std::int64_t n) : kind_(kind), alpha_n_(n) {}

    void check_level(int k) const {
        if (k < 1) throw std::invalid_argument("partition level must be >= 1");
        if (kind_ == kind_t::dyadic && k > dyadic_max_level)
            throw std::invalid_argument("dyadic level exceeds supported depth");
    }

    kind_t kind_;
    std::int64_t alpha_n_;
};

}  // namespace recur
