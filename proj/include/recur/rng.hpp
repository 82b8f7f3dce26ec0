#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>
#include <vector>

namespace recur {

// splitmix64 output/finalizer step; the basis of all seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derive a task seed from the master seed and a path of stream ids.
// Documented contract: state starts at the master seed and absorbs each id
// via state = mix64(state ^ id); the final state is the derived seed.
// Identical (master, ids) always yields the identical engine stream.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
    std::uint64_t s = mix64(master);
    for (std::uint64_t id : ids) s = mix64(s ^ id);
    return s;
}

// Stream ids for the experiment drivers (part of the reproducibility contract).
namespace stream {
inline constexpr std::uint64_t consistency = 1;
inline constexpr std::uint64_t identity_check = 2;
inline constexpr std::uint64_t online = 3;
inline constexpr std::uint64_t classification = 4;
inline constexpr std::uint64_t equivalence = 5;
}  // namespace stream

// Seedable generator with explicitly pinned distributions. The standard
// library's distribution objects are implementation-defined, so uniform,
// normal and discrete draws are spelled out here to keep output streams
// stable for a given compiler/platform.
class rng {
  public:
    explicit rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t raw() { return eng_(); }

    // Uniform on [0, 1): top 53 bits of the engine output.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    bool bernoulli(double p) { return uniform01() < p; }

    // Uniform integer in [0, n); n is expected to be tiny (process state
    // counts), so the floor method's bias is negligible and deterministic.
    std::int64_t uniform_int(std::int64_t n) {
        if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
        auto v = static_cast<std::int64_t>(uniform01() * static_cast<double>(n));
        return v >= n ? n - 1 : v;
    }

    // Standard normal via Box-Muller; the second deviate of each pair is
    // cached so draws come in a fixed order.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u = uniform01();
        if (u <= 0.0) u = 0x1.0p-53;
        const double v = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u));
        const double theta = 2.0 * 3.141592653589793238462643383279502884 * v;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

    // Sample an index from a pmf by CDF inversion on one uniform draw.
    std::size_t discrete(const std::vector<double>& pmf) {
        const double u = uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i + 1 < pmf.size(); ++i) {
            acc += pmf[i];
            if (u < acc) return i;
        }
        return pmf.empty() ? throw std::invalid_argument("discrete: empty pmf")
                           : pmf.size() - 1;
    }

  private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace recur
