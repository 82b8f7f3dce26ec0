#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "recur/recurrence.hpp"
#include "recur/rng.hpp"

using recur::build_ladder;
using recur::matched_samples;
using recur::naive_ladder;
using recur::next_recurrence;
using recur::partition_scheme;
using recur::past_window;

namespace {
past_window win(std::vector<double> v) { return past_window{std::move(v)}; }
}  // namespace

TEST_CASE("single recurrence search on the worked example") {
    const auto s = partition_scheme::alphabet(2);
    const auto past = win({1, 0, 1, 1, 0, 1});
    SECTION("pattern of length 1: the last symbol 1 recurs two steps back") {
        REQUIRE(next_recurrence(past, s, 1, 1) == 2);
    }
    SECTION("pattern (1,0,1): shifts 1 and 2 miss, shift 3 hits") {
        REQUIRE(next_recurrence(past, s, 2, 3) == 3);
    }
    SECTION("constant window recurs at every shift, so tau = 1") {
        REQUIRE(next_recurrence(win({0, 0, 0, 0, 0}), s, 1, 3) == 1);
    }
    SECTION("no recurrence inside the window is not an error") {
        REQUIRE_FALSE(next_recurrence(win({0, 0, 1}), s, 1, 1).has_value());
    }
    SECTION("preconditions") {
        REQUIRE_THROWS_AS(next_recurrence(past, s, 1, 0), std::invalid_argument);
        REQUIRE_THROWS_AS(next_recurrence(win({1}), s, 1, 2), std::invalid_argument);
    }
}

TEST_CASE("full ladder on the worked example") {
    const auto s = partition_scheme::alphabet(2);
    const auto ladder = build_ladder(win({1, 0, 1, 1, 0, 1}), s);
    REQUIRE(ladder.taus == std::vector<std::int64_t>{2, 3});
    REQUIRE(ladder.lambdas == std::vector<std::int64_t>{1, 3, 6});
    REQUIRE(ladder.matched_indices == std::vector<std::int64_t>{-2, -3});
    REQUIRE(ladder.kappa() == 2);
    REQUIRE(matched_samples(ladder, win({1, 0, 1, 1, 0, 1})) == std::vector<double>{0, 1});
}

TEST_CASE("shorter window truncates the ladder") {
    const auto s = partition_scheme::alphabet(2);
    const auto ladder = build_ladder(win({0, 1, 1, 0, 1}), s);
    // the second stage would need lambda_2 = 6 > 5, so kappa = 1
    REQUIRE(ladder.taus == std::vector<std::int64_t>{2});
    REQUIRE(ladder.kappa() == 1);
}

TEST_CASE("alternating past gives tau = 2 at every stage") {
    const auto s = partition_scheme::alphabet(2);
    const auto past = win({0, 1, 0, 1, 0, 1, 0, 1});
    const auto ladder = build_ladder(past, s);
    REQUIRE(ladder.kappa() == 3);
    for (std::size_t j = 0; j < ladder.taus.size(); ++j) {
        REQUIRE(ladder.taus[j] == 2);
        REQUIRE(ladder.lambdas[j + 1] == 2 * static_cast<std::int64_t>(j + 1) + 1);
    }
    for (double x : matched_samples(ladder, past)) REQUIRE(x == 0.0);
}

TEST_CASE("degenerate windows") {
    const auto s = partition_scheme::alphabet(2);
    REQUIRE(build_ladder(win({1}), s).kappa() == 0);
    REQUIRE(build_ladder(win({0, 1}), s).kappa() == 0);  // 1 never recurs
    REQUIRE_THROWS_AS(build_ladder(win({}), s), std::invalid_argument);
    REQUIRE(matched_samples(build_ladder(win({1}), s), win({1})).empty());
}

TEST_CASE("ladder accounting invariants on random strings") {
    const auto s = partition_scheme::alphabet(2);
    recur::rng r(20240817);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = 8 + r.uniform_int(120);
        std::vector<double> v(static_cast<std::size_t>(n));
        for (auto& x : v) x = r.bernoulli(0.5) ? 1.0 : 0.0;
        const auto ladder = build_ladder(win(v), s);

        std::int64_t lam = 1;
        for (std::size_t j = 0; j < ladder.taus.size(); ++j) {
            REQUIRE(ladder.taus[j] >= 1);
            lam += ladder.taus[j];
            REQUIRE(ladder.lambdas[j + 1] == lam);       // lambda recursion
            REQUIRE(ladder.lambdas[j + 1] > ladder.lambdas[j]);
            REQUIRE(lam <= n);                           // kappa_t cap
        }
        // minimality: no smaller shift matches at any stage
        for (std::size_t j = 0; j < ladder.taus.size(); ++j) {
            const auto lp = ladder.lambdas[j];
            for (std::int64_t t = 1; t < ladder.taus[j]; ++t) {
                bool match = true;
                for (std::int64_t i = 0; i < lp && match; ++i)
                    if (v[static_cast<std::size_t>(n - lp - t + i)] !=
                        v[static_cast<std::size_t>(n - lp + i)])
                        match = false;
                REQUIRE_FALSE(match);
            }
        }
    }
}

TEST_CASE("extending the past on the left only appends stages") {
    const auto s = partition_scheme::alphabet(2);
    recur::rng r(77);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> v(200);
        for (auto& x : v) x = r.bernoulli(0.4) ? 1.0 : 0.0;
        const auto full = build_ladder(win(v), s);
        const auto part = build_ladder(win({v.end() - 80, v.end()}), s);
        REQUIRE(part.kappa() <= full.kappa());
        for (std::size_t j = 0; j < part.taus.size(); ++j)
            REQUIRE(part.taus[j] == full.taus[j]);
        // the first stage the short window misses must overflow its length
        if (part.kappa() < full.kappa())
            REQUIRE(full.lambdas[static_cast<std::size_t>(part.kappa()) + 1] > 80);
    }
}

TEST_CASE("hashed and naive backends agree on real-valued data") {
    const auto s = partition_scheme::dyadic();
    recur::rng r(4242);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(8 + r.uniform_int(200)));
        // palette data forces deep ladders with repeated cells
        std::vector<double> palette{-0.375, 0.25, 0.125, 1.5};
        for (auto& x : v) x = palette[static_cast<std::size_t>(r.uniform_int(4))];
        const auto a = build_ladder(win(v), s);
        const auto b = naive_ladder(win(v), s);
        REQUIRE(a.taus == b.taus);
        REQUIRE(a.lambdas == b.lambdas);
    }
}

TEST_CASE("stage cap truncates the ladder without changing its prefix") {
    const auto s = partition_scheme::alphabet(2);
    recur::rng r(99);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> v(static_cast<std::size_t>(16 + r.uniform_int(120)));
        for (auto& x : v) x = r.bernoulli(0.5) ? 1.0 : 0.0;
        const auto full = build_ladder(win(v), s);
        for (const std::int64_t cap : {0, 1, 2, 5}) {
            const auto part = build_ladder(win(v), s, cap);
            REQUIRE(part.kappa() == std::min(cap, full.kappa()));
            for (std::int64_t j = 0; j < part.kappa(); ++j) {
                REQUIRE(part.taus[static_cast<std::size_t>(j)] ==
                        full.taus[static_cast<std::size_t>(j)]);
                REQUIRE(part.lambdas[static_cast<std::size_t>(j) + 1] ==
                        full.lambdas[static_cast<std::size_t>(j) + 1]);
            }
        }
    }
    REQUIRE_THROWS_AS(build_ladder(win({1.0, 0.0}), s, -1), std::invalid_argument);
}

TEST_CASE("dyadic depth cap stops constant inputs gracefully") {
    const auto s = partition_scheme::dyadic();
    const past_window past{std::vector<double>(100, 0.7)};
    const auto ladder = build_ladder(past, s);
    // constant data recurs at every stage until the scheme runs out of levels
    REQUIRE(ladder.kappa() == partition_scheme::dyadic_max_level);
    for (const auto t : ladder.taus) REQUIRE(t == 1);
}
