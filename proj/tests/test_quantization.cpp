#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "recur/quantization.hpp"

using recur::cell_id;
using recur::partition_scheme;

TEST_CASE("dyadic level sizes and breakpoints") {
    const auto s = partition_scheme::dyadic();
    REQUIRE(s.level_size(1) == 6);
    REQUIRE(s.level_size(2) == 18);

    // level 1 cells: (-inf,-1], (-1,-0.5], (-0.5,0], (0,0.5], (0.5,1], (1,inf)
    const auto b0 = s.cell_bounds({1, 0});
    REQUIRE(std::isinf(b0.first));
    REQUIRE(b0.second == -1.0);
    REQUIRE(s.cell_bounds({1, 1}) == std::pair(-1.0, -0.5));
    REQUIRE(s.cell_bounds({1, 3}) == std::pair(0.0, 0.5));
    const auto b5 = s.cell_bounds({1, 5});
    REQUIRE(b5.first == 1.0);
    REQUIRE(std::isinf(b5.second));
}

TEST_CASE("dyadic quantize basics") {
    const auto s = partition_scheme::dyadic();
    REQUIRE(s.quantize(1, 0.3).index == 3);
    SECTION("boundary value closes its cell on the right") {
        REQUIRE(s.quantize(1, 0.5).index == 3);
        REQUIRE(s.quantize(1, 0.0).index == 2);
        REQUIRE(s.quantize(1, -1.0).index == 0);
    }
    SECTION("values beyond the covered range land in tail cells") {
        REQUIRE(s.quantize(1, 7.0).index == 5);
        REQUIRE(s.quantize(1, -7.0).index == 0);
        REQUIRE(s.quantize(1, std::numeric_limits<double>::infinity()).index == 5);
        REQUIRE(s.quantize(1, -std::numeric_limits<double>::infinity()).index == 0);
    }
    SECTION("level 2 cell of 0.3 is (0.25, 0.5]") {
        const auto c = s.quantize(2, 0.3);
        REQUIRE(s.cell_bounds(c) == std::pair(0.25, 0.5));
    }
    SECTION("NaN has no cell") {
        REQUIRE_THROWS_AS(s.quantize(1, std::nan("")), std::domain_error);
    }
}

TEST_CASE("dyadic refinement: deeper cells are nested") {
    const auto s = partition_scheme::dyadic();
    // the level-(k+1) cell of x must sit inside the level-k cell of x
    for (int k = 1; k <= 6; ++k) {
        for (double x : {-3.7, -1.0, -0.51, -0.5, 0.0, 0.125, 0.3, 0.5, 0.9999, 2.5, 41.0}) {
            const auto outer = s.cell_bounds(s.quantize(k, x));
            const auto inner = s.cell_bounds(s.quantize(k + 1, x));
            REQUIRE(inner.first >= outer.first);
            REQUIRE(inner.second <= outer.second);
        }
    }
}

TEST_CASE("dyadic separation and shrinking width") {
    const auto s = partition_scheme::dyadic();
    for (int k = 1; k <= 8; ++k) {
        const double w = std::ldexp(1.0, -k);
        // points further apart than one cell width inside [-k, k] must split
        for (double x : {-0.75, -0.25, 0.1, 0.45}) {
            const double y = x + w * 1.01;
            REQUIRE(s.quantize(k, x).index != s.quantize(k, y).index);
        }
        const auto bounds = s.cell_bounds(s.quantize(k, 0.1));
        REQUIRE(bounds.second - bounds.first == w);
    }
}

TEST_CASE("quantize_window maps elementwise") {
    const auto s = partition_scheme::dyadic();
    const auto cells = s.quantize_window(1, {0.3, 0.5, 7.0});
    REQUIRE(cells.size() == 3);
    REQUIRE(cells[0].index == 3);
    REQUIRE(cells[1].index == 3);
    REQUIRE(cells[2].index == 5);
    REQUIRE_THROWS_AS(s.quantize_window(1, {}), std::invalid_argument);
}

TEST_CASE("alphabet scheme is the identity at every level") {
    const auto s = partition_scheme::alphabet(3);
    REQUIRE(s.is_alphabet());
    REQUIRE(s.level_size(1) == 3);
    REQUIRE(s.level_size(9) == 3);
    for (int k : {1, 2, 17}) {
        REQUIRE(s.quantize(k, 0.0).index == 0);
        REQUIRE(s.quantize(k, 2.0).index == 2);
    }
    REQUIRE_THROWS_AS(s.quantize(1, 3.0), std::domain_error);
    REQUIRE_THROWS_AS(s.quantize(1, 0.5), std::domain_error);
    REQUIRE_THROWS_AS(s.quantize(1, -1.0), std::domain_error);
    REQUIRE_THROWS_AS(partition_scheme::alphabet(0), std::invalid_argument);
}

TEST_CASE("level bounds are enforced") {
    const auto d = partition_scheme::dyadic();
    REQUIRE_THROWS_AS(d.quantize(0, 0.5), std::invalid_argument);
    REQUIRE_THROWS_AS(d.quantize(partition_scheme::dyadic_max_level + 1, 0.5),
                      std::invalid_argument);
    REQUIRE(d.quantize(partition_scheme::dyadic_max_level, 0.5).level ==
            partition_scheme::dyadic_max_level);
}
