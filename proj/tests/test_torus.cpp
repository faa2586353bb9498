#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "foamlab/torus.hpp"
#include "oracles.hpp"

using namespace foamlab;

TEST_CASE("frac maps into [0,1)")
{
    CHECK(frac(1.25) == 0.25);
    CHECK(frac(-0.25) == 0.75);
    CHECK(frac(3.0) == 0.0);
    const double tiny = frac(-1e-20);
    CHECK(tiny < 1.0);
    CHECK(tiny > 0.5);
    CHECK_THROWS_AS(frac(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(frac(INFINITY), std::domain_error);
}

TEST_CASE("gap distance agrees with the exhaustive shift scan")
{
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    for (int k = 0; k < 20000; ++k) {
        const double x = dist(gen);
        const double y = k % 3 == 0 ? x + std::round(dist(gen)) + dist(gen) * 1e-3 : dist(gen);
        REQUIRE(gap_distance(x, y) == oracle::gap_distance_scan(x, y));
    }
}

TEST_CASE("gap distance special values")
{
    CHECK(gap_distance(0.2, 0.7) == doctest::Approx(0.5));
    CHECK(gap_distance(0.3, 0.3) == 1.0);
    CHECK(gap_distance(0.3, 1.3) == doctest::Approx(0.0));
    CHECK(gap_distance(0.25, 2.0) == doctest::Approx(0.25));
    CHECK(gap_distance(0.0, 0.5) == 0.5);
}

TEST_CASE("gap distance is symmetric and invariant under joint integer shifts")
{
    const double pts[] = {0.125, 0.375, 1.5, -0.75, 2.0625};
    for (double x : pts) {
        for (double y : pts) {
            CHECK(gap_distance(x, y) == gap_distance(y, x));
            for (int k = -3; k <= 3; ++k)
                CHECK(gap_distance(x + k, y + k) == gap_distance(x, y));
            CHECK((gap_distance(x, y) == 1.0) == (x == y));
        }
    }
}

TEST_CASE("gap sign picks the attained sign and prefers +1 on ties")
{
    CHECK(gap_sign(0.2, 0.7) == +1);  // -0.5 + 1
    CHECK(gap_sign(0.7, 0.2) == -1);  // 0.5 - 1
    CHECK(gap_sign(0.3, 0.3) == +1);  // +-1 tie
    CHECK(gap_sign(0.0, 1.5) == +1);  // -1.5 + 2 and -1.5 + 1 tie
    CHECK(gap_sign(0.1, 1.05) == +1); // -0.95 + 1
    CHECK(gap_sign(0.1, 1.15) == -1); // -1.05 + 1
}

TEST_CASE("signed gap value reproduces the distance")
{
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int k = 0; k < 5000; ++k) {
        const double x = dist(gen), y = dist(gen);
        const double d = gap_distance(x, y);
        const int g = gap_sign(x, y);
        // some nonzero integer z has (x - y) + z == g * d
        const double z = g * d - (x - y);
        CHECK(std::abs(z - std::round(z)) < 1e-12);
        CHECK(std::round(z) != 0.0);
    }
}

TEST_CASE("segment level test agrees with a dense lambda grid")
{
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> ux(-2.0, 2.0), ud(-0.3, 0.3), uz(0.01, 0.99);
    int hits = 0;
    for (int k = 0; k < 2000; ++k) {
        const double x = ux(gen), delta = ud(gen), z = uz(gen);
        bool grid = false;
        for (int s = 0; s <= 4096 && !grid; ++s) {
            const double lam = s / 4096.0;
            const double v = x + lam * delta - z;
            if (s > 0) {
                const double prev = x + (s - 1) / 4096.0 * delta - z;
                grid = std::floor(prev) != std::floor(v) || v == std::floor(v) || prev == std::floor(prev);
            }
        }
        CHECK(segment_contains_level(x, delta, z) == grid);
        hits += grid;
    }
    CHECK(hits > 100);
    CHECK(segment_contains_level(0.25, 0.0, 0.25));
    CHECK_FALSE(segment_contains_level(0.2, 0.0, 0.25));
    CHECK(segment_contains_level(0.9, 0.2, 0.05)); // wraps through 1.05
}

TEST_CASE("torus configuration is canonical")
{
    const std::vector<double> raw{1.75, -0.25, 0.5, 3.125};
    auto shuffled = raw;
    std::reverse(shuffled.begin(), shuffled.end());
    const auto a = canonical_config(raw);
    const auto b = canonical_config(shuffled);
    CHECK(a == b);
    CHECK(a.size() == 4);
    CHECK(a[0] == 0.125);
    CHECK(a[3] == 0.75);
    CHECK_THROWS_AS(canonical_config(std::vector<double>{0.5}), std::domain_error);
}
