#include <doctest.h>

#include <cmath>
#include <vector>

#include "foamlab/needle.hpp"
#include "oracles.hpp"

using namespace foamlab;

TEST_CASE("bernoulli step frequencies")
{
    const auto fam = StepFamily::bernoulli(0.25, 8);
    Rng rng(1, 0);
    const int draws = 1000000;
    int plus = 0, minus = 0;
    std::vector<double> u(1);
    for (int k = 0; k < draws; ++k) {
        sample_step(fam, rng, u);
        plus += u[0] == 0.125;
        minus += u[0] == -0.125;
    }
    const double se = std::sqrt(0.25 * 0.75 / draws);
    CHECK(std::abs(plus / double(draws) - 0.25) < 3 * se);
    CHECK(std::abs(minus / double(draws) - 0.25) < 3 * se);
    CHECK_THROWS_AS(StepFamily::bernoulli(0.6, 3), std::invalid_argument);
    CHECK_THROWS_AS(StepFamily::gaussian(0.0), std::invalid_argument);
}

TEST_CASE("disjoint bernoulli pairs")
{
    const auto fam = StepFamily::disjoint_bernoulli(0.25, 5);
    Rng rng(2, 0);
    const int draws = 200000;
    std::vector<int> hist(3, 0);
    for (int k = 0; k < draws; ++k) {
        const auto [u1, u2] = sample_disjoint_step(fam, 1, rng);
        REQUIRE((u1[0] == 0.0 || u2[0] == 0.0));
        const double s = u1[0] + u2[0];
        ++hist[s > 0 ? 2 : s < 0 ? 0 : 1];
    }
    const double p[3] = {0.25, 0.5, 0.25};
    for (int b = 0; b < 3; ++b) {
        const double se = std::sqrt(p[b] * (1 - p[b]) / draws);
        CHECK(std::abs(hist[b] / double(draws) - p[b]) < 3 * se);
    }
}

TEST_CASE("cube noise sensitivity matches quadrature")
{
    const CubeBody cube(256);
    const double sigma = 1e-3;
    const auto rep = estimate_noise_sensitivity(cube, StepFamily::gaussian(sigma), 20000, 5, 1);
    const double expect = oracle::cube_noise_sensitivity(256, sigma);
    CHECK(std::abs(rep.ns.value - expect) < 3 * rep.ns.std_error);
    CHECK_FALSE(rep.condition_failure.has_value());
    CHECK(rep.budget_errors == 0);
    CHECK_THROWS_AS(estimate_noise_sensitivity(cube, StepFamily::gaussian(sigma), 10, 5), std::invalid_argument);
}

TEST_CASE("noise sensitivity vanishes with sigma")
{
    const CubeBody cube(64);
    const SymmetricBody sym(TilingParams::standard(64, 3));
    for (const TilingBody* body : {static_cast<const TilingBody*>(&cube), static_cast<const TilingBody*>(&sym)}) {
        double prev = 2.0;
        for (double sigma : {1e-2, 1e-3, 1e-4}) {
            const auto r = estimate_noise_sensitivity(*body, StepFamily::gaussian(sigma), 4000, 8, 1);
            CHECK(r.ns.value < prev);
            prev = r.ns.value;
        }
        CHECK(prev < 0.02);
    }
}

TEST_CASE("escape with one subdivision is endpoint sensitivity")
{
    const SymmetricBody sym(TilingParams::standard(64, 3));
    const auto fam = StepFamily::gaussian(3e-3);
    const auto ns = estimate_noise_sensitivity(sym, fam, 3000, 17, 1);
    const auto e1 = estimate_escape(sym, fam, 3000, 1, 17, 1);
    CHECK(ns.ns.value == e1.value);
    REQUIRE(ns.condition_failure);
    CHECK(ns.condition_failure->value >= 0.0);
}

TEST_CASE("escape is monotone in the subdivision")
{
    const SymmetricBody sym(TilingParams::standard(64, 4));
    double prev = 0.0;
    for (int k : {1, 2, 8, 32}) {
        const auto e = estimate_escape(sym, 0.02, 2000, k, 6, 1);
        CHECK(e.value >= prev);
        prev = e.value;
    }
}

TEST_CASE("cube escape at the needle scale")
{
    const int n = 256;
    const double sigma = std::sqrt(std::log(double(n))) / n;
    const auto e = estimate_escape(CubeBody(n), sigma, 4000, 8, 2, 1);
    const double expect = oracle::cube_noise_sensitivity(n, sigma);
    CHECK(e.value >= 0.5);
    CHECK(std::abs(e.value - expect) < 3 * e.std_error);
}

TEST_CASE("crossing counts")
{
    const CubeBody line(1);
    CHECK(count_crossings(line, std::vector<double>{0.5}, std::vector<double>{1.0}, 8) == 1);
    CHECK(count_crossings(line, std::vector<double>{0.5}, std::vector<double>{0.1}, 8) == 0);
    CHECK(count_crossings(line, std::vector<double>{0.5}, std::vector<double>{2.0}, 8) == 2);

    const SymmetricBody sym(TilingParams::standard(32, 1));
    Rng rng(9, 0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> x(32), u(32);
        for (int i = 0; i < 32; ++i) {
            x[i] = rng.uniform();
            u[i] = rng.normal(0.05);
        }
        int prev = 0;
        for (int k : {1, 2, 4, 8, 16}) {
            const int c = count_crossings(sym, x, u, k);
            CHECK(c >= prev);
            prev = c;
        }
    }
}

TEST_CASE("cube surface area calibration")
{
    const int n = 32;
    const double d1 = 1e-6, d2 = 1e-5;
    const CubeBody cube(n);
    const auto self = estimate_surface_area(cube, d1, 50000, 8, 3, 1);
    CHECK(self.area.value == doctest::Approx(2.0 * n).epsilon(1e-12));
    // the analytic needle constant for Gaussian needles is 1/sqrt(2 pi)
    CHECK(std::abs(self.calibration_constant - 1.0 / std::sqrt(2 * 3.14159265358979)) < 0.05);

    const auto c1 = calibrate_on_cube(n, d1, 50000, 8, 3, 1);
    const auto other = estimate_surface_area(cube, d2, 20000, 8, 4, 1, c1);
    CHECK(std::abs(other.area.value / (2.0 * n) - 1.0) < 0.1);

    // crossings scale like sqrt(delta)
    const double ratio = other.mean_crossings.value / self.mean_crossings.value;
    CHECK(std::abs(ratio - std::sqrt(10.0)) < 3 * ratio * std::hypot(other.mean_crossings.std_error / other.mean_crossings.value,
                                                                      self.mean_crossings.std_error / self.mean_crossings.value));
}

TEST_CASE("estimates do not depend on the worker count")
{
    const SymmetricBody sym(TilingParams::standard(64, 12));
    const auto fam = StepFamily::gaussian(5e-3);
    const auto a = estimate_noise_sensitivity(sym, fam, 3000, 44, 1);
    const auto b = estimate_noise_sensitivity(sym, fam, 3000, 44, 3);
    CHECK(a.ns.value == b.ns.value);
    CHECK(a.condition_failure->value == b.condition_failure->value);
    const auto s1 = estimate_surface_area(sym, 1e-4, 2000, 8, 4, 1);
    const auto s2 = estimate_surface_area(sym, 1e-4, 2000, 8, 4, 4);
    CHECK(s1.area.value == s2.area.value);
    CHECK(s1.area.std_error == s2.area.std_error);
}

TEST_CASE("proportion estimate")
{
    const auto e = proportion_estimate(25, 100, 1);
    CHECK(e.value == 0.25);
    CHECK(e.std_error == doctest::Approx(std::sqrt(0.25 * 0.75 / 100)));
    CHECK(e.n_samples == 100);
}
