#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "foamlab/game.hpp"

using namespace foamlab;

TEST_CASE("instance validation")
{
    CHECK_THROWS_AS(GameInstance({4, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(GameInstance({1, 1}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(GameInstance({3, 0}).validate(), std::invalid_argument);
    CHECK(GameInstance{5, 3}.state_count() == 125);
    CHECK_THROWS_AS(GameInstance({101, 10}).state_count(1000000), ResourceLimitError);
}

TEST_CASE("judge")
{
    const GameInstance g{5, 2};
    CHECK(judge(g, {0, 1}, {1, 1}, {0, 1}, {1, 1}));
    CHECK_FALSE(judge(g, {0, 1}, {1, 1}, {0, 1}, {0, 1}));
    CHECK_FALSE(judge(g, {0, 1}, {0, 1}, {0, 1}, {0, 0}));
    // Symmetric in the two players.
    CHECK(judge(g, {1, 1}, {0, 1}, {1, 1}, {0, 1}));
    CHECK_THROWS_AS(judge(g, {0}, {0, 1}, {0, 1}, {0, 1}), std::invalid_argument);
}

TEST_CASE("challenge distribution")
{
    const GameInstance g{5, 1};
    Rng rng(3, 0);
    const int draws = 200000;
    std::vector<int> moves(3, 0), xs(5, 0);
    for (int k = 0; k < draws; ++k) {
        const auto c = sample_challenge(g, rng);
        ++xs[c.x[0]];
        const int d = (c.y[0] - c.x[0] + 5) % 5;
        REQUIRE((d == 0 || d == 1 || d == 4));
        ++moves[d == 0 ? 1 : d == 1 ? 2 : 0];
    }
    auto near = [&](int count, double p) {
        return std::abs(count / double(draws) - p) < 4 * std::sqrt(p * (1 - p) / draws);
    };
    CHECK(near(moves[0], 0.25));
    CHECK(near(moves[1], 0.5));
    CHECK(near(moves[2], 0.25));
    for (int v : xs)
        CHECK(near(v, 0.2));
}

TEST_CASE("challenge codes round trip")
{
    const GameInstance g{5, 3};
    for (std::int64_t code = 0; code < 125; ++code)
        CHECK(challenge_code(g, challenge_from_code(g, code)) == code);
}

TEST_CASE("rational arithmetic")
{
    const auto a = Rational::make(10, -12);
    CHECK(a.num == -5);
    CHECK(a.den == 6);
    CHECK((Rational::make(5, 6) * Rational::make(5, 6)).str() == "25/36");
    CHECK((Rational::make(5, 6) - Rational::make(1, 3)).str() == "1/2");
    CHECK(Rational::make(2, 3) < Rational::make(5, 6));
    CHECK_THROWS_AS(Rational::make(1, 0), std::domain_error);
}

TEST_CASE("exact values of simple strategies")
{
    for (int n : {3, 5, 7}) {
        const GameInstance g{n, 1};
        CHECK(exact_value(g, ConstantStrategy(0)) == Rational::make(1, 2));
        CHECK(exact_value(g, ParityStrategy()) == Rational::make(2 * n - 1, 2 * n));
    }
    // Parity fails independently per coordinate.
    const GameInstance g{3, 2};
    CHECK(exact_value(g, ParityStrategy()) == Rational::make(25, 36));
}

TEST_CASE("strategy space size")
{
    // t = 1: one bit per vertex.
    CHECK(SymmetricStrategySpace({5, 1}).bits() == 5);
    // t = 2, n = 3: orbits {a,a} give 1 bit, {a<b} give 2 bits.
    CHECK(SymmetricStrategySpace({3, 2}).bits() == 3 + 3 * 2);
    CHECK_THROWS_AS(SymmetricStrategySpace({7, 3}), ResourceLimitError);
}

TEST_CASE("symmetric strategies are symmetric")
{
    const GameInstance g{3, 2};
    const SymmetricStrategySpace space(g);
    for (std::uint64_t mask : {0ULL, 5ULL, 77ULL, 300ULL, 511ULL}) {
        const auto s = space.strategy(mask);
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                const auto ab = *s.answer({a, b});
                const auto ba = *s.answer({b, a});
                CHECK(ab[0] == ba[1]);
                CHECK(ab[1] == ba[0]);
            }
    }
}

TEST_CASE("brute force values")
{
    const auto v31 = brute_force({3, 1});
    CHECK(v31.value == Rational::make(5, 6));
    CHECK(v31.strategies == 8);
    CHECK(brute_force_value(5, 1) == Rational::make(9, 10));
    CHECK(brute_force_value(7, 1) == Rational::make(13, 14));

    const auto v32 = brute_force({3, 2});
    const auto square = Rational::make(5, 6) * Rational::make(5, 6);
    CHECK_FALSE(v32.value < square);
    CHECK_FALSE(v32.value < Rational::make(2, 3));
    // The reported mask attains the reported value.
    const SymmetricStrategySpace space({3, 2});
    CHECK(exact_value({3, 2}, space.strategy(v32.best_mask)) == v32.value);
}

TEST_CASE("strategy rounding")
{
    const GameInstance g{3, 1};
    const ConstantStrategy zero(0);
    const StrategyRounding r(g, zero);
    for (std::int64_t i = -6; i <= 6; ++i) {
        const std::int64_t rem = ((i % 3) + 3) % 3;
        const std::vector<std::int64_t> x{i};
        CHECK(r.round(x)[0] == rem % 2 + (i - rem) / 3);
    }
    // Equivariance under integer shifts z: X + n z rounds to R(X) + z.
    const GameInstance g2{5, 2};
    const ParityStrategy parity;
    const StrategyRounding r2(g2, parity);
    for (std::int64_t a = -5; a < 10; ++a)
        for (std::int64_t b = -5; b < 10; ++b) {
            const std::vector<std::int64_t> x{a, b}, shifted{a + 10, b - 5};
            const auto rx = r2.round(x);
            const auto rs = r2.round(shifted);
            CHECK(rs[0] == rx[0] + 2);
            CHECK(rs[1] == rx[1] - 1);
        }
}

TEST_CASE("constant strategy rounding on C_3")
{
    // R(i/3) = i mod 2 for i in {0,1,2}.
    const GameInstance g{3, 1};
    const ConstantStrategy zero(0);
    const StrategyRounding r(g, zero);
    for (std::int64_t i = 0; i < 3; ++i) {
        const std::vector<std::int64_t> x{i};
        CHECK(r.round(x)[0] == i % 2);
    }
}

TEST_CASE("equivalence for natural strategies")
{
    for (int n : {3, 5}) {
        for (int t : {1, 2}) {
            const GameInstance g{n, t};
            const ConstantStrategy zero(0), one(1);
            const ParityStrategy parity;
            for (const SymStrategy* s : {static_cast<const SymStrategy*>(&zero), static_cast<const SymStrategy*>(&one),
                                         static_cast<const SymStrategy*>(&parity)}) {
                const auto rep = check_equivalence(g, *s);
                CHECK(rep.counterexamples == 0);
                CHECK(rep.parity_counterexamples == 0);
            }
        }
    }
}

TEST_CASE("equivalence over all strategies")
{
    const auto rep = check_equivalence_all({3, 1});
    CHECK(rep.strategies == 8);
    CHECK(rep.pairs == 8 * 9);
    CHECK(rep.parity_counterexamples == 0);
    // The wrap edge: A = (1,0,0) at x = 2/3 moving up succeeds but R jumps by 2.
    CHECK(rep.counterexamples > 0);
    CHECK_FALSE(rep.first_counterexample.empty());

    const auto rep2 = check_equivalence_all({3, 2});
    CHECK(rep2.parity_counterexamples == 0);
}

TEST_CASE("monte carlo values")
{
    const auto e0 = evaluate_strategy({5, 1}, ConstantStrategy(0), 100000, 4);
    CHECK(std::abs(e0.success.value - 0.5) < 4 * e0.success.std_error);
    const auto ep = evaluate_strategy({5, 1}, ParityStrategy(), 100000, 5);
    CHECK(std::abs(ep.success.value - 0.9) < 4 * ep.success.std_error);
    CHECK(ep.answer_abort_rate.value == 0.0);

    const GameInstance g{3, 2};
    const SymmetricStrategySpace space(g);
    const auto s = space.strategy(123);
    const double exact = exact_value(g, s).value();
    const auto mc = evaluate_strategy(g, s, 200000, 6);
    CHECK(std::abs(mc.success.value - exact) < 4 * mc.success.std_error);
}

TEST_CASE("monte carlo is independent of workers")
{
    const GameInstance g{5, 2};
    const auto a = evaluate_strategy(g, ParityStrategy(), 20000, 7, 1);
    const auto b = evaluate_strategy(g, ParityStrategy(), 20000, 7, 3);
    CHECK(a.success.value == b.success.value);
}

TEST_CASE("default k")
{
    CHECK(next_prime_at_least(4) == 5);
    CHECK(next_prime_at_least(2) == 2);
    CHECK(next_prime_at_least(0) == 2);
    CHECK(default_k(15, 4) == 5);
    CHECK(default_k(15, 1) == 2);
    const auto f = game_step(15, 5);
    CHECK(f.step == doctest::Approx(5.0 / 15));
}

TEST_CASE("cube tiling strategy is parity")
{
    const GameInstance g{5, 1};
    const TilingStrategy s(std::make_shared<CubeBody>(1), g, 200, 1);
    CHECK(exact_value(g, s) == Rational::make(9, 10));
    CHECK(s.cached_boxes() == 5);

    auto label = box_majority(CubeBody(2), 5, std::vector<int>{3, 1}, 200, 1.0, 0);
    REQUIRE(label.has_value());
    CHECK(*label == LatticeVector{0, 0});
}

TEST_CASE("symmetric tiling strategy")
{
    const int t = 4;
    const GameInstance g{15, t};
    auto body = std::make_shared<SymmetricBody>(TilingParams::small_dimension(t, 9));
    const TilingStrategy s(body, g, 400, 2);
    // Permuted challenges give permuted answers.
    Rng rng(11, 0);
    for (int k = 0; k < 50; ++k) {
        Challenge x(t);
        for (auto& v : x)
            v = static_cast<int>(rng.below(15));
        const Challenge y{x[2], x[0], x[3], x[1]};
        const auto ax = s.answer(x);
        const auto ay = s.answer(y);
        REQUIRE(ax.has_value() == ay.has_value());
        if (ax) {
            CHECK((*ay)[0] == (*ax)[2]);
            CHECK((*ay)[1] == (*ax)[0]);
            CHECK((*ay)[2] == (*ax)[3]);
            CHECK((*ay)[3] == (*ax)[1]);
        }
    }
    const auto ev = evaluate_strategy(g, s, 5000, 3);
    CHECK(ev.success.value > 0.0);
    CHECK(ev.challenge_abort_rate.value <= 2 * ev.answer_abort_rate.value + 1e-12);
}

TEST_CASE("decency probe")
{
    const int t = 3;
    const SymmetricBody body(TilingParams::small_dimension(t, 4));
    Rng rng(5, 0);
    std::vector<double> raw(t);
    for (auto& v : raw)
        v = rng.uniform();
    const auto x = mod_cell(body, raw);
    const std::vector<int> none(t, 0);
    CHECK(decency_probe(body, 15, x, none, 5, 1000, 1).value == 0.0);
    const std::vector<int> bad{2, 0, 0};
    CHECK_THROWS_AS(decency_probe(body, 15, x, bad, 5, 1000, 1), std::invalid_argument);

    const auto agg = decency_aggregate(body, 15, 5, 4000, 4, 8);
    CHECK(agg.mean_probe.value <= 2 * (agg.eta_marginal.value + agg.delta_marginal.value) +
                                      3 * (agg.mean_probe.std_error + 2 * agg.eta_marginal.std_error +
                                           2 * agg.delta_marginal.std_error));
    // A k-fold needle escapes at most k times as often as a single step.
    CHECK(agg.delta_marginal.value <= 5 * agg.eta_marginal.value + 3 * agg.delta_marginal.std_error);
}

TEST_CASE("indecisive rate is deterministic")
{
    const SymmetricBody body(TilingParams::small_dimension(3, 4));
    const auto a = indecisive_box_rate(body, 15, 300, 200, 2.0 / 3.0, 9, 1);
    const auto b = indecisive_box_rate(body, 15, 300, 200, 2.0 / 3.0, 9, 2);
    CHECK(a.value == b.value);
    CHECK(a.value < 1.0);
}
