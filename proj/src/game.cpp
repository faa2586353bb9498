#include "foamlab/game.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numeric>
#include <sstream>

#include "foamlab/parallel.hpp"

namespace foamlab {

namespace {

std::int64_t floor_div(std::int64_t a, std::int64_t b)
{
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --q;
    return q;
}

int step_of(double r)
{
    return r < 0.25 ? +1 : r < 0.5 ? -1 : 0;
}

std::int64_t int_pow(std::int64_t base, int exp, std::int64_t limit)
{
    std::int64_t v = 1;
    for (int i = 0; i < exp; ++i) {
        if (v > limit / base)
            throw ResourceLimitError("state space exceeds " + std::to_string(limit));
        v *= base;
    }
    return v;
}

std::string join(const auto& v)
{
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < v.size(); ++i)
        os << (i ? "," : "") << static_cast<long long>(v[i]);
    os << ')';
    return os.str();
}

// Iterates u over {-1,0,1}^t in odometer order; returns false after the last one.
bool next_step(std::vector<int>& u)
{
    for (auto& v : u) {
        if (v < 1) {
            ++v;
            return true;
        }
        v = -1;
    }
    return false;
}

std::vector<std::size_t> sorting_permutation(std::span<const int> v)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    return idx;
}

} // namespace

void GameInstance::validate() const
{
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("GameInstance: n must be odd and at least 3");
    if (t < 1)
        throw std::invalid_argument("GameInstance: t must be positive");
}

std::int64_t GameInstance::state_count(std::int64_t limit) const
{
    validate();
    return int_pow(n, t, limit);
}

ChallengePair sample_challenge(const GameInstance& game, Rng& rng)
{
    ChallengePair c{Challenge(game.t), Challenge(game.t)};
    for (int i = 0; i < game.t; ++i) {
        c.x[i] = static_cast<int>(rng.below(static_cast<std::uint64_t>(game.n)));
        c.y[i] = (c.x[i] + step_of(rng.uniform()) + game.n) % game.n;
    }
    return c;
}

bool judge(const GameInstance& game, const Challenge& x, const Challenge& y, const Answer& a, const Answer& b)
{
    const auto t = static_cast<std::size_t>(game.t);
    if (x.size() != t || y.size() != t || a.size() != t || b.size() != t)
        throw std::invalid_argument("judge: size mismatch");
    for (std::size_t i = 0; i < t; ++i)
        if ((x[i] == y[i]) != (a[i] == b[i]))
            return false;
    return true;
}

std::optional<Answer> ParityStrategy::answer(const Challenge& x) const
{
    Answer a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        a[i] = static_cast<std::uint8_t>(x[i] & 1);
    return a;
}

std::int64_t challenge_code(const GameInstance& game, const Challenge& x)
{
    std::int64_t code = 0;
    for (int i = game.t - 1; i >= 0; --i)
        code = code * game.n + x[i];
    return code;
}

Challenge challenge_from_code(const GameInstance& game, std::int64_t code)
{
    Challenge x(game.t);
    for (int i = 0; i < game.t; ++i) {
        x[i] = static_cast<int>(code % game.n);
        code /= game.n;
    }
    return x;
}

TableStrategy::TableStrategy(GameInstance game, std::vector<Answer> table) : game_(game), table_(std::move(table))
{
    if (static_cast<std::int64_t>(table_.size()) != game_.state_count())
        throw std::invalid_argument("TableStrategy: table size must be n^t");
}

std::optional<Answer> TableStrategy::answer(const Challenge& x) const
{
    return table_[challenge_code(game_, x)];
}

SymmetricStrategySpace::SymmetricStrategySpace(const GameInstance& game, int max_bits) : game_(game)
{
    const auto states = game.state_count(3000);
    std::map<std::vector<int>, int> orbit_base;
    bit_index_.resize(states * game.t);
    for (std::int64_t code = 0; code < states; ++code) {
        const auto x = challenge_from_code(game, code);
        auto key = x;
        std::sort(key.begin(), key.end());
        auto [it, fresh] = orbit_base.try_emplace(key, bits_);
        if (fresh)
            bits_ += static_cast<int>(std::unique(key.begin(), key.end()) - key.begin());
        key.erase(std::unique(key.begin(), key.end()), key.end());
        for (int i = 0; i < game.t; ++i) {
            const auto rank = std::lower_bound(key.begin(), key.end(), x[i]) - key.begin();
            bit_index_[code * game.t + i] = static_cast<std::int16_t>(it->second + rank);
        }
        if (bits_ > max_bits)
            throw ResourceLimitError("symmetric strategy space has more than " + std::to_string(max_bits) + " bits");
    }
}

void SymmetricStrategySpace::answers(std::uint64_t mask, std::int64_t code, std::span<std::uint8_t> out) const
{
    for (int i = 0; i < game_.t; ++i)
        out[i] = static_cast<std::uint8_t>((mask >> bit_index_[code * game_.t + i]) & 1);
}

TableStrategy SymmetricStrategySpace::strategy(std::uint64_t mask) const
{
    const auto states = game_.state_count();
    std::vector<Answer> table(states, Answer(game_.t));
    for (std::int64_t code = 0; code < states; ++code)
        answers(mask, code, table[code]);
    return TableStrategy(game_, std::move(table));
}

Rational Rational::make(std::int64_t num, std::int64_t den)
{
    if (den == 0)
        throw std::domain_error("Rational: zero denominator");
    if (den < 0) {
        num = -num;
        den = -den;
    }
    const auto g = std::gcd(num, den);
    return {num / g, den / g};
}

std::string Rational::str() const
{
    return std::to_string(num) + "/" + std::to_string(den);
}

namespace {

Rational from_wide(uint128 mag, bool negative, uint128 den)
{
    // Reduce in 128 bits before narrowing.
    uint128 a = mag, b = den;
    while (b) {
        const uint128 r = a % b;
        a = b;
        b = r;
    }
    const uint128 g = a ? a : 1;
    mag /= g;
    den /= g;
    constexpr uint128 cap = static_cast<uint128>(INT64_MAX);
    if (mag > cap || den > cap)
        throw std::overflow_error("Rational: result does not fit in 64 bits");
    const auto num = static_cast<std::int64_t>(mag);
    return {negative ? -num : num, static_cast<std::int64_t>(den)};
}

uint128 magnitude(std::int64_t v)
{
    return v < 0 ? static_cast<uint128>(-(v + 1)) + 1 : static_cast<uint128>(v);
}

} // namespace

bool operator<(const Rational& a, const Rational& b)
{
    __extension__ using int128 = __int128;
    return static_cast<int128>(a.num) * b.den < static_cast<int128>(b.num) * a.den;
}

Rational operator*(const Rational& a, const Rational& b)
{
    const bool neg = (a.num < 0) != (b.num < 0);
    return from_wide(magnitude(a.num) * magnitude(b.num), neg && a.num != 0 && b.num != 0,
                     static_cast<uint128>(a.den) * static_cast<uint128>(b.den));
}

Rational operator-(const Rational& a, const Rational& b)
{
    __extension__ using int128 = __int128;
    const int128 num = static_cast<int128>(a.num) * b.den - static_cast<int128>(b.num) * a.den;
    const uint128 mag = num < 0 ? static_cast<uint128>(-num) : static_cast<uint128>(num);
    return from_wide(mag, num < 0, static_cast<uint128>(a.den) * static_cast<uint128>(b.den));
}

Rational exact_value(const GameInstance& game, const SymStrategy& strategy)
{
    const auto states = game.state_count(20000);
    std::vector<std::optional<Answer>> answers(states);
    std::vector<Challenge> points(states);
    for (std::int64_t code = 0; code < states; ++code) {
        points[code] = challenge_from_code(game, code);
        answers[code] = strategy.answer(points[code]);
    }
    std::int64_t wins = 0;
    std::vector<int> u(game.t, -1);
    Challenge y(game.t);
    do {
        std::int64_t weight = 1;
        for (int v : u)
            weight *= v == 0 ? 2 : 1;
        for (std::int64_t code = 0; code < states; ++code) {
            const auto& x = points[code];
            for (int i = 0; i < game.t; ++i)
                y[i] = (x[i] + u[i] + game.n) % game.n;
            const auto& a = answers[code];
            const auto& b = answers[challenge_code(game, y)];
            if (a && b && judge(game, x, y, *a, *b))
                wins += weight;
        }
    } while (next_step(u));
    return Rational::make(wins, states * int_pow(4, game.t, INT64_MAX / states));
}

BruteForceResult brute_force(const GameInstance& game)
{
    const SymmetricStrategySpace space(game);
    const auto states = game.state_count(3000);
    const int t = game.t;

    // Each challenge pair becomes t parity constraints on bits of the mask.
    struct Pair {
        std::int64_t weight;
        std::size_t first; ///< offset into constraints
    };
    struct Constraint {
        std::int16_t bx, by;
        bool differ;
    };
    std::vector<Pair> pairs;
    std::vector<Constraint> constraints;
    std::vector<int> u(t, -1);
    Challenge y(t);
    do {
        std::int64_t weight = 1;
        for (int v : u)
            weight *= v == 0 ? 2 : 1;
        for (std::int64_t code = 0; code < states; ++code) {
            const auto x = challenge_from_code(game, code);
            for (int i = 0; i < t; ++i)
                y[i] = (x[i] + u[i] + game.n) % game.n;
            const auto ycode = challenge_code(game, y);
            pairs.push_back({weight, constraints.size()});
            for (int i = 0; i < t; ++i)
                constraints.push_back({static_cast<std::int16_t>(space.bit(code, i)),
                                       static_cast<std::int16_t>(space.bit(ycode, i)), x[i] != y[i]});
        }
    } while (next_step(u));

    const std::uint64_t n_strategies = space.size();
    const double work = static_cast<double>(n_strategies) * static_cast<double>(constraints.size());
    if (work > 4e9)
        throw ResourceLimitError("brute force would need more than 4e9 checks");

    BruteForceResult best;
    best.strategies = n_strategies;
    std::int64_t best_wins = -1;
    for (std::uint64_t mask = 0; mask < n_strategies; ++mask) {
        std::int64_t wins = 0;
        for (const auto& p : pairs) {
            bool ok = true;
            for (int i = 0; i < t && ok; ++i) {
                const auto& c = constraints[p.first + i];
                const auto bit_x = (mask >> c.bx) & 1;
                const auto bit_y = (mask >> c.by) & 1;
                ok = (bit_x != bit_y) == c.differ;
            }
            if (ok)
                wins += p.weight;
        }
        if (wins > best_wins) {
            best_wins = wins;
            best.best_mask = mask;
        }
    }
    best.value = Rational::make(best_wins, states * int_pow(4, t, INT64_MAX / states));
    return best;
}

StrategyRounding::StrategyRounding(GameInstance game, const SymStrategy& strategy) : game_(game), strategy_(strategy)
{
    game_.validate();
}

LatticeVector StrategyRounding::round(std::span<const std::int64_t> numerators) const
{
    if (static_cast<int>(numerators.size()) != game_.t)
        throw std::invalid_argument("StrategyRounding: dimension mismatch");
    Challenge r(game_.t);
    LatticeVector w(game_.t);
    for (int i = 0; i < game_.t; ++i) {
        w[i] = floor_div(numerators[i], game_.n);
        r[i] = static_cast<int>(numerators[i] - w[i] * game_.n);
    }
    const auto a = strategy_.answer(r);
    if (!a)
        throw std::logic_error("StrategyRounding: strategy aborted");
    LatticeVector out(game_.t);
    for (int i = 0; i < game_.t; ++i)
        out[i] = ((static_cast<std::int64_t>((*a)[i]) + r[i]) & 1) + w[i];
    return out;
}

namespace {

void accumulate_equivalence(const GameInstance& game, const SymStrategy& strategy, const std::string& label,
                            EquivalenceReport& rep)
{
    const auto states = game.state_count(3000);
    const StrategyRounding rounding(game, strategy);
    bool any = false;
    std::vector<int> u(game.t, -1);
    std::vector<std::int64_t> X(game.t), Y(game.t);
    Challenge y(game.t);
    do {
        for (std::int64_t code = 0; code < states; ++code) {
            const auto x = challenge_from_code(game, code);
            for (int i = 0; i < game.t; ++i) {
                X[i] = x[i];
                Y[i] = x[i] + u[i];
                y[i] = (x[i] + u[i] + game.n) % game.n;
            }
            const auto a = strategy.answer(x);
            const auto b = strategy.answer(y);
            if (!a || !b)
                throw std::logic_error("check_equivalence: strategy must not abort");
            const bool success = judge(game, x, y, *a, *b);
            const auto rx = rounding.round(X);
            const auto ry = rounding.round(Y);
            const bool same = rx == ry;
            bool same_parity = true;
            for (int i = 0; i < game.t; ++i)
                same_parity = same_parity && ((rx[i] - ry[i]) % 2 == 0);
            ++rep.pairs;
            if (success != same_parity)
                ++rep.parity_counterexamples;
            if (success != same) {
                ++rep.counterexamples;
                if (!any && rep.first_counterexample.empty()) {
                    std::ostringstream os;
                    os << label << " x=" << join(x) << "/" << game.n << " u=" << join(u) << "/" << game.n
                       << " A(x)=" << join(*a) << " A(x+u)=" << join(*b) << " success=" << success
                       << " R(x)=" << join(rx) << " R(x+u)=" << join(ry);
                    rep.first_counterexample = os.str();
                }
                any = true;
            }
        }
    } while (next_step(u));
    ++rep.strategies;
    rep.strategies_with_counterexample += any;
}

} // namespace

EquivalenceReport check_equivalence(const GameInstance& game, const SymStrategy& strategy)
{
    EquivalenceReport rep;
    accumulate_equivalence(game, strategy, strategy.name(), rep);
    return rep;
}

EquivalenceReport check_equivalence_all(const GameInstance& game)
{
    const SymmetricStrategySpace space(game);
    EquivalenceReport rep;
    for (std::uint64_t mask = 0; mask < space.size(); ++mask)
        accumulate_equivalence(game, space.strategy(mask), "strategy#" + std::to_string(mask), rep);
    return rep;
}

int next_prime_at_least(int k)
{
    auto prime = [](int v) {
        if (v < 2)
            return false;
        for (int d = 2; d * d <= v; ++d)
            if (v % d == 0)
                return false;
        return true;
    };
    while (!prime(k))
        ++k;
    return k;
}

int default_k(int n, int t)
{
    if (t < 1)
        throw std::invalid_argument("default_k: t must be positive");
    const double raw = n * std::sqrt(std::log(static_cast<double>(t))) / t;
    return next_prime_at_least(std::max(2, static_cast<int>(std::ceil(raw))));
}

StepFamily game_step(int n, int k, double eps)
{
    auto f = StepFamily::bernoulli(eps, n);
    f.step = static_cast<double>(k) / n;
    return f;
}

namespace {

bool in_zero_cell(const TilingBody& body, std::span<const double> p, LatticeVector& scratch)
{
    body.round_into(p, scratch);
    return std::all_of(scratch.begin(), scratch.end(), [](std::int64_t v) { return v == 0; });
}

// One conditional DB(1/4) split of u; true when some probe point leaves D.
bool decency_trial(const TilingBody& body, int n, std::span<const double> x, std::span<const int> steps, int k,
                   Rng& rng, std::vector<double>& p1, std::vector<double>& p2, std::vector<double>& u1,
                   std::vector<double>& u2, LatticeVector& scratch)
{
    const std::size_t t = x.size();
    for (std::size_t i = 0; i < t; ++i) {
        u1[i] = u2[i] = 0.0;
        if (steps[i] != 0)
            (rng.uniform() < 0.5 ? u1[i] : u2[i]) = static_cast<double>(steps[i]) / n;
    }
    for (const double scale : {1.0, static_cast<double>(k)}) {
        for (std::size_t i = 0; i < t; ++i) {
            p1[i] = x[i] + scale * u1[i];
            p2[i] = x[i] + scale * u2[i];
        }
        if (!in_zero_cell(body, p1, scratch) || !in_zero_cell(body, p2, scratch))
            return true;
    }
    return false;
}

} // namespace

MCEstimate decency_probe(const TilingBody& body, int n, std::span<const double> x, std::span<const int> steps,
                         int k, std::uint64_t n_samples, std::uint64_t seed)
{
    const std::size_t t = x.size();
    if (static_cast<int>(t) != body.dimension() || steps.size() != t)
        throw std::invalid_argument("decency_probe: dimension mismatch");
    if (n_samples == 0 || k < 1)
        throw std::invalid_argument("decency_probe: need samples and k >= 1");
    LatticeVector scratch(t);
    if (!in_zero_cell(body, x, scratch))
        throw std::invalid_argument("decency_probe: x must lie in the zero cell");
    for (int s : steps)
        if (s < -1 || s > 1)
            throw std::invalid_argument("decency_probe: steps must lie in {-1,0,1}");
    Rng rng(seed, 0);
    std::vector<double> p1(t), p2(t), u1(t), u2(t);
    std::uint64_t hits = 0;
    for (std::uint64_t s = 0; s < n_samples; ++s)
        hits += decency_trial(body, n, x, steps, k, rng, p1, p2, u1, u2, scratch);
    return proportion_estimate(hits, n_samples, seed);
}

DecencyAggregate decency_aggregate(const TilingBody& body, int n, int k, std::uint64_t n_points,
                                   std::uint64_t n_inner, std::uint64_t seed, unsigned workers)
{
    if (n_points < 2 || n_inner == 0)
        throw std::invalid_argument("decency_aggregate: need samples");
    const int t = body.dimension();
    struct Acc {
        double s = 0.0, s2 = 0.0;
        std::uint64_t eta = 0, delta = 0;
        Acc& operator+=(const Acc& o)
        {
            s += o.s;
            s2 += o.s2;
            eta += o.eta;
            delta += o.delta;
            return *this;
        }
    };
    const auto acc = run_chunked<Acc>(n_points, seed, resolve_workers(workers),
                                      [&](Rng& rng, std::uint64_t begin, std::uint64_t end) {
        Acc a;
        std::vector<double> raw(t), p1(t), p2(t), u1(t), u2(t), q(t);
        std::vector<int> steps(t);
        LatticeVector scratch(t);
        for (std::uint64_t s = begin; s < end; ++s) {
            for (auto& v : raw)
                v = rng.uniform();
            const auto x = mod_cell(body, raw);
            for (auto& v : steps)
                v = step_of(rng.uniform());
            std::uint64_t hits = 0;
            for (std::uint64_t j = 0; j < n_inner; ++j)
                hits += decency_trial(body, n, x, steps, k, rng, p1, p2, u1, u2, scratch);
            const double p = static_cast<double>(hits) / static_cast<double>(n_inner);
            a.s += p;
            a.s2 += p * p;

            // One DB(1/4) component: +-1/n with probability 1/8 each.
            for (int i = 0; i < t; ++i) {
                const double r = rng.uniform();
                u1[i] = r < 0.125 ? 1.0 / n : r < 0.25 ? -1.0 / n : 0.0;
            }
            for (int i = 0; i < t; ++i)
                q[i] = x[i] + u1[i];
            a.eta += !in_zero_cell(body, q, scratch);
            for (int i = 0; i < t; ++i)
                q[i] = x[i] + k * u1[i];
            a.delta += !in_zero_cell(body, q, scratch);
        }
        return a;
    });
    return {mean_estimate(acc.s, acc.s2, n_points, seed), proportion_estimate(acc.eta, n_points, seed),
            proportion_estimate(acc.delta, n_points, seed)};
}

std::optional<LatticeVector> box_majority(const TilingBody& body, int n, std::span<const int> box,
                                          std::uint64_t n_samples, double threshold, std::uint64_t seed)
{
    const std::size_t t = box.size();
    if (static_cast<int>(t) != body.dimension())
        throw std::invalid_argument("box_majority: box dimension must match the body");
    if (n_samples < 100)
        throw std::invalid_argument("box_majority: need at least 100 samples");
    const auto order = sorting_permutation(box);
    std::vector<int> key(t);
    std::uint64_t stream = 0x9e3779b97f4a7c15ULL;
    for (std::size_t j = 0; j < t; ++j) {
        key[j] = box[order[j]];
        if (key[j] < 0 || key[j] >= n)
            throw std::invalid_argument("box_majority: box index out of range");
        stream = keyed_hash(stream, static_cast<std::uint64_t>(key[j]), j);
    }

    Rng rng(seed, stream);
    std::map<LatticeVector, std::uint64_t> counts;
    std::vector<double> p(t);
    LatticeVector label(t);
    for (std::uint64_t s = 0; s < n_samples; ++s) {
        for (std::size_t j = 0; j < t; ++j)
            p[j] = (key[j] + rng.uniform()) / n;
        body.round_into(p, label);
        ++counts[label];
    }
    // Highest count; ties go to the lexicographically smallest label.
    auto best = counts.begin();
    for (auto it = counts.begin(); it != counts.end(); ++it)
        if (it->second > best->second)
            best = it;
    const double f = static_cast<double>(best->second) / static_cast<double>(n_samples);
    const double se = std::sqrt(f * (1.0 - f) / static_cast<double>(n_samples));
    const bool unanimous = best->second == n_samples;
    if (!unanimous && !(f - 3.0 * se > threshold))
        return std::nullopt;
    const auto& z = best->first;
    for (std::size_t j = 1; j < t; ++j)
        if (key[j] == key[j - 1] && z[j] != z[j - 1])
            return std::nullopt;
    LatticeVector out(t);
    for (std::size_t j = 0; j < t; ++j)
        out[order[j]] = z[j];
    return out;
}

MCEstimate indecisive_box_rate(const TilingBody& body, int n, std::uint64_t n_boxes, std::uint64_t n_per_box,
                               double threshold, std::uint64_t seed, unsigned workers)
{
    if (n_boxes == 0)
        throw std::invalid_argument("indecisive_box_rate: need boxes");
    const int t = body.dimension();
    struct Acc {
        std::uint64_t hits = 0;
        Acc& operator+=(const Acc& o)
        {
            hits += o.hits;
            return *this;
        }
    };
    // Box streams are keyed by `seed` alone, as in TilingStrategy, so the same box
    // gets the same decision in both places.
    const auto acc = run_chunked<Acc>(n_boxes, keyed_hash(seed, 0xb0c5), resolve_workers(workers),
                                      [&](Rng& rng, std::uint64_t begin, std::uint64_t end) {
        Acc a;
        std::vector<int> box(t);
        for (std::uint64_t s = begin; s < end; ++s) {
            for (auto& v : box)
                v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            a.hits += !box_majority(body, n, box, n_per_box, threshold, seed).has_value();
        }
        return a;
    });
    return proportion_estimate(acc.hits, n_boxes, seed);
}

TilingStrategy::TilingStrategy(std::shared_ptr<const TilingBody> body, GameInstance game, std::uint64_t n_per_box,
                               std::uint64_t seed)
    : body_(std::move(body)), game_(game), n_per_box_(n_per_box), seed_(seed)
{
    game_.validate();
    if (!body_ || body_->dimension() != game_.t)
        throw std::invalid_argument("TilingStrategy: body dimension must equal t");
}

std::optional<Answer> TilingStrategy::answer(const Challenge& x) const
{
    const auto order = sorting_permutation(x);
    std::vector<int> key(x.size());
    for (std::size_t j = 0; j < x.size(); ++j)
        key[j] = x[order[j]];

    std::optional<LatticeVector> label;
    bool found = false;
    {
        std::lock_guard lock(mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) {
            label = it->second;
            found = true;
        }
    }
    if (!found) {
        label = box_majority(*body_, game_.n, key, n_per_box_, 0.5, seed_);
        std::lock_guard lock(mutex_);
        auto [it, fresh] = cache_.try_emplace(key, label);
        // Every writer computes the same decision from the same keyed stream.
        assert(fresh || it->second == label);
        (void)fresh;
        (void)it;
    }
    if (!label)
        return std::nullopt;
    Answer a(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const std::int64_t v = (*label)[j] + key[j];
        a[order[j]] = static_cast<std::uint8_t>(((v % 2) + 2) % 2);
    }
    return a;
}

std::size_t TilingStrategy::cached_boxes() const
{
    std::lock_guard lock(mutex_);
    return cache_.size();
}

StrategyEvaluation evaluate_strategy(const GameInstance& game, const SymStrategy& strategy, std::uint64_t n_samples,
                                     std::uint64_t seed, unsigned workers)
{
    game.validate();
    if (n_samples < 1000)
        throw std::invalid_argument("evaluate_strategy: need at least 1000 samples");
    struct Acc {
        std::uint64_t wins = 0, answer_aborts = 0, challenge_aborts = 0;
        Acc& operator+=(const Acc& o)
        {
            wins += o.wins;
            answer_aborts += o.answer_aborts;
            challenge_aborts += o.challenge_aborts;
            return *this;
        }
    };
    const auto acc = run_chunked<Acc>(n_samples, seed, resolve_workers(workers),
                                      [&](Rng& rng, std::uint64_t begin, std::uint64_t end) {
        Acc a;
        for (std::uint64_t s = begin; s < end; ++s) {
            const auto c = sample_challenge(game, rng);
            const auto ax = strategy.answer(c.x);
            const auto ay = strategy.answer(c.y);
            a.answer_aborts += !ax;
            a.challenge_aborts += !ax || !ay;
            a.wins += ax && ay && judge(game, c.x, c.y, *ax, *ay);
        }
        return a;
    });
    return {proportion_estimate(acc.wins, n_samples, seed), proportion_estimate(acc.answer_aborts, n_samples, seed),
            proportion_estimate(acc.challenge_aborts, n_samples, seed)};
}

} // namespace foamlab
