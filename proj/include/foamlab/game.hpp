#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "foamlab/needle.hpp"
#include "foamlab/tiling.hpp"

namespace foamlab {

/// Raised when an exact computation would exceed its size limits.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The t-fold symmetric repetition of the odd cycle game on C_n = {i/n}.
struct GameInstance {
    int n = 3; ///< odd cycle length, at least 3
    int t = 1; ///< repetitions

    void validate() const;
    /// n^t, or throws ResourceLimitError above `limit`.
    std::int64_t state_count(std::int64_t limit = std::int64_t{1} << 40) const;
};

/// Vertex indices i in [0, n), standing for i/n.
using Challenge = std::vector<int>;
using Answer = std::vector<std::uint8_t>;

struct ChallengePair {
    Challenge x;
    Challenge y;
};

/// x uniform on C_n^t; each coordinate of y stays with probability 1/2 and
/// moves by +-1 with probability 1/4 each.
ChallengePair sample_challenge(const GameInstance& game, Rng& rng);

/// Every coordinate must satisfy (x_i == y_i) == (a_i == b_i).
bool judge(const GameInstance& game, const Challenge& x, const Challenge& y, const Answer& a, const Answer& b);

/// A permutation-equivariant strategy shared by both players. An empty result is an abort.
class SymStrategy {
public:
    virtual ~SymStrategy() = default;
    virtual std::optional<Answer> answer(const Challenge& x) const = 0;
    virtual std::string name() const = 0;
};

class ConstantStrategy final : public SymStrategy {
public:
    explicit ConstantStrategy(std::uint8_t bit) : bit_(bit & 1) {}
    std::optional<Answer> answer(const Challenge& x) const override { return Answer(x.size(), bit_); }
    std::string name() const override { return bit_ ? "constant-1" : "constant-0"; }

private:
    std::uint8_t bit_;
};

/// Answers the parity of each vertex; only the edge between n-1 and 0 fails.
class ParityStrategy final : public SymStrategy {
public:
    std::optional<Answer> answer(const Challenge& x) const override;
    std::string name() const override { return "parity"; }
};

/// Full answer table over C_n^t, indexed by the base-n code of x.
class TableStrategy final : public SymStrategy {
public:
    TableStrategy(GameInstance game, std::vector<Answer> table);
    std::optional<Answer> answer(const Challenge& x) const override;
    std::string name() const override { return "table"; }

    const std::vector<Answer>& table() const { return table_; }

private:
    GameInstance game_;
    std::vector<Answer> table_;
};

/// Enumeration of the symmetric strategies of a small instance. Each sorted
/// challenge (orbit) carries one free bit per distinct vertex in it.
class SymmetricStrategySpace {
public:
    explicit SymmetricStrategySpace(const GameInstance& game, int max_bits = 22);

    int bits() const { return bits_; }
    std::uint64_t size() const { return std::uint64_t{1} << bits_; }

    /// Answers of strategy `mask` for the challenge with base-n code `code`.
    void answers(std::uint64_t mask, std::int64_t code, std::span<std::uint8_t> out) const;
    TableStrategy strategy(std::uint64_t mask) const;
    /// Bit that decides coordinate i of the answer at challenge `code`.
    int bit(std::int64_t code, int i) const { return bit_index_[code * game_.t + i]; }

private:
    GameInstance game_;
    int bits_ = 0;
    std::vector<std::int16_t> bit_index_; ///< code * t + i -> bit
};

std::int64_t challenge_code(const GameInstance& game, const Challenge& x);
Challenge challenge_from_code(const GameInstance& game, std::int64_t code);

/// Exact rational p/q with q > 0 in lowest terms.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational make(std::int64_t num, std::int64_t den);
    std::string str() const;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend bool operator==(const Rational&, const Rational&) = default;
    friend bool operator<(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
};

/// Success probability of `strategy` over the exact challenge distribution.
/// Aborts count as failures.
Rational exact_value(const GameInstance& game, const SymStrategy& strategy);

struct BruteForceResult {
    Rational value;
    std::uint64_t best_mask = 0;
    std::uint64_t strategies = 0;
};

/// Maximum over all symmetric strategies. Limits: n^t <= 3000, at most 22 free
/// bits and 4e9 elementary checks; beyond them ResourceLimitError.
BruteForceResult brute_force(const GameInstance& game);
inline Rational brute_force_value(int n, int t)
{
    return brute_force({n, t}).value;
}

/// R(X) for X in Z^t standing for X/n: with X = n w + r, R = (A(r) + r) mod 2 + w.
class StrategyRounding {
public:
    StrategyRounding(GameInstance game, const SymStrategy& strategy);

    LatticeVector round(std::span<const std::int64_t> numerators) const;

private:
    GameInstance game_;
    const SymStrategy& strategy_;
};

struct EquivalenceReport {
    std::uint64_t strategies = 0;
    std::uint64_t pairs = 0;                        ///< (strategy, x, u) triples checked
    std::uint64_t counterexamples = 0;              ///< success != (R(x) == R(x+u))
    std::uint64_t parity_counterexamples = 0;       ///< success != (R(x) == R(x+u) mod 2)
    std::uint64_t strategies_with_counterexample = 0;
    std::string first_counterexample;
};

/// Compares the judge verdict with cell identity under StrategyRounding over all
/// x in C_n^t and u in {-1,0,1}^t.
EquivalenceReport check_equivalence(const GameInstance& game, const SymStrategy& strategy);
/// The same check for every symmetric strategy of the instance.
EquivalenceReport check_equivalence_all(const GameInstance& game);

/// Default step multiplier: the first prime >= max(2, ceil(n sqrt(ln t) / t)).
int default_k(int n, int t);
int next_prime_at_least(int k);

/// Bernoulli(1/4) steps of size k/n.
StepFamily game_step(int n, int k = 1, double eps = 0.25);

/// Pr over (u1,u2) ~ DB(1/4) conditioned on u1 + u2 = u that one of x+u1, x+u2,
/// x+k u1, x+k u2 leaves the zero cell. `steps` holds u in units of 1/n.
MCEstimate decency_probe(const TilingBody& body, int n, std::span<const double> x, std::span<const int> steps,
                         int k, std::uint64_t n_samples, std::uint64_t seed);

struct DecencyAggregate {
    MCEstimate mean_probe;   ///< E over x in D, u ~ B(1/4) of the probe
    MCEstimate eta_marginal; ///< Pr[x + u1 leaves D], u1 a DB(1/4) component
    MCEstimate delta_marginal; ///< Pr[x + k u1 leaves D]
};

DecencyAggregate decency_aggregate(const TilingBody& body, int n, int k, std::uint64_t n_points,
                                   std::uint64_t n_inner, std::uint64_t seed, unsigned workers = 0);

/// Box B_a = prod [a_i/n, (a_i+1)/n). Returns the majority cell R(p) over
/// `n_samples` uniform points p when its frequency clears threshold + 3 stderr
/// (or all samples agree), otherwise nothing. The samples are drawn for the
/// sorted box from a stream keyed by the sorted box, so permuted boxes get
/// permuted labels; a label that differs across equal coordinates is rejected.
std::optional<LatticeVector> box_majority(const TilingBody& body, int n, std::span<const int> box,
                                          std::uint64_t n_samples, double threshold, std::uint64_t seed);

/// Frequency of boxes without a label at `threshold`, over uniform random boxes.
MCEstimate indecisive_box_rate(const TilingBody& body, int n, std::uint64_t n_boxes, std::uint64_t n_per_box,
                               double threshold, std::uint64_t seed, unsigned workers = 0);

/// Answers (z + a) mod 2 where z is the box label of the challenge box a; aborts
/// on boxes without a label. Box decisions are cached by sorted box.
class TilingStrategy final : public SymStrategy {
public:
    TilingStrategy(std::shared_ptr<const TilingBody> body, GameInstance game, std::uint64_t n_per_box = 400,
                   std::uint64_t seed = 0);

    std::optional<Answer> answer(const Challenge& x) const override;
    std::string name() const override { return "tiling"; }

    std::size_t cached_boxes() const;

private:
    std::shared_ptr<const TilingBody> body_;
    GameInstance game_;
    std::uint64_t n_per_box_;
    std::uint64_t seed_;
    mutable std::mutex mutex_;
    mutable std::map<std::vector<int>, std::optional<LatticeVector>> cache_;
};

struct StrategyEvaluation {
    MCEstimate success;
    MCEstimate answer_abort_rate;    ///< Pr[A(x) aborts], x uniform
    MCEstimate challenge_abort_rate; ///< Pr[either player aborts]
};

/// Monte Carlo success probability with both players running `strategy`.
StrategyEvaluation evaluate_strategy(const GameInstance& game, const SymStrategy& strategy, std::uint64_t n_samples,
                                     std::uint64_t seed, unsigned workers = 0);

} // namespace foamlab
