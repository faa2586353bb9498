#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "foamlab/torus.hpp"

namespace foamlab {

/// Raised when the correlated sampler exhausts its round budget.
class SamplingBudgetError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters that fully determine one symmetric tiling body.
struct TilingParams {
    int n = 0;              ///< dimension
    int m = 0;              ///< number of circle intervals
    double width_inv = 0;   ///< score scale 50 n / ln n
    std::uint64_t seed = 0; ///< key of the correlated-sampling stream
    std::uint64_t max_sampling_rounds = 0;

    /// Standard body: n >= 8, m = round(n^(1/3)) unless overridden, width 50n/ln n.
    static TilingParams standard(int n, std::uint64_t seed, int m_override = 0);

    /// Low-dimensional body for the game (t can be 1..7): same recipe with
    /// ln n clamped below at 1 and m clamped below at 2.
    static TilingParams small_dimension(int n, std::uint64_t seed, int m_override = 0);

    /// Throws std::invalid_argument if the invariants do not hold.
    void validate() const;

    double center(int j) const { return (j + 0.5) / m; }
    double forbidden_radius() const { return 1.0 / width_inv; }

    friend bool operator==(const TilingParams&, const TilingParams&) = default;
};

/// Per-interval score products r_j and their total.
struct ScoreVector {
    std::vector<double> r;
    double total = 0.0;
};

enum class CenterCase { A, B1, B2 };

struct CenterChoice {
    double z = 0.0;
    CenterCase case_tag = CenterCase::A;
    std::uint64_t rounds_used = 0; ///< correlated-sampling rounds, 0 outside case A
    int index = -1;                ///< chosen interval in case A

    friend bool operator==(const CenterChoice&, const CenterChoice&) = default;
};

/// C^2 quintic smoothstep on [1,2]; 0 below 1 and 1 above 2.
double smooth_step(double t);

/// Interval containing a fractional coordinate; half-open [j/m, (j+1)/m).
int interval_of(const TilingParams& params, double t);

/// g_j(t) = smooth_step(width_inv * |t - z_j|) for t inside I_j = [j/m, (j+1)/m].
/// Intervals are indexed from 0.
double center_score(const TilingParams& params, int j, double t);

ScoreVector interval_products(const TilingParams& params, const TorusConfig& cfg);

/// Same products for unsorted fractional parts. Only coordinates with score < 1
/// are ordered before multiplying, so the result is bit-identical to the
/// canonical route for every permutation of `fracs`.
ScoreVector interval_products_unsorted(const TilingParams& params, std::span<const double> fracs);

/// p_j = r_j / sum r. Throws std::domain_error when every r_j is zero.
std::vector<double> choice_distribution(const ScoreVector& scores);
std::vector<double> choice_distribution(const TilingParams& params, const TorusConfig& cfg);

/// One draw (i_k, h_k) of the shared randomness: i uniform on [0,m), h uniform on (0,1].
struct StreamDraw {
    int index;
    double threshold;
};
StreamDraw stream_draw(std::uint64_t seed, int m, std::uint64_t round);

/// Correlated sampling: first round k with h_k <= p_{i_k}. Throws SamplingBudgetError.
/// Returns (index, rounds used).
std::pair<int, std::uint64_t> correlated_sample(std::span<const double> p, std::uint64_t seed,
                                                std::uint64_t max_rounds);

CenterChoice select_center(const TilingParams& params, const TorusConfig& cfg);

/// select_center on unsorted fractional parts; identical output for every permutation.
CenterChoice select_center_unsorted(const TilingParams& params, std::span<const double> fracs);

} // namespace foamlab
