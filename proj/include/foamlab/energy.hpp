#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "foamlab/needle.hpp"
#include "foamlab/tiling.hpp"

namespace foamlab {

struct EnergyParams {
    double Z = 0.0;     ///< decay rate
    double sigma = 0.0; ///< needle coordinate scale

    /// Z = n / (10 ln n), sigma = c sqrt(ln n) / n.
    static EnergyParams defaults(int n, double c = 1.0);
};

/// Psi(a) = sum over i<j of exp(-Z d(a_i, a_j)). Direct O(n^2) sum.
double energy_reference(std::span<const double> a, double Z);

/// Same sum through sorted prefix sums, O(n log n). Invariant under permutations
/// of a, bit for bit. Falls back to the direct sum when Z times the spread of a
/// is too large for the exponent range.
double energy(std::span<const double> a, double Z);

/// Psi(a,u) = sum over i<j of exp(-Z (d(a_i,a_j) + gamma(a_i,a_j)(u_i - u_j))).
double linearized_energy_reference(std::span<const double> a, std::span<const double> u, double Z);
double linearized_energy(std::span<const double> a, std::span<const double> u, double Z);

/// Psi(a, .) for one fixed base point; the sort and pair classes are computed once.
class LinearizedEnergy {
public:
    LinearizedEnergy(std::span<const double> a, double Z);

    double operator()(std::span<const double> u) const;
    double base() const { return base_; }

private:
    struct Range {
        std::uint32_t begin;
        std::uint32_t end;
        int shift; ///< +j for the (+) class with integer j, -k for the (-) class with k
        long double scale; ///< exp(-Z shift)
    };

    double evaluate(std::span<const double> u) const;

    double Z_;
    std::vector<double> sorted_a_;
    std::vector<std::uint32_t> order_;
    std::vector<std::uint32_t> range_start_; ///< ranges_[range_start_[p] .. range_start_[p+1])
    std::vector<Range> ranges_;
    std::vector<long double> base_up_;   ///< exp(Z (a_r - middle)) in sorted order
    std::vector<long double> base_down_; ///< reciprocals of base_up_
    double half_spread_ = 0.0;
    bool direct_ = false;
    double base_ = 0.0;
};

struct LinearizedMoments {
    MCEstimate mean;   ///< E_u Psi(a,u)
    double variance;   ///< var_u Psi(a,u)
    double base;       ///< Psi(a)
};

/// Moments of Psi(a,u) over u ~ N(0, sigma^2 I).
LinearizedMoments linearized_energy_moments(std::span<const double> a, double Z, double sigma,
                                            std::uint64_t n_draws, std::uint64_t seed, unsigned workers = 0);

/// C_i = sum over j != i of exp(-Z d(a_i, a_j)).
double coordinate_load(std::span<const double> a, int i, double Z);
std::vector<double> coordinate_loads(std::span<const double> a, double Z);

/// Every torus window of length 10 ln n / n holds between ln n and 100 ln n
/// fractional parts of a. Windows are half-open and checked at every point where
/// the count can change, so the answer is exact.
bool is_good(std::span<const double> a);

/// Minimum and maximum window counts behind is_good.
std::pair<int, int> window_count_range(std::span<const double> a, double width);

struct LBExperimentReport {
    int n = 0;
    EnergyParams params;
    MCEstimate escape_rate;                   ///< not E1
    MCEstimate pr_energy_forward_gt_backward; ///< Psi(a+u) > Psi(a-u)
    MCEstimate goodness_rate;
    MCEstimate e1, e2, e3, e4, e5;
    MCEstimate e_all; ///< E1, not E2, not E3, E4
    std::uint64_t e_without_e5 = 0; ///< samples in E but not in E5
};

/// Samples a uniform in the cell and u ~ N(0, sigma^2 I); segment containment
/// uses k_subdiv + 1 checkpoints.
LBExperimentReport run_lb_experiment(const TilingBody& body, const EnergyParams& params, std::uint64_t n_samples,
                                     std::uint64_t seed, int k_subdiv = 64, unsigned workers = 0);

} // namespace foamlab
