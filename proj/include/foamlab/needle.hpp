#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "foamlab/rng.hpp"
#include "foamlab/tiling.hpp"

namespace foamlab {

/// Random needle directions. Bernoulli steps move each coordinate by +-step
/// with probability eps each; step is 1/n for a cycle of length n.
struct StepFamily {
    enum class Kind { Gaussian, Bernoulli, DisjointBernoulli };

    Kind kind = Kind::Gaussian;
    double scale = 0.0; ///< sigma for Gaussian, eps for the Bernoulli kinds
    double step = 0.0;  ///< Bernoulli step magnitude

    static StepFamily gaussian(double sigma);
    static StepFamily bernoulli(double eps, int n);
    static StepFamily disjoint_bernoulli(double eps, int n);

    std::string label() const;
};

/// Fills u with one draw. The disjoint family yields u1 + u2 here.
void sample_step(const StepFamily& family, Rng& rng, std::span<double> u);
std::vector<double> sample_step(const StepFamily& family, int dim, Rng& rng);

/// Pair (u1, u2) with disjoint supports whose sum is bernoulli(eps).
std::pair<std::vector<double>, std::vector<double>> sample_disjoint_step(const StepFamily& family, int dim,
                                                                         Rng& rng);

struct MCEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::uint64_t n_samples = 0;
    std::uint64_t seed = 0;

    double upper(double k = 3.0) const { return value + k * std_error; }
    double lower(double k = 3.0) const { return value - k * std_error; }
};

/// Proportion estimate with stderr sqrt(p(1-p)/N).
MCEstimate proportion_estimate(std::uint64_t hits, std::uint64_t n, std::uint64_t seed);

/// Mean estimate from running sums of x and x^2.
MCEstimate mean_estimate(double sum, double sum_sq, std::uint64_t n, std::uint64_t seed);

/// 0 means one worker per hardware thread.
unsigned resolve_workers(unsigned workers);

struct NoiseSensitivityReport {
    MCEstimate ns;
    /// Frequency with which the level changes or a coordinate crosses it.
    /// Present for symmetric bodies only.
    std::optional<MCEstimate> condition_failure;
    std::uint64_t budget_errors = 0;
};

/// Pr[R(x) != R(x+u)] for x uniform in the cell and u from `family`.
/// Samples whose rounding exhausts the sampling budget are counted in
/// budget_errors and scored as cell changes.
NoiseSensitivityReport estimate_noise_sensitivity(const TilingBody& body, const StepFamily& family,
                                                  std::uint64_t n_samples, std::uint64_t seed,
                                                  unsigned workers = 0);

/// Pr[segment x -> x+u leaves the cell of x], checked at k_subdiv+1 equally spaced points.
MCEstimate estimate_escape(const TilingBody& body, const StepFamily& family, std::uint64_t n_samples,
                           int k_subdiv, std::uint64_t seed, unsigned workers = 0);
MCEstimate estimate_escape(const TilingBody& body, double sigma, std::uint64_t n_samples, int k_subdiv,
                           std::uint64_t seed, unsigned workers = 0);

/// Number of sub-segments j with R(x + (j-1)u/k) != R(x + ju/k).
int count_crossings(const TilingBody& body, std::span<const double> x, std::span<const double> u, int k_subdiv);

/// Calibration error: the cube run was too noisy to fix the needle constant.
class CalibrationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct AreaEstimate {
    MCEstimate mean_crossings;
    double calibration_constant = 0.0; ///< C in E[crossings] = C sqrt(delta) area
    MCEstimate area;
};

/// Needle constant measured on the unit cube of the same dimension (area 2n).
/// Throws CalibrationError when the relative stderr exceeds 5%.
MCEstimate calibrate_on_cube(int n, double delta, std::uint64_t n_samples, int k_subdiv, std::uint64_t seed,
                             unsigned workers = 0);

/// Needles u ~ N(0, delta I). area = mean crossings / (C sqrt(delta)) with C from
/// `calibration` when given, otherwise from a cube run with the same seed.
AreaEstimate estimate_surface_area(const TilingBody& body, double delta, std::uint64_t n_samples, int k_subdiv,
                                   std::uint64_t seed, unsigned workers = 0,
                                   std::optional<MCEstimate> calibration = std::nullopt);

} // namespace foamlab
