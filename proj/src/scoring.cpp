#include "foamlab/scoring.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <string>

#include "foamlab/rng.hpp"

namespace foamlab {

namespace {

TilingParams make_params(int n, std::uint64_t seed, int m_override, double log_n)
{
    TilingParams p;
    p.n = n;
    p.m = m_override > 0 ? m_override : static_cast<int>(std::lround(std::cbrt(static_cast<double>(n))));
    p.width_inv = 50.0 * n / log_n;
    p.seed = seed;
    p.max_sampling_rounds = 1000ULL * static_cast<std::uint64_t>(std::max(p.m, 1));
    return p;
}

} // namespace

TilingParams TilingParams::standard(int n, std::uint64_t seed, int m_override)
{
    if (n < 8)
        throw std::invalid_argument("TilingParams: dimension must be at least 8, got " + std::to_string(n));
    auto p = make_params(n, seed, m_override, std::log(static_cast<double>(n)));
    p.validate();
    return p;
}

TilingParams TilingParams::small_dimension(int n, std::uint64_t seed, int m_override)
{
    if (n < 1)
        throw std::invalid_argument("TilingParams: dimension must be positive");
    auto p = make_params(n, seed, m_override, std::max(1.0, std::log(static_cast<double>(n))));
    if (m_override <= 0)
        p.m = std::max(p.m, 2);
    p.max_sampling_rounds = 1000ULL * static_cast<std::uint64_t>(p.m);
    p.validate();
    return p;
}

void TilingParams::validate() const
{
    if (n < 1)
        throw std::invalid_argument("TilingParams: n must be positive");
    if (m < 2)
        throw std::invalid_argument("TilingParams: m must be at least 2");
    if (!(width_inv > 0.0) || !std::isfinite(width_inv))
        throw std::invalid_argument("TilingParams: width_inv must be positive and finite");
    // Score supports [z_j - 2/width_inv, z_j + 2/width_inv] must stay inside I_j.
    if (!(2.0 / width_inv < 0.5 / m))
        throw std::invalid_argument("TilingParams: score support does not fit inside its interval");
    if (max_sampling_rounds == 0)
        throw std::invalid_argument("TilingParams: max_sampling_rounds must be positive");
}

double smooth_step(double t)
{
    if (!(t >= 0.0))
        throw std::domain_error("smooth_step: argument must be non-negative");
    if (t <= 1.0)
        return 0.0;
    if (t >= 2.0)
        return 1.0;
    const double s = t - 1.0;
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

int interval_of(const TilingParams& params, double t)
{
    int j = std::min(static_cast<int>(t * params.m), params.m - 1);
    // t * m can round across a boundary; settle against the same bounds center_score checks.
    if (j > 0 && t < static_cast<double>(j) / params.m)
        --j;
    else if (j + 1 < params.m && t >= static_cast<double>(j + 1) / params.m)
        ++j;
    return j;
}

double center_score(const TilingParams& params, int j, double t)
{
    if (j < 0 || j >= params.m)
        throw std::domain_error("center_score: interval index out of range");
    const double lo = static_cast<double>(j) / params.m;
    const double hi = static_cast<double>(j + 1) / params.m;
    if (!(t >= lo && t <= hi))
        throw std::domain_error("center_score: point outside its interval");
    return smooth_step(params.width_inv * std::abs(t - params.center(j)));
}

ScoreVector interval_products(const TilingParams& params, const TorusConfig& cfg)
{
    ScoreVector out;
    out.r.assign(params.m, 1.0);
    for (double t : cfg.coords()) {
        const int j = interval_of(params, t);
        out.r[j] *= center_score(params, j, t);
    }
    for (double v : out.r)
        out.total += v;
    return out;
}

ScoreVector interval_products_unsorted(const TilingParams& params, std::span<const double> fracs)
{
    // Only scores below one change a product; multiply those in canonical order.
    struct Hit {
        double t;
        int j;
        double g;
    };
    std::vector<Hit> hits;
    for (double t : fracs) {
        const int j = interval_of(params, t);
        const double g = smooth_step(params.width_inv * std::abs(t - params.center(j)));
        if (g < 1.0)
            hits.push_back({t, j, g});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
        return std::bit_cast<std::uint64_t>(a.t) < std::bit_cast<std::uint64_t>(b.t);
    });
    ScoreVector out;
    out.r.assign(params.m, 1.0);
    for (const auto& h : hits)
        out.r[h.j] *= h.g;
    for (double v : out.r)
        out.total += v;
    return out;
}

std::vector<double> choice_distribution(const ScoreVector& scores)
{
    if (!(scores.total > 0.0))
        throw std::domain_error("choice_distribution: all interval scores are zero");
    std::vector<double> p(scores.r.size());
    for (std::size_t j = 0; j < p.size(); ++j)
        p[j] = scores.r[j] / scores.total;
    return p;
}

std::vector<double> choice_distribution(const TilingParams& params, const TorusConfig& cfg)
{
    return choice_distribution(interval_products(params, cfg));
}

StreamDraw stream_draw(std::uint64_t seed, int m, std::uint64_t round)
{
    const auto idx = below_from_bits(keyed_hash(seed, round, 0), static_cast<std::uint64_t>(m));
    return {static_cast<int>(idx), open_closed_unit_from_bits(keyed_hash(seed, round, 1))};
}

std::pair<int, std::uint64_t> correlated_sample(std::span<const double> p, std::uint64_t seed,
                                                std::uint64_t max_rounds)
{
    const int m = static_cast<int>(p.size());
    for (std::uint64_t k = 0; k < max_rounds; ++k) {
        const auto draw = stream_draw(seed, m, k);
        if (draw.threshold <= p[draw.index])
            return {draw.index, k + 1};
    }
    throw SamplingBudgetError("correlated sampling exceeded " + std::to_string(max_rounds) + " rounds");
}

namespace {

bool far_from_all(std::span<const double> fracs, double c, double min_dist)
{
    for (double t : fracs) {
        const double d = std::abs(t - c);
        if (std::min(d, 1.0 - d) < min_dist)
            return false;
    }
    return true;
}

CenterChoice choose(const TilingParams& params, const ScoreVector& scores, std::span<const double> fracs)
{
    if (scores.total > 0.0) {
        const auto p = choice_distribution(scores);
        const auto [j, rounds] = correlated_sample(p, params.seed, params.max_sampling_rounds);
        return {params.center(j), CenterCase::A, rounds, j};
    }
    if (std::find(fracs.begin(), fracs.end(), 0.5) == fracs.end())
        return {0.5, CenterCase::B1, 0, -1};
    const int n = static_cast<int>(fracs.size());
    const double min_dist = 1.0 / (4.0 * n);
    for (int k = 1; k <= 2 * n; ++k) {
        const double c = (2.0 * k - 1.0) / (4.0 * n);
        if (far_from_all(fracs, c, min_dist))
            return {c, CenterCase::B2, 0, -1};
    }
    // Each coordinate excludes at most one of the 2n grid candidates.
    assert(false && "case B2 grid exhausted");
    throw std::logic_error("select_center: no admissible grid point in case B2");
}

} // namespace

CenterChoice select_center(const TilingParams& params, const TorusConfig& cfg)
{
    return choose(params, interval_products(params, cfg), cfg.coords());
}

CenterChoice select_center_unsorted(const TilingParams& params, std::span<const double> fracs)
{
    return choose(params, interval_products_unsorted(params, fracs), fracs);
}

} // namespace foamlab
