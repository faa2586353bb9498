#include "foamlab/needle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "foamlab/parallel.hpp"

namespace foamlab {

namespace {

void require_samples(std::uint64_t n_samples, std::uint64_t minimum, const char* what)
{
    if (n_samples < minimum)
        throw std::invalid_argument(std::string(what) + ": need at least " + std::to_string(minimum) + " samples");
}

struct Tally {
    std::uint64_t hits = 0;
    std::uint64_t aux = 0;
    std::uint64_t budget = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    Tally& operator+=(const Tally& o)
    {
        hits += o.hits;
        aux += o.aux;
        budget += o.budget;
        sum += o.sum;
        sum_sq += o.sum_sq;
        return *this;
    }
};

void fill_uniform(Rng& rng, std::span<double> x)
{
    for (auto& v : x)
        v = rng.uniform();
}

void add_scaled(std::span<const double> x, double lambda, std::span<const double> u, std::span<double> out)
{
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = x[i] + lambda * u[i];
}

} // namespace

StepFamily StepFamily::gaussian(double sigma)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma))
        throw std::invalid_argument("gaussian step: sigma must be positive");
    return {Kind::Gaussian, sigma, 0.0};
}

StepFamily StepFamily::bernoulli(double eps, int n)
{
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::invalid_argument("bernoulli step: eps must lie in (0, 1/2]");
    if (n < 1)
        throw std::invalid_argument("bernoulli step: n must be positive");
    return {Kind::Bernoulli, eps, 1.0 / n};
}

StepFamily StepFamily::disjoint_bernoulli(double eps, int n)
{
    auto f = bernoulli(eps, n);
    f.kind = Kind::DisjointBernoulli;
    return f;
}

std::string StepFamily::label() const
{
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
    case Kind::Gaussian:
        os << "gaussian(" << scale << ")";
        break;
    case Kind::Bernoulli:
        os << "bernoulli(" << scale << "," << step << ")";
        break;
    case Kind::DisjointBernoulli:
        os << "disjoint-bernoulli(" << scale << "," << step << ")";
        break;
    }
    return os.str();
}

void sample_step(const StepFamily& family, Rng& rng, std::span<double> u)
{
    switch (family.kind) {
    case StepFamily::Kind::Gaussian:
        for (auto& v : u)
            v = rng.normal(family.scale);
        return;
    case StepFamily::Kind::Bernoulli:
        for (auto& v : u) {
            const double r = rng.uniform();
            v = r < family.scale ? family.step : r < 2.0 * family.scale ? -family.step : 0.0;
        }
        return;
    case StepFamily::Kind::DisjointBernoulli: {
        // Same draws as sample_disjoint_step, summed.
        const double e = family.scale;
        for (auto& v : u) {
            const double r = rng.uniform();
            if (r < 0.5 * e || (r >= e && r < 1.5 * e))
                v = family.step;
            else if (r < 2.0 * e)
                v = -family.step;
            else
                v = 0.0;
        }
        return;
    }
    }
}

std::vector<double> sample_step(const StepFamily& family, int dim, Rng& rng)
{
    std::vector<double> u(dim);
    sample_step(family, rng, u);
    return u;
}

std::pair<std::vector<double>, std::vector<double>> sample_disjoint_step(const StepFamily& family, int dim,
                                                                         Rng& rng)
{
    if (family.kind == StepFamily::Kind::Gaussian)
        throw std::invalid_argument("sample_disjoint_step: needs a Bernoulli family");
    const double e = family.scale;
    const double s = family.step;
    std::vector<double> u1(dim, 0.0), u2(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        const double r = rng.uniform();
        if (r < 0.5 * e)
            u1[i] = s;
        else if (r < e)
            u1[i] = -s;
        else if (r < 1.5 * e)
            u2[i] = s;
        else if (r < 2.0 * e)
            u2[i] = -s;
    }
    return {std::move(u1), std::move(u2)};
}

MCEstimate proportion_estimate(std::uint64_t hits, std::uint64_t n, std::uint64_t seed)
{
    if (n == 0)
        throw std::invalid_argument("proportion_estimate: no samples");
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n, seed};
}

MCEstimate mean_estimate(double sum, double sum_sq, std::uint64_t n, std::uint64_t seed)
{
    if (n < 2)
        throw std::invalid_argument("mean_estimate: need at least two samples");
    const double nn = static_cast<double>(n);
    const double mean = sum / nn;
    const double var = std::max(0.0, (sum_sq - nn * mean * mean) / (nn - 1.0));
    return {mean, std::sqrt(var / nn), n, seed};
}

unsigned resolve_workers(unsigned workers)
{
    if (workers > 0)
        return workers;
    return std::max(1u, std::thread::hardware_concurrency());
}

NoiseSensitivityReport estimate_noise_sensitivity(const TilingBody& body, const StepFamily& family,
                                                  std::uint64_t n_samples, std::uint64_t seed, unsigned workers)
{
    require_samples(n_samples, 1000, "estimate_noise_sensitivity");
    const int n = body.dimension();
    const auto* sym = dynamic_cast<const SymmetricBody*>(&body);

    const auto tally = run_chunked<Tally>(n_samples, seed, resolve_workers(workers),
                                          [&](Rng& rng, std::uint64_t begin, std::uint64_t end) {
        Tally t;
        std::vector<double> x(n), u(n), y(n);
        LatticeVector rx(n), ry(n);
        for (std::uint64_t s = begin; s < end; ++s) {
            fill_uniform(rng, x);
            sample_step(family, rng, u);
            add_scaled(x, 1.0, u, y);
            try {
                if (sym) {
                    const double zx = sym->center(x).z;
                    const double zy = sym->center(y).z;
                    bool failed = zx != zy;
                    for (int i = 0; i < n && !failed; ++i)
                        failed = segment_contains_level(x[i], u[i], zx);
                    t.aux += failed;
                    round_with_level(x, zx, rx);
                    round_with_level(y, zy, ry);
                } else {
                    body.round_into(x, rx);
                    body.round_into(y, ry);
                }
                t.hits += rx != ry;
            } catch (const SamplingBudgetError&) {
                ++t.budget;
                ++t.hits;
                ++t.aux;
            }
        }
        return t;
    });

    NoiseSensitivityReport report;
    report.ns = proportion_estimate(tally.hits, n_samples, seed);
    if (sym)
        report.condition_failure = proportion_estimate(tally.aux, n_samples, seed);
    report.budget_errors = tally.budget;
    return report;
}

MCEstimate estimate_escape(const TilingBody& body, const StepFamily& family, std::uint64_t n_samples,
                           int k_subdiv, std::uint64_t seed, unsigned workers)
{
    require_samples(n_samples, 1, "estimate_escape");
    if (k_subdiv < 1)
        throw std::invalid_argument("estimate_escape: k_subdiv must be positive");
    const int n = body.dimension();

    const auto tally = run_chunked<Tally>(n_samples, seed, resolve_workers(workers),
                                          [&](Rng& rng, std::uint64_t begin, std::uint64_t end) {
        Tally t;
        std::vector<double> x(n), u(n), y(n);
        LatticeVector r0(n), r(n);
        for (std::uint64_t s = begin; s < end; ++s) {
            fill_uniform(rng, x);
            sample_step(family, rng, u);
            body.round_into(x, r0);
            for (int j = 1; j <= k_subdiv; ++j) {
                add_scaled(x, static_cast<double>(j) / k_subdiv, u, y);
                body.round_into(y, r);
                if (r != r0) {
                    ++t.hits;
                    break;
                }
            }
        }
        return t;
    });
    return proportion_estimate(tally.hits, n_samples, seed);
}

MCEstimate estimate_escape(const TilingBody& body, double sigma, std::uint64_t n_samples, int k_subdiv,
                           std::uint64_t seed, unsigned workers)
{
    return estimate_escape(body, StepFamily::gaussian(sigma), n_samples, k_subdiv, seed, workers);
}

int count_crossings(const TilingBody& body, std::span<const double> x, std::span<const double> u, int k_subdiv)
{
    if (k_subdiv < 1)
        throw std::invalid_argument("count_crossings: k_subdiv must be positive");
    if (x.size() != u.size() || static_cast<int>(x.size()) != body.dimension())
        throw std::invalid_argument("count_crossings: dimension mismatch");
    std::vector<double> y(x.size());
    LatticeVector prev(x.size()), cur(x.size());
    body.round_into(x, prev);
    int count = 0;
    for (int j = 1; j <= k_subdiv; ++j) {
        add_scaled(x, static_cast<double>(j) / k_subdiv, u, y);
        body.round_into(y, cur);
        count += cur != prev;
        std::swap(prev, cur);
    }
    return count;
}

namespace {

MCEstimate mean_crossings(const TilingBody& body, double delta, std::uint64_t n_samples, int k_subdiv,
                          std::uint64_t seed, unsigned workers)
{
    require_samples(n_samples, 2, "estimate_surface_area");
    if (!(delta > 0.0))
        throw std::invalid_argument("estimate_surface_area: delta must be positive");
    const int n = body.dimension();
    const double sigma = std::sqrt(delta);
    const auto tally = run_chunked<Tally>(n_samples, seed, resolve_workers(workers),
                                          [&](Rng& rng, std::uint64_t begin, std::uint64_t end) {
        Tally t;
        std::vector<double> x(n), u(n);
        for (std::uint64_t s = begin; s < end; ++s) {
            fill_uniform(rng, x);
            for (auto& v : u)
                v = rng.normal(sigma);
            const double c = count_crossings(body, x, u, k_subdiv);
            t.sum += c;
            t.sum_sq += c * c;
        }
        return t;
    });
    return mean_estimate(tally.sum, tally.sum_sq, n_samples, seed);
}

} // namespace

MCEstimate calibrate_on_cube(int n, double delta, std::uint64_t n_samples, int k_subdiv, std::uint64_t seed,
                             unsigned workers)
{
    const CubeBody cube(n);
    const auto raw = mean_crossings(cube, delta, n_samples, k_subdiv, seed, workers);
    if (!(raw.value > 0.0) || raw.std_error > 0.05 * raw.value)
        throw CalibrationError("cube calibration too noisy: relative stderr above 5%");
    const double scale = 1.0 / (std::sqrt(delta) * 2.0 * n);
    return {raw.value * scale, raw.std_error * scale, raw.n_samples, raw.seed};
}

AreaEstimate estimate_surface_area(const TilingBody& body, double delta, std::uint64_t n_samples, int k_subdiv,
                                   std::uint64_t seed, unsigned workers, std::optional<MCEstimate> calibration)
{
    const auto c = calibration ? *calibration
                               : calibrate_on_cube(body.dimension(), delta, n_samples, k_subdiv, seed, workers);
    AreaEstimate out;
    out.mean_crossings = mean_crossings(body, delta, n_samples, k_subdiv, seed, workers);
    out.calibration_constant = c.value;
    const double denom = c.value * std::sqrt(delta);
    const double area = out.mean_crossings.value / denom;
    // Relative errors of the two independent estimates add in quadrature.
    const double rel_m = out.mean_crossings.value > 0 ? out.mean_crossings.std_error / out.mean_crossings.value : 0.0;
    const double rel_c = c.std_error / c.value;
    out.area = {area, area * std::hypot(rel_m, rel_c), n_samples, seed};
    return out;
}

} // namespace foamlab
