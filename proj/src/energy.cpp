#include "foamlab/energy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "foamlab/parallel.hpp"

namespace foamlab {

namespace {

// Largest Z * |b - b0| for which exp stays comfortably inside long double range.
constexpr long double kMaxExponent = 10000.0L;

void require_pairs(std::span<const double> a, const char* what)
{
    if (a.size() < 2)
        throw std::invalid_argument(std::string(what) + ": need at least two coordinates");
}

double pair_term(double ai, double aj, double ui, double uj, double Z)
{
    const double d = gap_distance(ai, aj);
    const int g = gap_sign(ai, aj);
    return std::exp(-Z * (d + g * (ui - uj)));
}

double direct_sum(std::span<const double> a, std::span<const double> u, double Z)
{
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            total += pair_term(a[i], a[j], u[i], u[j], Z);
    return total;
}

} // namespace

EnergyParams EnergyParams::defaults(int n, double c)
{
    if (n < 3)
        throw std::invalid_argument("EnergyParams: need n >= 3");
    const double ln = std::log(static_cast<double>(n));
    return {n / (10.0 * ln), c * std::sqrt(ln) / n};
}

double energy_reference(std::span<const double> a, double Z)
{
    require_pairs(a, "energy");
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
            total += std::exp(-Z * gap_distance(a[i], a[j]));
    return total;
}

double linearized_energy_reference(std::span<const double> a, std::span<const double> u, double Z)
{
    require_pairs(a, "linearized_energy");
    if (a.size() != u.size())
        throw std::invalid_argument("linearized_energy: dimension mismatch");
    return direct_sum(a, u, Z);
}

LinearizedEnergy::LinearizedEnergy(std::span<const double> a, double Z) : Z_(Z)
{
    require_pairs(a, "linearized_energy");
    if (!(Z > 0.0) || !std::isfinite(Z))
        throw std::invalid_argument("linearized_energy: Z must be positive");
    for (double v : a)
        if (!std::isfinite(v))
            throw std::domain_error("linearized_energy: non-finite coordinate");

    const auto n = static_cast<std::uint32_t>(a.size());
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0u);
    std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t i, std::uint32_t j) { return a[i] < a[j]; });
    sorted_a_.resize(n);
    for (std::uint32_t r = 0; r < n; ++r)
        sorted_a_[r] = a[order_[r]];

    const long double middle = 0.5L * (static_cast<long double>(sorted_a_.back()) + sorted_a_.front());
    half_spread_ = static_cast<double>(sorted_a_.back() - middle);
    direct_ = Z * half_spread_ > kMaxExponent / 4;

    // For p < q with delta = a_q - a_p the optimal shift is:
    //   +j when delta lies in [j - 1/2, j] (j = 1 covers [0, 1]),
    //   -k when delta lies in (k, k + 1/2).
    range_start_.assign(n + 1, 0);
    if (!direct_) {
        for (std::uint32_t p = 0; p < n; ++p) {
            range_start_[p] = static_cast<std::uint32_t>(ranges_.size());
            std::uint32_t q = p + 1;
            for (int j = 1; q < n; ++j) {
                auto first_beyond = [&](auto pred) {
                    return static_cast<std::uint32_t>(
                        std::partition_point(sorted_a_.begin() + q, sorted_a_.end(), pred) - sorted_a_.begin());
                };
                const double ap = sorted_a_[p];
                const std::uint32_t plus_end = first_beyond([&](double v) { return v - ap <= j; });
                if (plus_end > q)
                    ranges_.push_back({q, plus_end, j, std::exp(-static_cast<long double>(Z) * j)});
                q = plus_end;
                const std::uint32_t minus_end = first_beyond([&](double v) { return v - ap < j + 0.5; });
                if (minus_end > q)
                    ranges_.push_back({q, minus_end, -j, std::exp(static_cast<long double>(Z) * j)});
                q = minus_end;
                if (q < n)
                    j = std::max(j, static_cast<int>(std::floor(sorted_a_[q] - ap)) - 1);
            }
        }
        range_start_[n] = static_cast<std::uint32_t>(ranges_.size());
        base_up_.resize(n);
        base_down_.resize(n);
        for (std::uint32_t r = 0; r < n; ++r) {
            base_up_[r] = std::exp(static_cast<long double>(Z) * (sorted_a_[r] - middle));
            base_down_[r] = 1.0L / base_up_[r];
        }
    }

    const std::vector<double> zero(n, 0.0);
    base_ = evaluate(zero);
}

double LinearizedEnergy::operator()(std::span<const double> u) const
{
    if (u.size() != order_.size())
        throw std::invalid_argument("linearized_energy: dimension mismatch");
    return evaluate(u);
}

double LinearizedEnergy::evaluate(std::span<const double> u) const
{
    const std::size_t n = order_.size();
    thread_local std::vector<double> su;
    su.resize(n);
    double max_u = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        su[r] = u[order_[r]];
        max_u = std::max(max_u, std::abs(su[r]));
    }
    if (direct_ || Z_ * (half_spread_ + max_u) > kMaxExponent / 2)
        return direct_sum(sorted_a_, su, Z_);

    // up[r] = exp(Z b_r), down[r] = exp(-Z b_r) with b = a + u, both relative to
    // the middle of a. Increasing weights use prefix sums and decreasing ones
    // suffix sums, so range differences never subtract a dominant partial sum.
    thread_local std::vector<long double> up_prefix, down_suffix, up, down;
    up.resize(n);
    down.resize(n);
    up_prefix.assign(n + 1, 0.0L);
    down_suffix.assign(n + 1, 0.0L);
    for (std::size_t r = 0; r < n; ++r) {
        const long double w = su[r] == 0.0 ? 1.0L : static_cast<long double>(std::exp(Z_ * su[r]));
        up[r] = base_up_[r] * w;
        down[r] = base_down_[r] / w;
        up_prefix[r + 1] = up_prefix[r] + up[r];
    }
    for (std::size_t r = n; r-- > 0;)
        down_suffix[r] = down_suffix[r + 1] + down[r];

    long double total = 0.0L;
    for (std::size_t p = 0; p < n; ++p) {
        for (auto k = range_start_[p]; k < range_start_[p + 1]; ++k) {
            const auto& rg = ranges_[k];
            if (rg.shift > 0)
                total += rg.scale * down[p] * (up_prefix[rg.end] - up_prefix[rg.begin]);
            else
                total += rg.scale * up[p] * (down_suffix[rg.begin] - down_suffix[rg.end]);
        }
    }
    return static_cast<double>(total);
}

double energy(std::span<const double> a, double Z)
{
    return LinearizedEnergy(a, Z).base();
}

double linearized_energy(std::span<const double> a, std::span<const double> u, double Z)
{
    if (a.size() != u.size())
        throw std::invalid_argument("linearized_energy: dimension mismatch");
    return LinearizedEnergy(a, Z)(u);
}

LinearizedMoments linearized_energy_moments(std::span<const double> a, double Z, double sigma,
                                            std::uint64_t n_draws, std::uint64_t seed, unsigned workers)
{
    if (!(sigma > 0.0))
        throw std::invalid_argument("linearized_energy_moments: sigma must be positive");
    const LinearizedEnergy psi(a, Z);
    const double base = psi.base();
    struct Acc {
        double s = 0.0, s2 = 0.0;
        Acc& operator+=(const Acc& o)
        {
            s += o.s;
            s2 += o.s2;
            return *this;
        }
    };
    const auto acc = run_chunked<Acc>(n_draws, seed, resolve_workers(workers),
                                      [&](Rng& rng, std::uint64_t begin, std::uint64_t end) {
        Acc t;
        std::vector<double> u(a.size());
        for (std::uint64_t s = begin; s < end; ++s) {
            for (auto& v : u)
                v = rng.normal(sigma);
            const double dv = psi(u) - base;
            t.s += dv;
            t.s2 += dv * dv;
        }
        return t;
    });
    auto centered = mean_estimate(acc.s, acc.s2, n_draws, seed);
    const double nn = static_cast<double>(n_draws);
    const double var = std::max(0.0, (acc.s2 - nn * centered.value * centered.value) / (nn - 1.0));
    centered.value += base;
    return {centered, var, base};
}

double coordinate_load(std::span<const double> a, int i, double Z)
{
    require_pairs(a, "coordinate_load");
    if (i < 0 || static_cast<std::size_t>(i) >= a.size())
        throw std::out_of_range("coordinate_load: index out of range");
    double total = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        if (j != static_cast<std::size_t>(i))
            total += std::exp(-Z * gap_distance(a[i], a[j]));
    return total;
}

std::vector<double> coordinate_loads(std::span<const double> a, double Z)
{
    require_pairs(a, "coordinate_loads");
    std::vector<double> loads(a.size(), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = i + 1; j < a.size(); ++j) {
            const double w = std::exp(-Z * gap_distance(a[i], a[j]));
            loads[i] += w;
            loads[j] += w;
        }
    }
    return loads;
}

std::pair<int, int> window_count_range(std::span<const double> a, double width)
{
    if (a.empty())
        throw std::invalid_argument("window_count_range: empty point");
    if (!(width > 0.0 && width < 1.0))
        throw std::invalid_argument("window_count_range: width must lie in (0,1)");
    std::vector<double> f(a.size());
    std::transform(a.begin(), a.end(), f.begin(), [](double v) { return frac(v); });
    std::sort(f.begin(), f.end());
    const auto n = static_cast<long>(f.size());

    // Points of [s, s + width) on the circle.
    auto count = [&](double s) {
        auto idx = [&](double v) { return static_cast<long>(std::lower_bound(f.begin(), f.end(), v) - f.begin()); };
        const double e = s + width;
        if (e <= 1.0)
            return idx(e) - idx(s);
        return (n - idx(s)) + idx(e - 1.0);
    };

    // The count only changes at s = f_i and s = f_i - width; evaluate at each
    // breakpoint and between consecutive ones.
    std::vector<double> breaks;
    breaks.reserve(2 * f.size());
    for (double v : f) {
        breaks.push_back(v);
        breaks.push_back(frac(v - width));
    }
    std::sort(breaks.begin(), breaks.end());
    long lo = n, hi = 0;
    for (std::size_t k = 0; k < breaks.size(); ++k) {
        const double next = k + 1 < breaks.size() ? breaks[k + 1] : breaks[0] + 1.0;
        for (double s : {breaks[k], 0.5 * (breaks[k] + next)}) {
            const long c = count(frac(s));
            lo = std::min(lo, c);
            hi = std::max(hi, c);
        }
    }
    return {static_cast<int>(lo), static_cast<int>(hi)};
}

bool is_good(std::span<const double> a)
{
    const double n = static_cast<double>(a.size());
    const double ln = std::log(n);
    if (ln < 1.0)
        throw std::invalid_argument("is_good: needs ln n >= 1");
    const double width = 10.0 * ln / n;
    if (width >= 1.0)
        return false;
    const auto [lo, hi] = window_count_range(a, width);
    return lo >= ln && hi <= 100.0 * ln;
}

LBExperimentReport run_lb_experiment(const TilingBody& body, const EnergyParams& params, std::uint64_t n_samples,
                                     std::uint64_t seed, int k_subdiv, unsigned workers)
{
    if (n_samples < 1000)
        throw std::invalid_argument("run_lb_experiment: need at least 1000 samples");
    if (k_subdiv < 1)
        throw std::invalid_argument("run_lb_experiment: k_subdiv must be positive");
    if (!(params.Z > 0.0) || !(params.sigma > 0.0))
        throw std::invalid_argument("run_lb_experiment: Z and sigma must be positive");
    const int n = body.dimension();
    const double Z = params.Z;
    const double zs4 = std::pow(Z * params.sigma, 4);

    struct Acc {
        std::uint64_t escape = 0, forward = 0, good = 0, e1 = 0, e2 = 0, e3 = 0, e4 = 0, e5 = 0, e_all = 0, e_no5 = 0;
        Acc& operator+=(const Acc& o)
        {
            escape += o.escape;
            forward += o.forward;
            good += o.good;
            e1 += o.e1;
            e2 += o.e2;
            e3 += o.e3;
            e4 += o.e4;
            e5 += o.e5;
            e_all += o.e_all;
            e_no5 += o.e_no5;
            return *this;
        }
    };

    const auto acc = run_chunked<Acc>(n_samples, seed, resolve_workers(workers),
                                      [&](Rng& rng, std::uint64_t begin, std::uint64_t end) {
        Acc t;
        std::vector<double> x(n), u(n), y(n), plus(n), minus(n);
        LatticeVector r(n);
        for (std::uint64_t s = begin; s < end; ++s) {
            for (auto& v : x)
                v = rng.uniform();
            for (auto& v : u)
                v = rng.normal(params.sigma);
            const auto a = mod_cell(body, x);

            bool inside = true;
            for (int j = 1; j <= k_subdiv && inside; ++j) {
                const double lambda = static_cast<double>(j) / k_subdiv;
                for (int i = 0; i < n; ++i)
                    y[i] = a[i] + lambda * u[i];
                body.round_into(y, r);
                inside = std::all_of(r.begin(), r.end(), [](std::int64_t v) { return v == 0; });
            }
            for (int i = 0; i < n; ++i) {
                plus[i] = a[i] + u[i];
                minus[i] = a[i] - u[i];
            }

            const LinearizedEnergy lin(a, Z);
            const double psi = lin.base();
            const double psi_lin = lin(u);
            const double psi_plus = energy(plus, Z);
            const double psi_minus = energy(minus, Z);

            const bool e1 = inside;
            const bool e2 = psi <= 1.0;
            const bool e3 = std::any_of(u.begin(), u.end(), [](double v) { return std::abs(v) > 1.0 / 20.0; });
            const bool e4 = psi_lin > psi + 0.5 * zs4 * psi;
            const bool e5 = psi_plus > psi;
            const bool e_all = e1 && !e2 && !e3 && e4;

            t.escape += !e1;
            t.forward += psi_plus > psi_minus;
            t.good += is_good(a);
            t.e1 += e1;
            t.e2 += e2;
            t.e3 += e3;
            t.e4 += e4;
            t.e5 += e5;
            t.e_all += e_all;
            t.e_no5 += e_all && !e5;
        }
        return t;
    });

    LBExperimentReport rep;
    rep.n = n;
    rep.params = params;
    auto est = [&](std::uint64_t h) { return proportion_estimate(h, n_samples, seed); };
    rep.escape_rate = est(acc.escape);
    rep.pr_energy_forward_gt_backward = est(acc.forward);
    rep.goodness_rate = est(acc.good);
    rep.e1 = est(acc.e1);
    rep.e2 = est(acc.e2);
    rep.e3 = est(acc.e3);
    rep.e4 = est(acc.e4);
    rep.e5 = est(acc.e5);
    rep.e_all = est(acc.e_all);
    rep.e_without_e5 = acc.e_no5;
    return rep;
}

} // namespace foamlab
