#include "foamlab/torus.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace foamlab {

namespace {

void require_finite(double x, const char* what)
{
    if (!std::isfinite(x))
        throw std::domain_error(std::string(what) + ": non-finite input");
}

// Best nonzero shift for d(x,y) together with the attained signed value.
struct GapScan {
    double distance;
    bool positive_attained;
};

GapScan scan_gap(double x, double y)
{
    require_finite(x, "gap_distance");
    require_finite(y, "gap_distance");
    const double diff = x - y;
    // The minimizer satisfies |diff + z| <= 1, so it lies within floor(y - x) +- 2.
    const double base = std::floor(-diff);
    GapScan best{std::numeric_limits<double>::infinity(), false};
    for (int k = -2; k <= 2; ++k) {
        const double z = base + k;
        if (z == 0.0)
            continue;
        const double value = diff + z;
        const double dist = std::abs(value);
        if (dist < best.distance) {
            best = {dist, value >= 0.0};
        } else if (dist == best.distance && value >= 0.0) {
            best.positive_attained = true;
        }
    }
    return best;
}

} // namespace

double frac(double x)
{
    require_finite(x, "frac");
    const double f = x - std::floor(x);
    // Tiny negative inputs round up to exactly 1; keep them on the high side of the circle.
    return f < 1.0 ? f : std::nextafter(1.0, 0.0);
}

double gap_distance(double x, double y)
{
    return scan_gap(x, y).distance;
}

int gap_sign(double x, double y)
{
    return scan_gap(x, y).positive_attained ? +1 : -1;
}

bool segment_contains_level(double x, double delta, double z)
{
    require_finite(x, "segment_contains_level");
    require_finite(delta, "segment_contains_level");
    const double a = x - z;
    const double b = x + delta - z;
    const double lo = std::min(a, b);
    const double hi = std::max(a, b);
    return std::ceil(lo) <= std::floor(hi);
}

void sort_by_bits(std::span<double> values)
{
    std::sort(values.begin(), values.end(), [](double a, double b) {
        return std::bit_cast<std::uint64_t>(a) < std::bit_cast<std::uint64_t>(b);
    });
}

TorusConfig TorusConfig::from_raw(std::span<const double> raw)
{
    if (raw.size() < 2)
        throw std::domain_error("canonical_config: need at least two coordinates");
    std::vector<double> coords(raw.size());
    std::transform(raw.begin(), raw.end(), coords.begin(), [](double v) { return frac(v); });
    sort_by_bits(coords);
    return TorusConfig(std::move(coords));
}

} // namespace foamlab
