#pragma once

#include <cmath>
#include <functional>
#include <limits>

namespace oracle {

/// min over nonzero z in [-span, span] of |x - y + z|, by exhaustive scan.
inline double gap_distance_scan(double x, double y, int span = 64)
{
    double best = std::numeric_limits<double>::infinity();
    for (int z = -span; z <= span; ++z)
        if (z != 0)
            best = std::min(best, std::abs(x - y + z));
    return best;
}

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels = 20000)
{
    const double h = (b - a) / panels;
    double s = f(a) + f(b);
    for (int i = 1; i < panels; ++i)
        s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

/// E[min(|u|, 1)] for u ~ N(0, sigma^2): the probability that a uniform point of
/// [0,1) and its perturbation have different floors.
inline double cube_coordinate_crossing(double sigma)
{
    const double pi = 3.14159265358979323846;
    auto phi = [&](double u) { return std::exp(-0.5 * u * u / (sigma * sigma)) / (sigma * std::sqrt(2.0 * pi)); };
    const double hi = std::min(1.0, 12.0 * sigma);
    double inner = 2.0 * simpson([&](double u) { return u * phi(u); }, 0.0, hi);
    if (hi < 1.0)
        return inner;
    const double tail = std::erfc(1.0 / (sigma * std::sqrt(2.0)));
    return inner + tail;
}

/// 1 - prod(1 - q) for n independent coordinates.
inline double cube_noise_sensitivity(int n, double sigma)
{
    return 1.0 - std::pow(1.0 - cube_coordinate_crossing(sigma), n);
}

} // namespace oracle
