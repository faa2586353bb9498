#pragma once

#include <span>
#include <vector>

namespace foamlab {

/// Fractional part x - floor(x), always in [0,1).
double frac(double x);

/// d(x,y) = min over nonzero integers z of |(x - y) + z|; lies in [0,1].
/// Equals 1 exactly when x == y. Depends on x - y, not only on the fractional
/// parts: d(0.3, 1.3) == 0.
double gap_distance(double x, double y);

/// +1 when some nonzero z attains (x - y) + z == +d(x,y), otherwise -1.
/// When both signs attain d the result is +1.
int gap_sign(double x, double y);

/// True iff x + lambda * delta hits z + w for some lambda in [0,1] and integer w.
bool segment_contains_level(double x, double delta, double z);

/// Sorted multiset of fractional parts. The input to the rounding scheme.
class TorusConfig {
public:
    /// Canonicalizes `raw`: fractional parts sorted ascending by bit pattern.
    /// Throws std::domain_error for fewer than two or non-finite entries.
    static TorusConfig from_raw(std::span<const double> raw);

    std::span<const double> coords() const { return coords_; }
    std::size_t size() const { return coords_.size(); }
    double operator[](std::size_t i) const { return coords_[i]; }

    friend bool operator==(const TorusConfig&, const TorusConfig&) = default;

private:
    explicit TorusConfig(std::vector<double> coords) : coords_(std::move(coords)) {}
    std::vector<double> coords_;
};

inline TorusConfig canonical_config(std::span<const double> raw)
{
    return TorusConfig::from_raw(raw);
}

/// Sorts non-negative doubles by their IEEE bit pattern (numeric order on [0,inf)).
void sort_by_bits(std::span<double> values);

} // namespace foamlab
