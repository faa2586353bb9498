#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "foamlab/rng.hpp"
#include "foamlab/scoring.hpp"

namespace foamlab {

using LatticeVector = std::vector<std::int64_t>;

enum class BodyKind { Symmetric, UnitCube };

const char* to_string(BodyKind kind);

/// A Z^n tiling body, represented by its rounding map R with D = R^{-1}(0).
/// Implementations are immutable; round_into may be called concurrently.
class TilingBody {
public:
    virtual ~TilingBody() = default;

    virtual BodyKind kind() const = 0;
    virtual int dimension() const = 0;
    virtual void round_into(std::span<const double> x, std::span<std::int64_t> out) const = 0;

    LatticeVector round(std::span<const double> x) const;
};

/// D = [0,1)^n; R is coordinatewise floor.
class CubeBody final : public TilingBody {
public:
    explicit CubeBody(int n);

    BodyKind kind() const override { return BodyKind::UnitCube; }
    int dimension() const override { return n_; }
    void round_into(std::span<const double> x, std::span<std::int64_t> out) const override;

private:
    int n_;
};

/// The symmetric body induced by select_center: coordinate i rounds down when its
/// fractional part lies below the chosen level z and up when it lies above.
class SymmetricBody final : public TilingBody {
public:
    explicit SymmetricBody(TilingParams params);

    BodyKind kind() const override { return BodyKind::Symmetric; }
    int dimension() const override { return params_.n; }
    void round_into(std::span<const double> x, std::span<std::int64_t> out) const override;

    const TilingParams& params() const { return params_; }

    /// Level z = S(x) chosen for the multiset of fractional parts of x.
    CenterChoice center(std::span<const double> x) const;

private:
    TilingParams params_;
};

/// Rounds x against a fixed level z in (0,1). Throws std::logic_error when a
/// fractional part equals z.
void round_with_level(std::span<const double> x, double z, std::span<std::int64_t> out);
LatticeVector round_with_level(std::span<const double> x, double z);

inline LatticeVector round_point(const TilingBody& body, std::span<const double> x)
{
    return body.round(x);
}

/// x - R(x); the representative of x inside D.
std::vector<double> mod_cell(const TilingBody& body, std::span<const double> x);

/// Uniform point of [0,1)^n reduced into D; uniform on D.
std::vector<double> sample_in_cell(const TilingBody& body, Rng& rng);

struct U1Report {
    bool cond1_holds = false; ///< same level chosen at x and x + delta
    bool cond2_holds = false; ///< no coordinate segment crosses that level
    bool same_cell = false;
};

U1Report check_u1(const SymmetricBody& body, std::span<const double> x, std::span<const double> delta);

/// True iff no two coordinates of y differ by a nonzero integer.
bool no_integer_gap_check(std::span<const double> y);

/// Hash of the roundings of 1000 fixed probe points; identical bodies agree.
std::uint64_t body_fingerprint(const TilingBody& body, int probes = 1000);

/// Serialized form {kind, n, m, seed, width_inv, max_sampling_rounds}.
std::string body_descriptor_json(const TilingBody& body, int indent = -1);
std::unique_ptr<TilingBody> body_from_descriptor(const std::string& json_text);

} // namespace foamlab
