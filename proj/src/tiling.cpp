#include "foamlab/tiling.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace foamlab {

const char* to_string(BodyKind kind)
{
    switch (kind) {
    case BodyKind::Symmetric:
        return "symmetric";
    case BodyKind::UnitCube:
        return "cube";
    }
    return "unknown";
}

LatticeVector TilingBody::round(std::span<const double> x) const
{
    if (static_cast<int>(x.size()) != dimension())
        throw std::invalid_argument("round: point dimension does not match the body");
    LatticeVector out(x.size());
    round_into(x, out);
    return out;
}

CubeBody::CubeBody(int n) : n_(n)
{
    if (n < 1)
        throw std::invalid_argument("CubeBody: dimension must be positive");
}

void CubeBody::round_into(std::span<const double> x, std::span<std::int64_t> out) const
{
    for (std::size_t i = 0; i < x.size(); ++i)
        out[i] = static_cast<std::int64_t>(std::floor(x[i]));
}

SymmetricBody::SymmetricBody(TilingParams params) : params_(params)
{
    params_.validate();
}

CenterChoice SymmetricBody::center(std::span<const double> x) const
{
    thread_local std::vector<double> fracs;
    fracs.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        fracs[i] = frac(x[i]);
    return select_center_unsorted(params_, fracs);
}

void SymmetricBody::round_into(std::span<const double> x, std::span<std::int64_t> out) const
{
    round_with_level(x, center(x).z, out);
}

void round_with_level(std::span<const double> x, double z, std::span<std::int64_t> out)
{
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = frac(x[i]);
        if (f < z)
            out[i] = static_cast<std::int64_t>(std::floor(x[i]));
        else if (f > z)
            out[i] = static_cast<std::int64_t>(std::ceil(x[i]));
        else
            throw std::logic_error("round_with_level: fractional part coincides with the chosen level");
    }
}

LatticeVector round_with_level(std::span<const double> x, double z)
{
    LatticeVector out(x.size());
    round_with_level(x, z, out);
    return out;
}

std::vector<double> mod_cell(const TilingBody& body, std::span<const double> x)
{
    const auto r = body.round(x);
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] = x[i] - static_cast<double>(r[i]);
    return y;
}

std::vector<double> sample_in_cell(const TilingBody& body, Rng& rng)
{
    std::vector<double> x(body.dimension());
    for (auto& v : x)
        v = rng.uniform();
    return mod_cell(body, x);
}

U1Report check_u1(const SymmetricBody& body, std::span<const double> x, std::span<const double> delta)
{
    if (x.size() != delta.size())
        throw std::invalid_argument("check_u1: dimension mismatch");
    std::vector<double> moved(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        moved[i] = x[i] + delta[i];

    U1Report report;
    const auto z = body.center(x);
    report.cond1_holds = body.center(moved).z == z.z;
    report.cond2_holds = true;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (segment_contains_level(x[i], delta[i], z.z)) {
            report.cond2_holds = false;
            break;
        }
    }
    report.same_cell = body.round(x) == body.round(moved);
    return report;
}

bool no_integer_gap_check(std::span<const double> y)
{
    std::vector<std::pair<double, double>> keyed(y.size());
    for (std::size_t i = 0; i < y.size(); ++i)
        keyed[i] = {frac(y[i]), y[i]};
    std::sort(keyed.begin(), keyed.end());
    for (std::size_t i = 1; i < keyed.size(); ++i) {
        if (keyed[i].first == keyed[i - 1].first && keyed[i].second != keyed[i - 1].second)
            return false;
    }
    return true;
}

std::uint64_t body_fingerprint(const TilingBody& body, int probes)
{
    Rng rng(0xf1a9e7b0d1ULL, 0);
    std::vector<double> x(body.dimension());
    LatticeVector r(x.size());
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (int p = 0; p < probes; ++p) {
        for (auto& v : x)
            v = 4.0 * rng.uniform() - 2.0;
        body.round_into(x, r);
        for (auto v : r) {
            h ^= static_cast<std::uint64_t>(v);
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

std::string body_descriptor_json(const TilingBody& body, int indent)
{
    nlohmann::ordered_json j;
    j["kind"] = to_string(body.kind());
    j["n"] = body.dimension();
    if (const auto* sym = dynamic_cast<const SymmetricBody*>(&body)) {
        const auto& p = sym->params();
        j["m"] = p.m;
        j["seed"] = p.seed;
        j["width_inv"] = p.width_inv;
        j["max_sampling_rounds"] = p.max_sampling_rounds;
    }
    return j.dump(indent);
}

std::unique_ptr<TilingBody> body_from_descriptor(const std::string& json_text)
{
    const auto j = nlohmann::json::parse(json_text);
    const auto kind = j.at("kind").get<std::string>();
    const int n = j.at("n").get<int>();
    if (kind == "cube")
        return std::make_unique<CubeBody>(n);
    if (kind == "symmetric") {
        TilingParams p;
        p.n = n;
        p.m = j.at("m").get<int>();
        p.seed = j.at("seed").get<std::uint64_t>();
        p.width_inv = j.at("width_inv").get<double>();
        p.max_sampling_rounds = j.at("max_sampling_rounds").get<std::uint64_t>();
        return std::make_unique<SymmetricBody>(p);
    }
    throw std::invalid_argument("body descriptor: unknown kind '" + kind + "'");
}

} // namespace foamlab
