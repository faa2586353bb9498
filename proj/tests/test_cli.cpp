#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "foamlab");
    std::ostringstream out, err;
    const int code = foamlab::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& s)
{
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);)
        v.push_back(l);
    return v;
}

std::vector<std::string> split(const std::string& s)
{
    std::vector<std::string> v;
    std::istringstream is(s);
    for (std::string f; std::getline(is, f, ',');)
        v.push_back(f);
    return v;
}

// Value of `column` in data row `row` of a CSV result.
std::string field(const std::string& csv, const std::string& column, std::size_t row = 0)
{
    std::vector<std::string> data;
    for (const auto& l : lines(csv))
        if (!l.empty() && l[0] != '#')
            data.push_back(l);
    REQUIRE(data.size() > row + 1);
    const auto header = split(data[0]);
    const auto values = split(data[row + 1]);
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == column)
            return values.at(i);
    FAIL("missing column " << column);
    return {};
}

std::string temp_file(const std::string& name, const std::string& text)
{
    const std::string path = "foamlab_test_" + name;
    std::ofstream(path) << text;
    return path;
}

} // namespace

TEST_CASE("float formatting")
{
    CHECK(foamlab::cli::fmt(0.1) == "0.10000000000000001");
    CHECK(foamlab::cli::fmt(2.0) == "2");
}

TEST_CASE("build-body")
{
    const auto a = run({"build-body", "--n", "1024", "--seed", "7"});
    REQUIRE(a.code == 0);
    const auto j = nlohmann::json::parse(a.out);
    CHECK(j["body"]["m"] == 10);
    CHECK(j["seed"] == 7);
    CHECK(run({"build-body", "--n", "1024", "--seed", "7"}).out == a.out);

    const auto m3 = nlohmann::json::parse(run({"build-body", "--n", "64", "--m", "3"}).out);
    CHECK(m3["body"]["m"] == 3);
    CHECK(m3["config"]["m"] == "3");

    CHECK(run({"build-body", "--n", "4"}).code == 2);
    CHECK(run({"build-body", "--n", "64", "--m", "-1"}).code == 2);
}

TEST_CASE("usage errors")
{
    CHECK(run({}).code == 2);
    CHECK(run({"estimate"}).code == 2);
    CHECK(run({"estimate", "ns", "--n", "64", "--bogus"}).code == 2);
    CHECK(run({"estimate", "ns", "--body", "cube", "--n", "64"}).code == 2); // no scale
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"game", "brute", "--n", "4"}).code == 2);
}

TEST_CASE("game brute and resource limits")
{
    const auto r = run({"game", "brute", "--n", "3", "--t", "1"});
    REQUIRE(r.code == 0);
    CHECK(field(r.out, "value") == "5/6");
    CHECK(field(run({"game", "brute", "--n", "5"}).out, "value") == "9/10");
    CHECK(run({"game", "brute", "--n", "7", "--t", "4"}).code == 4);
}

TEST_CASE("game equiv")
{
    const auto r = run({"game", "equiv", "--n", "3", "--t", "2", "--strategy", "parity"});
    REQUIRE(r.code == 0);
    CHECK(field(r.out, "counterexamples") == "0");
    CHECK(r.err.find("0 counterexamples") != std::string::npos);
    const auto all = run({"game", "equiv", "--n", "3", "--t", "1"});
    CHECK(field(all.out, "parity_counterexamples") == "0");
}

TEST_CASE("csv header records command, config and seed")
{
    const auto r = run({"estimate", "ns", "--body", "cube", "--n", "64", "--sigma", "1e-3", "-N", "2000"});
    REQUIRE(r.code == 0);
    const auto l = lines(r.out);
    REQUIRE(l.size() == 5);
    CHECK(l[0] == "# foamlab estimate ns");
    CHECK(l[1].rfind("# config {", 0) == 0);
    CHECK(l[2] == "# seed 0");
    CHECK(l[3].rfind("body,n,body_hash,family,scale,N,value,stderr", 0) == 0);
}

TEST_CASE("cube noise sensitivity matches quadrature")
{
    const double sigma = 1e-3;
    const auto r = run({"estimate", "ns", "--body", "cube", "--n", "256", "--sigma", "1e-3", "-N", "40000"});
    REQUIRE(r.code == 0);
    const double v = std::stod(field(r.out, "value"));
    const double se = std::stod(field(r.out, "stderr"));
    CHECK(std::abs(v - oracle::cube_noise_sensitivity(256, sigma)) < 4 * se);
}

TEST_CASE("eps list gives monotone rows")
{
    const auto r = run({"estimate", "ns", "--body", "cube", "--n", "64", "--eps-list", "1e-2,1e-3", "-N", "20000"});
    REQUIRE(r.code == 0);
    CHECK(std::stod(field(r.out, "value", 0)) > std::stod(field(r.out, "value", 1)));
}

TEST_CASE("seed from environment and config file")
{
    ::setenv("FOAMLAB_SEED", "5", 1);
    const auto env = run({"estimate", "escape", "--body", "cube", "--n", "16", "--sigma", "0.01", "-N", "2000"});
    CHECK(lines(env.out).at(2) == "# seed 5");
    const auto flag = run({"estimate", "escape", "--body", "cube", "--n", "16", "--sigma", "0.01", "-N", "2000",
                           "--seed", "9"});
    CHECK(lines(flag.out).at(2) == "# seed 9");
    ::unsetenv("FOAMLAB_SEED");

    const auto cfg = temp_file("cfg.json", R"({"n": 16, "body": "cube", "sigma": [0.01], "samples": 2000, "seed": 5})");
    const auto from_cfg = run({"estimate", "escape", "--config", cfg});
    REQUIRE(from_cfg.code == 0);
    CHECK(from_cfg.out == env.out);

    // The command line wins over the file.
    const auto over = run({"estimate", "escape", "--config", cfg, "--seed", "9"});
    CHECK(over.out == flag.out);

    const auto bad = temp_file("bad.json", R"({"n": 16, "nonsense": 1})");
    CHECK(run({"estimate", "escape", "--config", bad}).code == 2);
    std::remove(cfg.c_str());
    std::remove(bad.c_str());
}

TEST_CASE("body descriptors round trip")
{
    const auto built = run({"build-body", "--n", "16", "--seed", "3"});
    const auto path = temp_file("body.json", built.out);
    const auto fp = nlohmann::json::parse(built.out)["fingerprint"].get<std::string>();
    const auto r = run({"estimate", "escape", "--body", path, "--sigma", "1e-2", "-N", "2000"});
    REQUIRE(r.code == 0);
    CHECK(field(r.out, "body_hash") == fp);
    CHECK(run({"estimate", "escape", "--body", path, "--n", "32", "--sigma", "1e-2", "-N", "2000"}).code == 2);
    std::remove(path.c_str());
}

TEST_CASE("sampling budget exit code")
{
    const std::string body = R"({"kind":"symmetric","n":64,"m":4,"seed":1,"width_inv":769.6,"max_sampling_rounds":1})";
    CHECK(run({"estimate", "ns", "--body", body, "--sigma", "1e-3", "-N", "2000"}).code == 3);
}

TEST_CASE("output is independent of worker count")
{
    for (const std::vector<std::string>& cmd :
         {std::vector<std::string>{"estimate", "ns", "--n", "16", "--eps-list", "0.1", "-N", "3000"},
          std::vector<std::string>{"estimate", "area", "--n", "16", "--delta-list", "1e-2", "-N", "3000"},
          std::vector<std::string>{"game", "eval", "--n", "15", "--t", "2", "-N", "3000", "--indecisive-boxes",
                                   "200"}}) {
        auto one = cmd, three = cmd;
        one.insert(one.end(), {"--workers", "1"});
        three.insert(three.end(), {"--workers", "3"});
        const auto a = run(one);
        const auto b = run(three);
        REQUIRE(a.code == 0);
        CHECK(a.out == b.out);
    }
}

TEST_CASE("lower-bound row")
{
    const auto r = run({"estimate", "lb", "--n", "64", "-N", "2000"});
    REQUIRE(r.code == 0);
    const double p = std::stod(field(r.out, "pr_energy_forward_gt_backward"));
    const double se = std::stod(field(r.out, "pr_energy_forward_gt_backward_stderr"));
    CHECK(p <= 0.5 + 3 * se);
}

TEST_CASE("game eval and decency")
{
    const auto r = run({"game", "eval", "--n", "15", "--t", "1,2", "-N", "4000", "--indecisive-boxes", "500"});
    REQUIRE(r.code == 0);
    for (std::size_t row : {0u, 1u}) {
        const double abort = std::stod(field(r.out, "abort_rate", row));
        const double ind = std::stod(field(r.out, "indecisive_rate", row));
        const double ind_se = std::stod(field(r.out, "indecisive_rate_stderr", row));
        CHECK(abort <= ind + 3 * ind_se + 3 * std::stod(field(r.out, "abort_rate_stderr", row)));
        CHECK(std::stod(field(r.out, "success", row)) > 0.5);
    }
    const auto d = run({"game", "decency", "--n", "15", "--t", "3", "-N", "4000", "--points", "500"});
    REQUIRE(d.code == 0);
    CHECK(field(d.out, "k") == "7");
    const auto dump = run({"game", "eval", "--n", "3", "--t", "1", "--strategy", "parity", "--dump-table"});
    const auto j = nlohmann::json::parse(dump.out);
    CHECK(j["tables"][0]["answers"].size() == 3);
}

TEST_CASE("output file")
{
    const std::string path = "foamlab_test_out.csv";
    const auto r = run({"game", "brute", "--n", "3", "-o", path});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    CHECK(ss.str().find("5/6") != std::string::npos);
    std::remove(path.c_str());
}
