#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "foamlab/energy.hpp"
#include "foamlab/game.hpp"
#include "foamlab/needle.hpp"
#include "foamlab/scoring.hpp"
#include "foamlab/tiling.hpp"

namespace foamlab::cli {

using nlohmann::ordered_json;

std::string fmt(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

std::string hex(std::uint64_t v)
{
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct Cell {
    std::string text;
    bool number = false;
};

Cell num(double v)
{
    return {fmt(v), std::isfinite(v)};
}
Cell num(std::uint64_t v)
{
    return {std::to_string(v), true};
}
Cell num(int v)
{
    return {std::to_string(v), true};
}
Cell str(std::string s)
{
    return {std::move(s), false};
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row)
    {
        if (row.size() != columns.size())
            throw std::logic_error("table row width mismatch");
        rows.push_back(std::move(row));
    }
};

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + '"';
}

std::string json_string(const std::string& s)
{
    return ordered_json(s).dump();
}

// Everything a run needs to describe itself.
struct Run {
    std::string command;
    ordered_json config = ordered_json::object();
    std::uint64_t seed = 0;
    std::string format = "csv";
    std::string output;
};

void write_table(const Run& run, const Table& t, std::ostream& os)
{
    if (run.format == "json") {
        os << "{\"command\":" << json_string(run.command) << ",\"config\":" << run.config.dump()
           << ",\"seed\":" << run.seed << ",\"rows\":[";
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            os << (r ? "," : "") << '{';
            for (std::size_t c = 0; c < t.columns.size(); ++c) {
                const auto& cell = t.rows[r][c];
                os << (c ? "," : "") << json_string(t.columns[c]) << ':'
                   << (cell.number ? cell.text : json_string(cell.text));
            }
            os << '}';
        }
        os << "]}\n";
        return;
    }
    os << "# foamlab " << run.command << '\n';
    os << "# config " << run.config.dump() << '\n';
    os << "# seed " << run.seed << '\n';
    for (std::size_t c = 0; c < t.columns.size(); ++c)
        os << (c ? "," : "") << csv_field(t.columns[c]);
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
            os << (c ? "," : "") << csv_field(row[c].text);
        os << '\n';
    }
}

void emit(const Run& run, const std::string& text, std::ostream& out)
{
    if (run.output.empty() || run.output == "-") {
        out << text;
        return;
    }
    std::ofstream f(run.output, std::ios::binary);
    if (!f)
        throw UsageError("cannot open output file " + run.output);
    f << text;
}

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Options shared by most commands; bound to one instance per leaf command.
struct Common {
    int n = 0;
    int m = 0;
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    unsigned workers = 0;
    std::string body = "symmetric";
    std::string format = "csv";
    std::string output;
    std::string config;
};

// Options never written into the recorded config.
const std::set<std::string> kUnrecorded{"help", "config", "workers", "output", "format"};

std::string option_key(const CLI::Option* opt)
{
    auto name = opt->get_single_name();
    while (!name.empty() && name.front() == '-')
        name.erase(name.begin());
    return name;
}

std::string scalar_text(const ordered_json& v, const std::string& key)
{
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number_integer() || v.is_number_unsigned())
        return v.dump();
    if (v.is_number_float())
        return fmt(v.get<double>());
    if (v.is_boolean())
        return v.get<bool>() ? "true" : "false";
    throw UsageError("config key '" + key + "' must be a scalar or a list of scalars");
}

// Fills options absent from the command line from the JSON config. Precedence:
// command line, then config file, then FOAMLAB_SEED for the seed, then defaults.
void apply_config(CLI::App* leaf, const std::string& path)
{
    ordered_json cfg;
    if (!path.empty()) {
        try {
            cfg = ordered_json::parse(read_file(path));
        } catch (const ordered_json::parse_error& e) {
            throw UsageError("config " + path + ": " + e.what());
        }
        if (!cfg.is_object())
            throw UsageError("config " + path + " must hold a JSON object");
    }
    std::set<std::string> known;
    for (CLI::Option* opt : leaf->get_options()) {
        const auto key = option_key(opt);
        known.insert(key);
        if (opt->count() > 0 || kUnrecorded.count(key))
            continue;
        auto it = cfg.find(key);
        if (it == cfg.end()) {
            std::string alt = key;
            std::replace(alt.begin(), alt.end(), '-', '_');
            it = cfg.find(alt);
        }
        if (it != cfg.end()) {
            if (it->is_array())
                for (const auto& v : *it)
                    opt->add_result(scalar_text(v, key));
            else
                opt->add_result(scalar_text(*it, key));
            opt->run_callback();
        } else if (key == "seed") {
            if (const char* env = std::getenv("FOAMLAB_SEED"); env && *env) {
                opt->add_result(env);
                opt->run_callback();
            }
        }
    }
    for (const auto& [key, v] : cfg.items()) {
        std::string dashed = key;
        std::replace(dashed.begin(), dashed.end(), '_', '-');
        if (!known.count(key) && !known.count(dashed))
            throw UsageError("config key '" + key + "' is not an option of this command");
    }
}

ordered_json resolved_config(CLI::App* leaf)
{
    ordered_json cfg = ordered_json::object();
    for (const CLI::Option* opt : leaf->get_options()) {
        const auto key = option_key(opt);
        if (kUnrecorded.count(key))
            continue;
        if (opt->count() > 0) {
            const auto& res = opt->results();
            if (opt->get_expected_max() > 1) {
                cfg[key] = res;
            } else if (opt->get_type_size() == 0) {
                cfg[key] = true;
            } else {
                cfg[key] = res.empty() ? std::string() : res.back();
            }
        } else if (opt->get_type_size() == 0) {
            cfg[key] = false;
        } else if (opt->get_expected_max() > 1) {
            cfg[key] = ordered_json::array();
        } else {
            cfg[key] = opt->get_default_str();
        }
    }
    return cfg;
}

std::shared_ptr<const TilingBody> make_body(const std::string& spec, int n, int m, std::uint64_t seed,
                                            bool small_dimension)
{
    if (spec == "cube") {
        if (n < 1)
            throw UsageError("--n must be positive");
        return std::make_shared<CubeBody>(n);
    }
    if (spec == "symmetric") {
        const auto params = small_dimension ? TilingParams::small_dimension(n, seed, m)
                                            : TilingParams::standard(n, seed, m);
        return std::make_shared<SymmetricBody>(params);
    }
    const std::string text = !spec.empty() && spec.front() == '{' ? spec : read_file(spec);
    auto j = ordered_json::parse(text);
    if (j.contains("body"))
        j = j.at("body");
    std::shared_ptr<const TilingBody> body = body_from_descriptor(j.dump());
    if (n > 0 && body->dimension() != n)
        throw UsageError("body descriptor has dimension " + std::to_string(body->dimension()) + ", expected " +
                         std::to_string(n));
    return body;
}

void add_common(CLI::App* app, Common& c, bool with_body, bool with_samples, std::uint64_t default_samples)
{
    app->add_option("--n", c.n, "dimension (cycle length for game commands)");
    app->add_option("--seed", c.seed, "master seed (default: FOAMLAB_SEED, else 0)");
    if (with_body) {
        app->add_option("--m", c.m, "number of circle intervals (0 = default)")->check(CLI::NonNegativeNumber);
        app->add_option("--body", c.body, "cube, symmetric, a descriptor file or inline descriptor JSON");
    }
    if (with_samples) {
        c.samples = default_samples;
        app->add_option("-N,--samples", c.samples, "Monte Carlo samples");
    }
    app->add_option("--workers", c.workers, "worker threads (0 = hardware threads)");
    app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("-o,--output", c.output, "output file (default: stdout)");
    app->add_option("--config", c.config, "JSON file whose keys mirror the long flags");
}

std::string body_label(const TilingBody& body)
{
    return to_string(body.kind());
}

struct StepScale {
    StepFamily family;
    double scale;
};

std::vector<StepScale> step_scales(const std::string& family, const std::vector<double>& sigmas,
                                   const std::vector<double>& eps, int n)
{
    std::vector<StepScale> out;
    if (family == "gaussian") {
        for (double s : sigmas)
            out.push_back({StepFamily::gaussian(s), s});
        // eps scales the natural width sqrt(ln n)/n.
        for (double e : eps) {
            const double s = e * std::sqrt(std::log(static_cast<double>(n))) / n;
            out.push_back({StepFamily::gaussian(s), s});
        }
    } else {
        if (!sigmas.empty())
            throw UsageError("--sigma applies to the gaussian family only");
        for (double e : eps)
            out.push_back({StepFamily::bernoulli(e, n), e});
    }
    if (out.empty())
        throw UsageError("give at least one scale with --sigma or --eps-list");
    return out;
}

std::unique_ptr<SymStrategy> named_strategy(const std::string& name)
{
    if (name == "parity")
        return std::make_unique<ParityStrategy>();
    if (name == "constant-0")
        return std::make_unique<ConstantStrategy>(0);
    if (name == "constant-1")
        return std::make_unique<ConstantStrategy>(1);
    throw UsageError("unknown strategy " + name);
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"foamlab: tiling bodies, noise sensitivity and symmetric odd cycle games"};
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    // Registered actions; the parsed leaf command runs its own.
    std::function<int(Run&)> action;
    CLI::App* leaf = nullptr;
    Common common;
    auto bind = [&](CLI::App* cmd, std::function<int(Run&)> fn) {
        cmd->callback([&, cmd, fn] {
            leaf = cmd;
            action = fn;
        });
    };

    // build-body
    auto* build = app.add_subcommand("build-body", "serialize a body and its fingerprint");
    std::string build_kind = "symmetric";
    int probes = 1000;
    add_common(build, common, false, false, 0);
    build->add_option("--m", common.m, "number of circle intervals (0 = default)")->check(CLI::NonNegativeNumber);
    build->add_option("--kind", build_kind, "symmetric or cube")->check(CLI::IsMember({"symmetric", "cube"}));
    build->add_option("--probes", probes, "probe points in the fingerprint");
    bind(build, [&](Run& run) {
        const auto body = make_body(build_kind, common.n, common.m, run.seed, false);
        ordered_json j;
        j["command"] = run.command;
        j["config"] = run.config;
        j["seed"] = run.seed;
        j["body"] = ordered_json::parse(body_descriptor_json(*body));
        j["fingerprint"] = hex(body_fingerprint(*body, probes));
        emit(run, j.dump(2) + "\n", out);
        return kOk;
    });

    // estimate
    auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimators");
    estimate->require_subcommand(1);
    std::string family = "gaussian";
    std::vector<double> sigmas, eps, deltas;
    int k_subdiv = 64;
    double c_sigma = 1.0;

    auto* ns = estimate->add_subcommand("ns", "noise sensitivity Pr[R(x) != R(x+u)]");
    add_common(ns, common, true, true, 100000);
    ns->add_option("--family", family, "gaussian or bernoulli")->check(CLI::IsMember({"gaussian", "bernoulli"}));
    ns->add_option("--sigma,--sigma-list", sigmas, "gaussian scales")->delimiter(',');
    ns->add_option("--eps-list", eps, "gaussian: sigma = eps sqrt(ln n)/n; bernoulli: step probability")
        ->delimiter(',');
    bind(ns, [&](Run& run) {
        const auto body = make_body(common.body, common.n, common.m, run.seed, false);
        const auto fp = hex(body_fingerprint(*body));
        Table t{{"body", "n", "body_hash", "family", "scale", "N", "value", "stderr", "condition_failure",
                 "condition_failure_stderr", "budget_errors", "seed"},
                {}};
        std::uint64_t budget = 0;
        for (const auto& s : step_scales(family, sigmas, eps, body->dimension())) {
            const auto rep = estimate_noise_sensitivity(*body, s.family, common.samples, run.seed, common.workers);
            budget += rep.budget_errors;
            t.add({str(body_label(*body)), num(body->dimension()), str(fp), str(family), num(s.scale),
                   num(common.samples), num(rep.ns.value), num(rep.ns.std_error),
                   rep.condition_failure ? num(rep.condition_failure->value) : str(""),
                   rep.condition_failure ? num(rep.condition_failure->std_error) : str(""), num(rep.budget_errors),
                   num(run.seed)});
        }
        std::ostringstream os;
        write_table(run, t, os);
        emit(run, os.str(), out);
        if (budget > 0) {
            err << "foamlab: " << budget << " samples exhausted the sampling budget\n";
            return kSamplingBudget;
        }
        return kOk;
    });

    auto* escape = estimate->add_subcommand("escape", "Pr[segment x -> x+u leaves the cell]");
    add_common(escape, common, true, true, 100000);
    escape->add_option("--family", family, "gaussian or bernoulli")
        ->check(CLI::IsMember({"gaussian", "bernoulli"}));
    escape->add_option("--sigma,--sigma-list", sigmas, "gaussian scales")->delimiter(',');
    escape->add_option("--eps-list", eps, "gaussian: sigma = eps sqrt(ln n)/n; bernoulli: step probability")
        ->delimiter(',');
    escape->add_option("--k-subdiv", k_subdiv, "segment checkpoints minus one");
    bind(escape, [&](Run& run) {
        const auto body = make_body(common.body, common.n, common.m, run.seed, false);
        const auto fp = hex(body_fingerprint(*body));
        Table t{{"body", "n", "body_hash", "family", "scale", "N", "k_subdiv", "value", "stderr", "seed"}, {}};
        for (const auto& s : step_scales(family, sigmas, eps, body->dimension())) {
            const auto e = estimate_escape(*body, s.family, common.samples, k_subdiv, run.seed, common.workers);
            t.add({str(body_label(*body)), num(body->dimension()), str(fp), str(family), num(s.scale),
                   num(common.samples), num(k_subdiv), num(e.value), num(e.std_error), num(run.seed)});
        }
        std::ostringstream os;
        write_table(run, t, os);
        emit(run, os.str(), out);
        return kOk;
    });

    auto* area = estimate->add_subcommand("area", "surface area by needle crossings, calibrated on the cube");
    add_common(area, common, true, true, 100000);
    area->add_option("--delta-list", deltas, "needle variances")->delimiter(',')->required();
    area->add_option("--k-subdiv", k_subdiv, "sub-segments per needle");
    bind(area, [&](Run& run) {
        const auto body = make_body(common.body, common.n, common.m, run.seed, false);
        const auto fp = hex(body_fingerprint(*body));
        const int n = body->dimension();
        Table t{{"body", "n", "body_hash", "delta", "N", "k_subdiv", "mean_crossings", "mean_crossings_stderr",
                 "calibration_constant", "area", "area_stderr", "area_over_cube", "seed"},
                {}};
        for (double d : deltas) {
            const auto a = estimate_surface_area(*body, d, common.samples, k_subdiv, run.seed, common.workers);
            t.add({str(body_label(*body)), num(n), str(fp), num(d), num(common.samples), num(k_subdiv),
                   num(a.mean_crossings.value), num(a.mean_crossings.std_error), num(a.calibration_constant),
                   num(a.area.value), num(a.area.std_error), num(a.area.value / (2.0 * n)), num(run.seed)});
        }
        std::ostringstream os;
        write_table(run, t, os);
        emit(run, os.str(), out);
        return kOk;
    });

    auto* lb = estimate->add_subcommand("lb", "energy events of the lower-bound argument");
    add_common(lb, common, true, true, 10000);
    lb->add_option("--c", c_sigma, "sigma = c sqrt(ln n)/n");
    lb->add_option("--k-subdiv", k_subdiv, "segment checkpoints minus one");
    bind(lb, [&](Run& run) {
        const auto body = make_body(common.body, common.n, common.m, run.seed, false);
        const int n = body->dimension();
        const auto params = EnergyParams::defaults(n, c_sigma);
        const auto r = run_lb_experiment(*body, params, common.samples, run.seed, k_subdiv, common.workers);
        Table t{{"body", "n", "body_hash", "Z", "sigma", "N"}, {}};
        std::vector<Cell> row{str(body_label(*body)), num(n), str(hex(body_fingerprint(*body))), num(params.Z),
                              num(params.sigma), num(common.samples)};
        auto pair = [&](const std::string& name, const MCEstimate& e) {
            t.columns.push_back(name);
            t.columns.push_back(name + "_stderr");
            row.push_back(num(e.value));
            row.push_back(num(e.std_error));
        };
        pair("escape_rate", r.escape_rate);
        pair("pr_energy_forward_gt_backward", r.pr_energy_forward_gt_backward);
        pair("goodness_rate", r.goodness_rate);
        pair("e1", r.e1);
        pair("e2", r.e2);
        pair("e3", r.e3);
        pair("e4", r.e4);
        pair("e5", r.e5);
        pair("e_all", r.e_all);
        t.columns.insert(t.columns.end(), {"e_without_e5", "seed"});
        row.push_back(num(r.e_without_e5));
        row.push_back(num(run.seed));
        t.add(std::move(row));
        std::ostringstream os;
        write_table(run, t, os);
        emit(run, os.str(), out);
        return kOk;
    });

    // game
    auto* game = app.add_subcommand("game", "symmetric parallel repetition of the odd cycle game");
    game->require_subcommand(1);
    int t_single = 1;
    std::vector<int> t_list{1};
    std::string strategy_name = "tiling", equiv_strategy = "all";
    std::uint64_t n_per_box = 400, indecisive_boxes = 2000, points = 2000, inner = 8;
    int k_step = 0;
    bool dump_table = false;

    auto* brute = game->add_subcommand("brute", "exact value over all symmetric strategies");
    add_common(brute, common, false, false, 0);
    brute->add_option("--t", t_single, "repetitions");
    bind(brute, [&](Run& run) {
        const GameInstance g{common.n, t_single};
        const auto r = brute_force(g);
        Table t{{"n", "t", "strategies", "value", "value_float", "best_mask"}, {}};
        t.add({num(g.n), num(g.t), num(r.strategies), str(r.value.str()), num(r.value.value()), num(r.best_mask)});
        std::ostringstream os;
        write_table(run, t, os);
        emit(run, os.str(), out);
        return kOk;
    });

    auto* equiv = game->add_subcommand("equiv", "success versus same cell under the strategy rounding");
    add_common(equiv, common, false, false, 0);
    equiv->add_option("--t", t_single, "repetitions");
    equiv->add_option("--strategy", equiv_strategy, "all, parity, constant-0 or constant-1")
        ->check(CLI::IsMember({"all", "parity", "constant-0", "constant-1"}));
    bind(equiv, [&](Run& run) {
        const GameInstance g{common.n, t_single};
        const auto rep = equiv_strategy == "all" ? check_equivalence_all(g)
                                                 : check_equivalence(g, *named_strategy(equiv_strategy));
        Table t{{"n", "t", "strategy", "strategies", "pairs", "counterexamples", "parity_counterexamples",
                 "strategies_with_counterexample", "first_counterexample"},
                {}};
        t.add({num(g.n), num(g.t), str(equiv_strategy), num(rep.strategies), num(rep.pairs),
               num(rep.counterexamples), num(rep.parity_counterexamples), num(rep.strategies_with_counterexample),
               str(rep.first_counterexample)});
        std::ostringstream os;
        write_table(run, t, os);
        emit(run, os.str(), out);
        err << rep.counterexamples << " counterexamples (" << rep.parity_counterexamples << " modulo 2)\n";
        return kOk;
    });

    auto* eval = game->add_subcommand("eval", "Monte Carlo value of a strategy");
    add_common(eval, common, true, true, 20000);
    eval->add_option("--t", t_list, "repetitions (comma list)")->delimiter(',');
    eval->add_option("--strategy", strategy_name, "tiling, parity, constant-0 or constant-1")
        ->check(CLI::IsMember({"tiling", "parity", "constant-0", "constant-1"}));
    eval->add_option("--n-per-box", n_per_box, "samples per box decision");
    eval->add_option("--indecisive-boxes", indecisive_boxes, "random boxes for the indecisive rate");
    eval->add_flag("--dump-table", dump_table, "print the answer table as JSON (tiny instances)")->default_str("false");
    bind(eval, [&](Run& run) {
        Table t{{"n", "t", "strategy", "body_hash", "N", "success", "success_stderr", "abort_rate",
                 "abort_rate_stderr", "challenge_abort_rate", "challenge_abort_rate_stderr", "indecisive_rate",
                 "indecisive_rate_stderr", "seed"},
                {}};
        ordered_json tables = ordered_json::array();
        for (int tt : t_list) {
            const GameInstance g{common.n, tt};
            g.validate();
            std::unique_ptr<SymStrategy> s;
            std::shared_ptr<const TilingBody> body;
            std::optional<MCEstimate> indecisive;
            if (strategy_name == "tiling") {
                body = make_body(common.body, tt, common.m, run.seed, true);
                s = std::make_unique<TilingStrategy>(body, g, n_per_box, run.seed);
                indecisive = indecisive_box_rate(*body, g.n, indecisive_boxes, n_per_box, 2.0 / 3.0, run.seed,
                                                 common.workers);
            } else {
                s = named_strategy(strategy_name);
            }
            if (dump_table) {
                const auto states = g.state_count(3000);
                ordered_json rows = ordered_json::array();
                for (std::int64_t code = 0; code < states; ++code) {
                    const auto x = challenge_from_code(g, code);
                    const auto a = s->answer(x);
                    rows.push_back({{"x", x}, {"answer", a ? ordered_json(*a) : ordered_json(nullptr)}});
                }
                tables.push_back({{"n", g.n}, {"t", g.t}, {"strategy", s->name()}, {"answers", rows}});
                continue;
            }
            const auto ev = evaluate_strategy(g, *s, common.samples, run.seed, common.workers);
            t.add({num(g.n), num(g.t), str(s->name()), str(body ? hex(body_fingerprint(*body)) : ""),
                   num(common.samples), num(ev.success.value), num(ev.success.std_error),
                   num(ev.answer_abort_rate.value), num(ev.answer_abort_rate.std_error),
                   num(ev.challenge_abort_rate.value), num(ev.challenge_abort_rate.std_error),
                   indecisive ? num(indecisive->value) : str(""), indecisive ? num(indecisive->std_error) : str(""),
                   num(run.seed)});
        }
        if (dump_table) {
            ordered_json j;
            j["command"] = run.command;
            j["config"] = run.config;
            j["seed"] = run.seed;
            j["tables"] = tables;
            emit(run, j.dump(2) + "\n", out);
            return kOk;
        }
        std::ostringstream os;
        write_table(run, t, os);
        emit(run, os.str(), out);
        return kOk;
    });

    auto* decency = game->add_subcommand("decency", "decency probes and the step escape rates");
    add_common(decency, common, true, true, 20000);
    decency->add_option("--t", t_single, "repetitions (body dimension)");
    decency->add_option("--k", k_step, "step multiplier (0 = first prime >= n sqrt(ln t)/t)");
    decency->add_option("--points", points, "base points for the probe average");
    decency->add_option("--inner", inner, "splits per base point");
    bind(decency, [&](Run& run) {
        const GameInstance g{common.n, t_single};
        g.validate();
        const int k = k_step > 0 ? k_step : default_k(g.n, g.t);
        const auto body = make_body(common.body, g.t, common.m, run.seed, true);
        const auto agg = decency_aggregate(*body, g.n, k, points, inner, run.seed, common.workers);
        const auto eta = estimate_escape(*body, game_step(g.n, 1), common.samples, 1, run.seed, common.workers);
        const auto delta = estimate_escape(*body, game_step(g.n, k), common.samples, 1, run.seed, common.workers);
        Table t{{"n", "t", "k", "body_hash", "points", "inner", "mean_probe", "mean_probe_stderr", "eta_marginal",
                 "eta_marginal_stderr", "delta_marginal", "delta_marginal_stderr", "probe_bound", "N", "eta_hat",
                 "eta_hat_stderr", "delta_hat", "delta_hat_stderr", "k_eta_hat", "seed"},
                {}};
        t.add({num(g.n), num(g.t), num(k), str(hex(body_fingerprint(*body))), num(points), num(inner),
               num(agg.mean_probe.value), num(agg.mean_probe.std_error), num(agg.eta_marginal.value),
               num(agg.eta_marginal.std_error), num(agg.delta_marginal.value), num(agg.delta_marginal.std_error),
               num(2.0 * (agg.eta_marginal.value + agg.delta_marginal.value)), num(common.samples),
               num(eta.value), num(eta.std_error), num(delta.value), num(delta.std_error), num(k * eta.value),
               num(run.seed)});
        std::ostringstream os;
        write_table(run, t, os);
        emit(run, os.str(), out);
        return kOk;
    });

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty())
        rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, e2;
        const int code = app.exit(e, o, e2);
        out << o.str();
        err << e2.str();
        return code == 0 ? kOk : kUsage;
    }

    try {
        apply_config(leaf, common.config);
        Run run;
        for (const CLI::App* a = leaf; a && a->get_parent(); a = a->get_parent())
            run.command = a->get_name() + (run.command.empty() ? "" : " " + run.command);
        run.config = resolved_config(leaf);
        run.seed = common.seed;
        run.format = common.format;
        run.output = common.output;
        return action(run);
    } catch (const UsageError& e) {
        err << "foamlab: " << e.what() << '\n';
        return kUsage;
    } catch (const SamplingBudgetError& e) {
        err << "foamlab: sampling budget exhausted: " << e.what() << '\n';
        return kSamplingBudget;
    } catch (const CalibrationError& e) {
        err << "foamlab: " << e.what() << '\n';
        return kSamplingBudget;
    } catch (const ResourceLimitError& e) {
        err << "foamlab: resource limit: " << e.what() << '\n';
        return kResourceLimit;
    } catch (const CLI::ParseError& e) {
        err << "foamlab: " << e.what() << '\n';
        return kUsage;
    } catch (const nlohmann::json::exception& e) {
        err << "foamlab: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "foamlab: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "foamlab: " << e.what() << '\n';
        return kFailure;
    }
}

} // namespace foamlab::cli
