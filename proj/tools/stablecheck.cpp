// Command-line front end: check properties of builtin or JSON models, run
// seeded simulations, detect expansion/contraction episodes in price/supply
// CSVs, and export models as JSON.
//
// Exit codes: 0 verified / success, 1 counter-example or broken/stalled
// episode found, 2 usage or model error, 3 search bound exceeded.

#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "stablecheck/checker.hpp"
#include "stablecheck/empirics.hpp"
#include "stablecheck/model_json.hpp"
#include "stablecheck/models.hpp"
#include "stablecheck/sim.hpp"

using namespace stablecheck;

namespace {

constexpr int kExitVerified = 0;
constexpr int kExitFound = 1;
constexpr int kExitError = 2;
constexpr int kExitBound = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::int64_t parse_int(const std::string& text, const std::string& what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw UsageError("bad integer '" + text + "' for " + what);
    return v;
}

Rational parse_rational(const std::string& text, const std::string& what) {
    try {
        return parse_decimal(text);
    } catch (const std::invalid_argument&) {
        throw UsageError("bad decimal '" + text + "' for " + what);
    }
}

StablecoinKind kind_of(const std::string& name) {
    if (name == "bac") return StablecoinKind::BacSeigniorage;
    if (name == "ampl") return StablecoinKind::AmplRebase;
    if (name == "frax") return StablecoinKind::FraxFractional;
    throw UsageError("unknown builtin '" + name + "' (expected bac, ampl, or frax)");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t from = 0;
    while (true) {
        std::size_t at = s.find(sep, from);
        if (at == std::string::npos) {
            out.push_back(s.substr(from));
            return out;
        }
        out.push_back(s.substr(from, at - from));
        from = at + 1;
    }
}

BacConfig config_with(const std::vector<std::string>& params) {
    BacConfig cfg;
    for (const std::string& kv : params) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
            throw UsageError("--param expects key=value, got '" + kv + "'");
        const std::string key = kv.substr(0, eq);
        const std::string val = kv.substr(eq + 1);
        if (key == "trade_sizes") {
            cfg.trade_sizes.clear();
            for (const std::string& piece : split(val, ','))
                cfg.trade_sizes.push_back(parse_int(piece, key));
        } else if (key == "peg_micro") {
            cfg.peg_micro = parse_int(val, key);
        } else if (key == "initial_supply") {
            cfg.initial_supply = parse_int(val, key);
        } else if (key == "pool_coin") {
            cfg.pool_coin = parse_int(val, key);
        } else if (key == "pool_quote") {
            cfg.pool_quote = parse_int(val, key);
        } else if (key == "expansion_period") {
            cfg.expansion_period = parse_int(val, key);
        } else if (key == "max_rounds") {
            cfg.max_rounds = parse_int(val, key);
        } else if (key == "buys_per_round") {
            cfg.buys_per_round = parse_int(val, key);
        } else if (key == "sells_per_round") {
            cfg.sells_per_round = parse_int(val, key);
        } else if (key == "expansion_mint") {
            cfg.expansion_mint = parse_int(val, key);
        } else if (key == "contraction_burn") {
            cfg.contraction_burn = parse_int(val, key);
        } else {
            throw UsageError("unknown --param key '" + key + "'");
        }
    }
    return cfg;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// temp-and-rename so failures never leave a partial file behind
void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw UsageError("cannot write '" + path + "'");
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw UsageError("failed while writing '" + path + "'");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        std::error_code ec2;
        fs::remove(tmp, ec2);
        throw UsageError("cannot replace '" + path + "': " + ec.message());
    }
}

struct CheckArgs {
    std::string builtin;
    std::string model;
    std::string property;
    std::vector<std::string> params;
    std::size_t max_states = 0;
    std::size_t max_depth = 0;
    std::string trace_out;
};

struct SimArgs {
    std::string builtin = "bac";
    std::vector<std::string> params;
    std::uint64_t seed = 1;
    std::int64_t horizon = 96;
    std::string rate = "0.5";
    std::string bias = "0.5";
    std::vector<std::string> shocks;
    std::string out;
    std::string json_out;
};

struct DetectArgs {
    std::string csv;
    std::string peg = "1";
    std::int64_t window = 7;
    std::string price_eps = "0.005";
    std::string supply_eps = "0.001";
};

struct ExportArgs {
    std::string builtin;
    std::vector<std::string> params;
    std::string out;
};

Network load_network(const std::string& builtin, const std::string& model,
                     const std::vector<std::string>& params,
                     std::optional<StablecoinKind>& kind) {
    if (!builtin.empty()) {
        kind = kind_of(builtin);
        return build_kind(*kind, config_with(params));
    }
    if (model.empty()) throw UsageError("pass --builtin or --model");
    if (!params.empty()) throw UsageError("--param applies to builtins only");
    Network n = network_from_json(read_file(model), standard_update_registry());
    std::vector<Diagnostic> diags = validate(n);
    if (!diags.empty()) {
        for (const Diagnostic& d : diags) std::cerr << d.code << ": " << d.message << "\n";
        throw UsageError("model '" + model + "' failed validation");
    }
    return n;
}

Property resolve_property(const std::string& name, const Network& n,
                          const std::optional<StablecoinKind>& kind) {
    if (name == "trivial-true") return {"trivial-true", StateFormula::truth()};
    if (kind)
        for (Property& p : standard_properties(*kind, n))
            if (p.name == name) return std::move(p);
    if (std::filesystem::exists(name)) return property_from_json(read_file(name), n);
    throw UsageError("property '" + name + "' is neither builtin nor a readable file");
}

int run_check(const CheckArgs& a) {
    std::optional<StablecoinKind> kind;
    Network n = load_network(a.builtin, a.model, a.params, kind);
    Property prop = resolve_property(a.property, n, kind);

    CheckLimits limits;
    if (const char* env = std::getenv("STABLECHECK_MAX_STATES"))
        limits.max_states = std::size_t(parse_int(env, "STABLECHECK_MAX_STATES"));
    if (a.max_states) limits.max_states = a.max_states;
    if (a.max_depth) limits.max_depth = a.max_depth;

    CheckResult res = check(n, prop, limits);
    std::cout << prop.name << ": " << verdict_name(res.verdict) << "\n"
              << "states explored: " << res.states_explored << "\n";
    if (res.verdict == Verdict::CounterExample) {
        const std::string out = a.trace_out.empty() ? prop.name + ".trace.json" : a.trace_out;
        write_atomic(out, trace_to_json(n, prop.name, res));
        std::cout << "trace written: " << out << "\n";
        return kExitFound;
    }
    return res.verdict == Verdict::BoundExceeded ? kExitBound : kExitVerified;
}

SimShock parse_shock(const std::string& text) {
    std::vector<std::string> parts = split(text, ':');
    if (parts.size() != 3)
        throw UsageError("--shock expects start:duration:buy_bias, got '" + text + "'");
    return {parse_int(parts[0], "shock start"), parse_int(parts[1], "shock duration"),
            parse_rational(parts[2], "shock buy_bias")};
}

int run_simulate(const SimArgs& a) {
    std::optional<StablecoinKind> kind;
    Network n = load_network(a.builtin, "", a.params, kind);
    SimConfig cfg;
    cfg.seed = a.seed;
    cfg.horizon_hours = a.horizon;
    cfg.trade_rate = parse_rational(a.rate, "--rate");
    cfg.buy_bias = parse_rational(a.bias, "--bias");
    for (const std::string& s : a.shocks) cfg.shocks.push_back(parse_shock(s));
    Trajectory t = run(n, cfg);
    if (a.out.empty())
        std::cout << export_csv(t);
    else
        write_atomic(a.out, export_csv(t));
    if (!a.json_out.empty()) write_atomic(a.json_out, trajectory_to_json(t));
    return kExitVerified;
}

int run_detect(const DetectArgs& a) {
    TimeSeries ts = ingest_csv(read_file(a.csv), a.csv);
    DetectParams p;
    p.peg = parse_rational(a.peg, "--peg");
    p.window_hours = a.window;
    p.price_eps = parse_rational(a.price_eps, "--price-eps");
    p.supply_eps = parse_rational(a.supply_eps, "--supply-eps");
    std::vector<Episode> episodes = detect_episodes(ts, p);
    std::cout << episodes_to_json_lines(episodes);
    for (const Episode& e : episodes)
        if (e.kind == EpisodeKind::BrokenExpansion || e.kind == EpisodeKind::BrokenContraction ||
            e.kind == EpisodeKind::StalledContraction)
            return kExitFound;
    return kExitVerified;
}

int run_export(const ExportArgs& a) {
    Network n = build_kind(kind_of(a.builtin), config_with(a.params));
    write_atomic(a.out, network_to_json(n));
    return kExitVerified;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Timed-automata verification and simulation of algorithmic stablecoins"};
    app.require_subcommand(1);

    CheckArgs ca;
    CLI::App* check_cmd = app.add_subcommand("check", "Check an always-safe property");
    auto* cb = check_cmd->add_option("--builtin", ca.builtin, "Builtin model: bac, ampl, frax");
    check_cmd->add_option("--model", ca.model, "Model JSON file")->excludes(cb);
    check_cmd
        ->add_option("--property", ca.property,
                     "trivial-true, a builtin property name, or a property JSON file")
        ->required();
    check_cmd->add_option("--param", ca.params, "Builtin config override key=value");
    check_cmd->add_option("--max-states", ca.max_states,
                          "State budget (also env STABLECHECK_MAX_STATES)");
    check_cmd->add_option("--max-depth", ca.max_depth, "Depth budget");
    check_cmd->add_option("--trace-out", ca.trace_out,
                          "Counter-example trace path (default <property>.trace.json)");

    SimArgs sa;
    CLI::App* sim_cmd = app.add_subcommand("simulate", "Run a seeded market simulation");
    sim_cmd->add_option("--builtin", sa.builtin, "Builtin model: bac, ampl, frax");
    sim_cmd->add_option("--param", sa.params, "Builtin config override key=value");
    sim_cmd->add_option("--seed", sa.seed, "RNG seed");
    sim_cmd->add_option("--horizon", sa.horizon, "Hours to simulate");
    sim_cmd->add_option("--rate", sa.rate, "Trade probability per slot per hour");
    sim_cmd->add_option("--bias", sa.bias, "Probability a trade is a buy");
    sim_cmd->add_option("--shock", sa.shocks, "Bias override start:duration:buy_bias");
    sim_cmd->add_option("--out", sa.out, "CSV path (stdout when omitted)");
    sim_cmd->add_option("--json-out", sa.json_out, "Also write the trajectory as JSON");

    DetectArgs da;
    CLI::App* det_cmd = app.add_subcommand("detect", "Detect episodes in a price/supply CSV");
    det_cmd->add_option("--csv", da.csv, "Input CSV")->required();
    det_cmd->add_option("--peg", da.peg, "Peg price");
    det_cmd->add_option("--window", da.window, "Classification window, hours");
    det_cmd->add_option("--price-eps", da.price_eps, "Relative price significance");
    det_cmd->add_option("--supply-eps", da.supply_eps, "Relative supply-event threshold");

    ExportArgs ea;
    CLI::App* exp_cmd = app.add_subcommand("export", "Write a builtin model as JSON");
    exp_cmd->add_option("--builtin", ea.builtin, "Builtin model: bac, ampl, frax")->required();
    exp_cmd->add_option("--param", ea.params, "Builtin config override key=value");
    exp_cmd->add_option("--out", ea.out, "Output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitError;
    }

    try {
        if (check_cmd->parsed()) return run_check(ca);
        if (sim_cmd->parsed()) return run_simulate(sa);
        if (det_cmd->parsed()) return run_detect(da);
        if (exp_cmd->parsed()) return run_export(ea);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
