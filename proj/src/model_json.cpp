#include "stablecheck/model_json.hpp"

#include <charconv>
#include <sstream>

#include "json.hpp"

namespace stablecheck {

using nlohmann::json;

namespace {

std::vector<std::string> tokens(const std::string& text) {
    std::istringstream in(text);
    std::vector<std::string> out;
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
}

std::optional<CmpOp> parse_op(const std::string& tok) {
    if (tok == "<") return CmpOp::Lt;
    if (tok == "<=") return CmpOp::Le;
    if (tok == "==") return CmpOp::Eq;
    if (tok == "!=") return CmpOp::Ne;
    if (tok == ">=") return CmpOp::Ge;
    if (tok == ">") return CmpOp::Gt;
    return std::nullopt;
}

VarValue parse_int(const std::string& tok, const std::string& context) {
    VarValue v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ModelFormatError("'" + tok + "' is not an integer in \"" + context + "\"");
    return v;
}

struct Id {
    bool is_clock = false;
    ClockId clock = 0;
    int var = -1;
};

Id resolve(const std::string& name, const Network& scope, const std::string& context) {
    if (ClockId c = scope.clock_id(name); c != 0) return {true, c, -1};
    if (int v = scope.var_index(name); v >= 0) return {false, 0, v};
    throw ModelFormatError("unknown identifier '" + name + "' in \"" + context + "\"");
}

void append_clock_atom(ParsedGuard& g, ClockId x, CmpOp op, VarValue c, const std::string& ctx) {
    switch (op) {
        case CmpOp::Lt: g.clocks.push_back(ClockConstraint::lt(x, c)); return;
        case CmpOp::Le: g.clocks.push_back(ClockConstraint::le(x, c)); return;
        case CmpOp::Ge: g.clocks.push_back(ClockConstraint::ge(x, c)); return;
        case CmpOp::Gt: g.clocks.push_back(ClockConstraint::gt(x, c)); return;
        case CmpOp::Eq:
            g.clocks.push_back(ClockConstraint::ge(x, c));
            g.clocks.push_back(ClockConstraint::le(x, c));
            return;
        case CmpOp::Ne: throw ModelFormatError("clocks cannot use != in \"" + ctx + "\"");
    }
}

void append_clock_diff(ParsedGuard& g, ClockId x, ClockId y, CmpOp op, VarValue c,
                       const std::string& ctx) {
    switch (op) {
        case CmpOp::Lt: g.clocks.push_back(ClockConstraint::diff_lt(x, y, c)); return;
        case CmpOp::Le: g.clocks.push_back(ClockConstraint::diff_le(x, y, c)); return;
        // x - y >= c  <=>  y - x <= -c
        case CmpOp::Ge: g.clocks.push_back(ClockConstraint::diff_le(y, x, -c)); return;
        case CmpOp::Gt: g.clocks.push_back(ClockConstraint::diff_lt(y, x, -c)); return;
        case CmpOp::Eq:
            g.clocks.push_back(ClockConstraint::diff_le(x, y, c));
            g.clocks.push_back(ClockConstraint::diff_le(y, x, -c));
            return;
        case CmpOp::Ne: throw ModelFormatError("clocks cannot use != in \"" + ctx + "\"");
    }
}

}  // namespace

ParsedGuard parse_guard_text(const std::string& text, const Network& scope) {
    auto toks = tokens(text);
    ParsedGuard g;
    if (toks.size() == 3) {
        Id lhs = resolve(toks[0], scope, text);
        auto op = parse_op(toks[1]);
        if (!op) throw ModelFormatError("bad comparison '" + toks[1] + "' in \"" + text + "\"");
        VarValue c = parse_int(toks[2], text);
        if (lhs.is_clock) append_clock_atom(g, lhs.clock, *op, c, text);
        else g.vars.push_back(VarPredicate::against_const(lhs.var, *op, c));
        return g;
    }
    if (toks.size() == 5 && toks[1] == "-") {
        Id lhs = resolve(toks[0], scope, text);
        Id rhs = resolve(toks[2], scope, text);
        auto op = parse_op(toks[3]);
        if (!op) throw ModelFormatError("bad comparison '" + toks[3] + "' in \"" + text + "\"");
        VarValue c = parse_int(toks[4], text);
        if (lhs.is_clock != rhs.is_clock)
            throw ModelFormatError("cannot mix clock and variable in \"" + text + "\"");
        if (lhs.is_clock) {
            append_clock_diff(g, lhs.clock, rhs.clock, *op, c, text);
        } else {
            if (c != 0)
                throw ModelFormatError("variable differences compare only against 0 in \"" +
                                       text + "\"");
            g.vars.push_back(VarPredicate::against_var(lhs.var, *op, rhs.var));
        }
        return g;
    }
    throw ModelFormatError("guard \"" + text + "\" is not `id op int` or `id - id op int`");
}

std::string var_guard_text(const VarPredicate& p, const Network& scope) {
    std::ostringstream os;
    os << scope.vars[p.var].name << " ";
    if (p.rhs_is_var)
        os << "- " << scope.vars[p.rhs_var].name << " " << cmp_op_token(p.op) << " 0";
    else
        os << cmp_op_token(p.op) << " " << p.rhs_const;
    return os.str();
}

namespace {

json guards_to_json(const Edge& e, const Network& n, const std::vector<std::string>& clock_names) {
    json out = json::array();
    for (const auto& c : e.clock_guard) {
        if (c.bound.is_infinity()) throw ModelFormatError("guard with infinite bound");
        out.push_back(c.to_string(clock_names));
    }
    for (const auto& p : e.var_guard) out.push_back(var_guard_text(p, n));
    return out;
}

json network_to_value(const Network& n) {
    auto clock_names = n.clock_names();
    json root;
    root["name"] = n.name;
    root["channels"] = json::array();
    for (const auto& ch : n.channels) root["channels"].push_back(ch.name);
    root["vars"] = json::array();
    for (const auto& v : n.vars)
        root["vars"].push_back({{"name", v.name}, {"lo", v.lo}, {"hi", v.hi}, {"init", v.init}});

    for (const auto& c : n.clocks)
        if (c.owner < 0 || c.owner >= int(n.automata.size()))
            throw ModelFormatError("clock '" + c.name + "' has no owning automaton");
    root["automata"] = json::array();
    for (int ai = 0; ai < int(n.automata.size()); ++ai) {
        const Automaton& a = n.automata[ai];
        json ja;
        ja["name"] = a.name;
        ja["clocks"] = json::array();
        for (const auto& c : n.clocks)
            if (c.owner == ai) ja["clocks"].push_back(c.name);
        ja["locations"] = json::array();
        for (const auto& loc : a.locations) {
            json inv = json::array();
            for (const auto& c : loc.invariant) {
                if (c.bound.is_infinity()) throw ModelFormatError("invariant with infinite bound");
                inv.push_back(c.to_string(clock_names));
            }
            ja["locations"].push_back(
                {{"name", loc.name}, {"invariant", inv}, {"accepting", loc.accepting}});
        }
        ja["initial"] = a.locations[a.initial].name;
        ja["edges"] = json::array();
        for (const auto& e : a.edges) {
            json je;
            je["from"] = a.locations[e.source].name;
            je["to"] = a.locations[e.target].name;
            je["guards"] = guards_to_json(e, n, clock_names);
            je["resets"] = json::array();
            for (ClockId r : e.resets) je["resets"].push_back(clock_names[r]);
            if (e.sync == SyncDir::None)
                je["sync"] = nullptr;
            else
                je["sync"] = {{"chan", n.channels[e.channel].name},
                              {"dir", e.sync == SyncDir::Emit ? "emit" : "recv"}};
            if (e.update.empty())
                je["update"] = nullptr;
            else
                je["update"] = {{"fn", e.update.fn}, {"args", e.update.args}};
            ja["edges"].push_back(je);
        }
        root["automata"].push_back(ja);
    }
    return root;
}

const json& field(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end())
        throw ModelFormatError("missing key '" + std::string(key) + "' in " + where);
    return *it;
}

}  // namespace

std::string network_to_json(const Network& n) { return network_to_value(n).dump(2) + "\n"; }

Network network_from_json(const std::string& text, std::map<std::string, UpdateFn> updates) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelFormatError(e.what());
    }
    Network n;
    n.updates = std::move(updates);
    n.name = field(root, "name", "model").get<std::string>();
    for (const auto& ch : field(root, "channels", "model"))
        n.channels.push_back({ch.get<std::string>()});
    for (const auto& v : field(root, "vars", "model"))
        n.vars.push_back({field(v, "name", "var").get<std::string>(),
                          field(v, "lo", "var").get<VarValue>(),
                          field(v, "hi", "var").get<VarValue>(),
                          field(v, "init", "var").get<VarValue>()});

    const json& automata = field(root, "automata", "model");
    // clocks first so guard references resolve across automata
    for (int ai = 0; ai < int(automata.size()); ++ai)
        for (const auto& c : field(automata[ai], "clocks", "automaton"))
            n.clocks.push_back({c.get<std::string>(), ai});

    for (const auto& ja : automata) {
        Automaton a;
        a.name = field(ja, "name", "automaton").get<std::string>();
        for (const auto& jl : field(ja, "locations", a.name)) {
            Location loc;
            loc.name = field(jl, "name", a.name + " location").get<std::string>();
            for (const auto& g : field(jl, "invariant", loc.name)) {
                ParsedGuard parsed = parse_guard_text(g.get<std::string>(), n);
                if (!parsed.vars.empty())
                    throw ModelFormatError("invariant on " + loc.name + " uses a variable");
                loc.invariant.insert(loc.invariant.end(), parsed.clocks.begin(),
                                     parsed.clocks.end());
            }
            loc.accepting = field(jl, "accepting", loc.name).get<bool>();
            a.locations.push_back(std::move(loc));
        }
        auto loc_index = [&](const std::string& name) {
            for (int i = 0; i < int(a.locations.size()); ++i)
                if (a.locations[i].name == name) return i;
            throw ModelFormatError("automaton " + a.name + " has no location '" + name + "'");
        };
        a.initial = loc_index(field(ja, "initial", a.name).get<std::string>());
        for (const auto& je : field(ja, "edges", a.name)) {
            Edge e;
            e.source = loc_index(field(je, "from", a.name + " edge").get<std::string>());
            e.target = loc_index(field(je, "to", a.name + " edge").get<std::string>());
            for (const auto& g : field(je, "guards", a.name + " edge")) {
                ParsedGuard parsed = parse_guard_text(g.get<std::string>(), n);
                e.clock_guard.insert(e.clock_guard.end(), parsed.clocks.begin(),
                                     parsed.clocks.end());
                e.var_guard.insert(e.var_guard.end(), parsed.vars.begin(), parsed.vars.end());
            }
            for (const auto& r : field(je, "resets", a.name + " edge")) {
                ClockId c = n.clock_id(r.get<std::string>());
                if (c == 0)
                    throw ModelFormatError("reset of unknown clock '" + r.get<std::string>() +
                                           "' in automaton " + a.name);
                e.resets.push_back(c);
            }
            const json& sync = field(je, "sync", a.name + " edge");
            if (!sync.is_null()) {
                std::string chan = field(sync, "chan", "sync").get<std::string>();
                std::string dir = field(sync, "dir", "sync").get<std::string>();
                e.channel = n.channel_index(chan);
                if (e.channel < 0) throw ModelFormatError("unknown channel '" + chan + "'");
                if (dir == "emit") e.sync = SyncDir::Emit;
                else if (dir == "recv") e.sync = SyncDir::Recv;
                else throw ModelFormatError("sync dir must be emit or recv, got '" + dir + "'");
            }
            const json& update = field(je, "update", a.name + " edge");
            if (!update.is_null()) {
                e.update.fn = field(update, "fn", "update").get<std::string>();
                for (const auto& arg : field(update, "args", "update"))
                    e.update.args.push_back(arg.get<VarValue>());
            }
            a.edges.push_back(std::move(e));
        }
        n.automata.push_back(std::move(a));
    }
    return n;
}

std::string trace_to_json(const Network& n, const std::string& property,
                          const CheckResult& result) {
    json root;
    root["property"] = property;
    root["verdict"] = verdict_name(result.verdict);
    root["states_explored"] = result.states_explored;
    root["steps"] = json::array();
    if (result.trace) {
        for (const auto& step : result.trace->steps) {
            json js;
            js["automata_fired"] = json::array();
            for (const auto& fe : step.label.edges)
                js["automata_fired"].push_back(n.automata[fe.automaton].name);
            if (step.label.channel >= 0)
                js["channel"] = n.channels[step.label.channel].name;
            else
                js["channel"] = nullptr;
            js["delay"] = rational_to_string(step.delay);
            js["var_deltas"] = json::object();
            for (const auto& [v, d] : step.label.var_deltas)
                js["var_deltas"][n.vars[v].name] = d;
            root["steps"].push_back(js);
        }
    }
    return root.dump(2) + "\n";
}

namespace {

StateFormula formula_from_value(const json& j, const Network& n) {
    if (!j.is_object()) throw ModelFormatError("formula must be an object");
    const std::string op = field(j, "op", "formula").get<std::string>();
    if (op == "true") return StateFormula::truth();
    if (op == "loc") {
        const std::string aname = field(j, "automaton", "loc formula").get<std::string>();
        const int ai = n.automaton_index(aname);
        if (ai < 0) throw ModelFormatError("unknown automaton '" + aname + "' in formula");
        const std::string lname = field(j, "location", "loc formula").get<std::string>();
        const auto& locs = n.automata[std::size_t(ai)].locations;
        for (int li = 0; li < int(locs.size()); ++li)
            if (locs[std::size_t(li)].name == lname) return StateFormula::loc_atom(ai, li);
        throw ModelFormatError("unknown location '" + lname + "' in automaton '" + aname + "'");
    }
    if (op == "var") {
        ParsedGuard g = parse_guard_text(field(j, "pred", "var formula").get<std::string>(), n);
        if (!g.clocks.empty() || g.vars.size() != 1)
            throw ModelFormatError("var formula must be a single variable comparison");
        return StateFormula::var_atom(g.vars[0]);
    }
    if (op == "not")
        return StateFormula::negation(formula_from_value(field(j, "arg", "not formula"), n));
    if (op == "and" || op == "or") {
        std::vector<StateFormula> kids;
        for (const auto& k : field(j, "args", op + " formula"))
            kids.push_back(formula_from_value(k, n));
        return op == "and" ? StateFormula::conjunction(std::move(kids))
                           : StateFormula::disjunction(std::move(kids));
    }
    if (op == "implies")
        return StateFormula::implication(
            formula_from_value(field(j, "lhs", "implies formula"), n),
            formula_from_value(field(j, "rhs", "implies formula"), n));
    throw ModelFormatError("unknown formula op '" + op + "'");
}

}  // namespace

Property property_from_json(const std::string& text, const Network& n) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ModelFormatError(e.what());
    }
    Property p;
    p.name = field(root, "name", "property").get<std::string>();
    p.body = formula_from_value(field(root, "body", "property"), n);
    return p;
}

}  // namespace stablecheck
