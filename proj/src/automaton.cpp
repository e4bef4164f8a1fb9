#include "stablecheck/automaton.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace stablecheck {

const char* cmp_op_token(CmpOp op) {
    switch (op) {
        case CmpOp::Lt: return "<";
        case CmpOp::Le: return "<=";
        case CmpOp::Eq: return "==";
        case CmpOp::Ne: return "!=";
        case CmpOp::Ge: return ">=";
        case CmpOp::Gt: return ">";
    }
    return "?";
}

bool VarPredicate::eval(std::span<const VarValue> vals) const {
    VarValue l = vals[std::size_t(var)];
    VarValue r = rhs_is_var ? vals[std::size_t(rhs_var)] : rhs_const;
    switch (op) {
        case CmpOp::Lt: return l < r;
        case CmpOp::Le: return l <= r;
        case CmpOp::Eq: return l == r;
        case CmpOp::Ne: return l != r;
        case CmpOp::Ge: return l >= r;
        case CmpOp::Gt: return l > r;
    }
    return false;
}

int Network::automaton_index(std::string_view name) const {
    for (std::size_t i = 0; i < automata.size(); ++i)
        if (automata[i].name == name) return int(i);
    return -1;
}

int Network::var_index(std::string_view name) const {
    for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i].name == name) return int(i);
    return -1;
}

int Network::channel_index(std::string_view name) const {
    for (std::size_t i = 0; i < channels.size(); ++i)
        if (channels[i].name == name) return int(i);
    return -1;
}

ClockId Network::clock_id(std::string_view name) const {
    for (std::size_t i = 0; i < clocks.size(); ++i)
        if (clocks[i].name == name) return ClockId(i + 1);
    return kZeroClock;
}

std::vector<std::string> Network::clock_names() const {
    std::vector<std::string> names;
    names.reserve(clocks.size() + 1);
    names.emplace_back("0");
    for (const ClockDecl& c : clocks) names.push_back(c.name);
    return names;
}

std::size_t SymState::hash() const {
    std::size_t h = zone.hash();
    auto mix = [&](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
    for (int l : locs) mix(std::size_t(l));
    for (VarValue v : vars) mix(std::size_t(v));
    return h;
}

namespace {

Zone apply_invariants(const Network& n, const std::vector<int>& locs, Zone z) {
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai) {
        const Location& loc = n.automata[ai].locations[std::size_t(locs[ai])];
        for (const ClockConstraint& cc : loc.invariant) {
            z = z.constrained(cc);
            if (z.is_empty()) return z;
        }
    }
    return z;
}

bool var_guard_holds(const std::vector<VarPredicate>& guard, std::span<const VarValue> vals) {
    for (const VarPredicate& p : guard)
        if (!p.eval(vals)) return false;
    return true;
}

void run_update(const Network& n, const UpdateCall& u, std::vector<VarValue>& vals) {
    if (u.empty()) return;
    auto it = n.updates.find(u.fn);
    if (it == n.updates.end()) throw UnknownUpdate(u.fn);
    it->second(vals, u.args);
}

int range_violation(const Network& n, std::span<const VarValue> vals) {
    for (std::size_t i = 0; i < n.vars.size(); ++i)
        if (vals[i] < n.vars[i].lo || vals[i] > n.vars[i].hi) return int(i);
    return -1;
}

std::optional<std::pair<SymState, TransitionLabel>> try_fire(
    const Network& n, const SymState& s, const Zone& delayed, FiredEdge first,
    std::optional<FiredEdge> second, int channel, const SuccessorOptions& opt) {
    const Edge& e1 = n.automata[std::size_t(first.automaton)].edges[std::size_t(first.edge)];
    if (!var_guard_holds(e1.var_guard, s.vars)) return std::nullopt;
    const Edge* e2 = nullptr;
    if (second) {
        e2 = &n.automata[std::size_t(second->automaton)].edges[std::size_t(second->edge)];
        // receiver guards read the valuation before either update runs
        if (!var_guard_holds(e2->var_guard, s.vars)) return std::nullopt;
    }

    Zone z = delayed;
    for (const ClockConstraint& cc : e1.clock_guard) z = z.constrained(cc);
    if (e2)
        for (const ClockConstraint& cc : e2->clock_guard) z = z.constrained(cc);
    if (z.is_empty()) return std::nullopt;

    std::vector<VarValue> vals = s.vars;
    run_update(n, e1.update, vals);
    if (e2) run_update(n, e2->update, vals);
    if (int bad = range_violation(n, vals); bad >= 0) {
        if (opt.lenient_ranges) return std::nullopt;
        const VarDecl& d = n.vars[std::size_t(bad)];
        throw UpdateOutOfRange(d.name, vals[std::size_t(bad)], d.lo, d.hi);
    }

    std::vector<ClockId> resets = e1.resets;
    if (e2) resets.insert(resets.end(), e2->resets.begin(), e2->resets.end());
    std::sort(resets.begin(), resets.end());
    resets.erase(std::unique(resets.begin(), resets.end()), resets.end());
    if (!resets.empty()) z = z.reset(resets);

    std::vector<int> locs = s.locs;
    locs[std::size_t(first.automaton)] = e1.target;
    if (second) locs[std::size_t(second->automaton)] = e2->target;

    z = apply_invariants(n, locs, std::move(z));
    if (z.is_empty()) return std::nullopt;

    TransitionLabel label;
    label.edges.push_back(first);
    if (second) label.edges.push_back(*second);
    label.channel = channel;
    for (std::size_t i = 0; i < vals.size(); ++i)
        if (vals[i] != s.vars[i]) label.var_deltas.emplace_back(int(i), vals[i] - s.vars[i]);

    SymState ns;
    ns.locs = std::move(locs);
    ns.vars = std::move(vals);
    ns.zone = std::move(z);
    return std::make_pair(std::move(ns), std::move(label));
}

}  // namespace

SymState initial_state(const Network& n) {
    SymState s;
    s.locs.reserve(n.automata.size());
    for (const Automaton& a : n.automata) s.locs.push_back(a.initial);
    s.vars.reserve(n.vars.size());
    for (const VarDecl& v : n.vars) s.vars.push_back(v.init);
    Zone z = apply_invariants(n, s.locs, Zone::zero(n.dim()).up());
    if (z.is_empty()) throw InvariantEmpty();
    s.zone = std::move(z);
    return s;
}

std::vector<std::pair<SymState, TransitionLabel>> successors(const Network& n, const SymState& s,
                                                             const SuccessorOptions& opt) {
    assert(s.locs.size() == n.automata.size());
    assert(s.vars.size() == n.vars.size());
    std::vector<std::pair<SymState, TransitionLabel>> out;
    Zone delayed = apply_invariants(n, s.locs, s.zone.up());
    if (delayed.is_empty()) return out;

    for (int ai = 0; ai < int(n.automata.size()); ++ai) {
        const Automaton& a = n.automata[std::size_t(ai)];
        for (int ei = 0; ei < int(a.edges.size()); ++ei) {
            const Edge& e = a.edges[std::size_t(ei)];
            if (e.sync != SyncDir::None || e.source != s.locs[std::size_t(ai)]) continue;
            if (auto r = try_fire(n, s, delayed, {ai, ei}, std::nullopt, -1, opt))
                out.push_back(std::move(*r));
        }
    }

    for (int c = 0; c < int(n.channels.size()); ++c) {
        for (int ae = 0; ae < int(n.automata.size()); ++ae) {
            const Automaton& em_a = n.automata[std::size_t(ae)];
            for (int ee = 0; ee < int(em_a.edges.size()); ++ee) {
                const Edge& em = em_a.edges[std::size_t(ee)];
                if (em.sync != SyncDir::Emit || em.channel != c ||
                    em.source != s.locs[std::size_t(ae)])
                    continue;
                for (int ar = 0; ar < int(n.automata.size()); ++ar) {
                    if (ar == ae) continue;
                    const Automaton& rv_a = n.automata[std::size_t(ar)];
                    for (int er = 0; er < int(rv_a.edges.size()); ++er) {
                        const Edge& rv = rv_a.edges[std::size_t(er)];
                        if (rv.sync != SyncDir::Recv || rv.channel != c ||
                            rv.source != s.locs[std::size_t(ar)])
                            continue;
                        if (auto r = try_fire(n, s, delayed, {ae, ee}, FiredEdge{ar, er}, c, opt))
                            out.push_back(std::move(*r));
                    }
                }
            }
        }
    }
    return out;
}

std::optional<std::pair<SymState, TransitionLabel>> fire_label(const Network& n, const SymState& s,
                                                               const TransitionLabel& label,
                                                               const SuccessorOptions& opt) {
    if (label.edges.empty() || label.edges.size() > 2) return std::nullopt;
    for (const FiredEdge& fe : label.edges) {
        if (fe.automaton < 0 || fe.automaton >= int(n.automata.size())) return std::nullopt;
        const Automaton& a = n.automata[std::size_t(fe.automaton)];
        if (fe.edge < 0 || fe.edge >= int(a.edges.size())) return std::nullopt;
        if (a.edges[std::size_t(fe.edge)].source != s.locs[std::size_t(fe.automaton)])
            return std::nullopt;
    }
    const Edge& e1 = n.automata[std::size_t(label.edges[0].automaton)]
                         .edges[std::size_t(label.edges[0].edge)];
    if (label.edges.size() == 1) {
        if (e1.sync != SyncDir::None || label.channel != -1) return std::nullopt;
    } else {
        const Edge& e2 = n.automata[std::size_t(label.edges[1].automaton)]
                             .edges[std::size_t(label.edges[1].edge)];
        if (e1.sync != SyncDir::Emit || e2.sync != SyncDir::Recv) return std::nullopt;
        if (e1.channel != label.channel || e2.channel != label.channel) return std::nullopt;
        if (label.edges[0].automaton == label.edges[1].automaton) return std::nullopt;
    }

    Zone delayed = apply_invariants(n, s.locs, s.zone.up());
    if (delayed.is_empty()) return std::nullopt;
    auto second = label.edges.size() == 2 ? std::optional<FiredEdge>(label.edges[1]) : std::nullopt;
    auto r = try_fire(n, s, delayed, label.edges[0], second, label.channel, opt);
    if (!r) return std::nullopt;
    if (r->second.var_deltas != label.var_deltas) return std::nullopt;
    return r;
}

std::vector<Diagnostic> validate(const Network& n) {
    std::vector<Diagnostic> ds;
    auto add = [&](const char* code, std::string msg) {
        ds.push_back({code, std::move(msg)});
    };
    ClockId dim = n.dim();

    for (std::size_t i = 0; i < n.automata.size(); ++i)
        for (std::size_t j = i + 1; j < n.automata.size(); ++j)
            if (n.automata[i].name == n.automata[j].name)
                add("DuplicateAutomaton", "automaton name '" + n.automata[i].name + "' repeats");

    for (std::size_t i = 0; i < n.vars.size(); ++i) {
        const VarDecl& v = n.vars[i];
        if (v.lo > v.hi)
            add("VarRange", "variable '" + v.name + "' has empty range");
        if (v.init < v.lo || v.init > v.hi)
            add("VarRange", "variable '" + v.name + "' starts outside its range");
        for (std::size_t j = i + 1; j < n.vars.size(); ++j)
            if (v.name == n.vars[j].name)
                add("DuplicateVar", "variable name '" + v.name + "' repeats");
    }

    for (std::size_t i = 0; i < n.clocks.size(); ++i) {
        if (n.clocks[i].owner < -1 || n.clocks[i].owner >= int(n.automata.size()))
            add("BadClockOwner", "clock '" + n.clocks[i].name + "' has an invalid owner");
        for (std::size_t j = i + 1; j < n.clocks.size(); ++j)
            if (n.clocks[i].name == n.clocks[j].name)
                add("DuplicateClock", "clock name '" + n.clocks[i].name + "' repeats");
    }

    for (std::size_t i = 0; i < n.channels.size(); ++i)
        for (std::size_t j = i + 1; j < n.channels.size(); ++j)
            if (n.channels[i].name == n.channels[j].name)
                add("DuplicateChannel", "channel name '" + n.channels[i].name + "' repeats");

    auto check_clock = [&](ClockId c, const std::string& where) {
        if (c >= dim) add("UndeclaredClock", where + " references clock " + std::to_string(c));
    };
    auto check_constraints = [&](const std::vector<ClockConstraint>& ccs, const std::string& where) {
        for (const ClockConstraint& cc : ccs) {
            check_clock(cc.left, where);
            check_clock(cc.right, where);
        }
    };

    for (std::size_t ai = 0; ai < n.automata.size(); ++ai) {
        const Automaton& a = n.automata[ai];
        std::string base = "automaton '" + a.name + "'";
        if (a.locations.empty()) {
            add("NoLocations", base + " has no locations");
            continue;
        }
        if (a.initial < 0 || a.initial >= int(a.locations.size()))
            add("BadInitial", base + " initial location index out of range");
        for (std::size_t i = 0; i < a.locations.size(); ++i) {
            check_constraints(a.locations[i].invariant,
                              base + " invariant of '" + a.locations[i].name + "'");
            for (std::size_t j = i + 1; j < a.locations.size(); ++j)
                if (a.locations[i].name == a.locations[j].name)
                    add("DuplicateLocation",
                        base + " repeats location name '" + a.locations[i].name + "'");
        }
        for (std::size_t ei = 0; ei < a.edges.size(); ++ei) {
            const Edge& e = a.edges[ei];
            std::string where = base + " edge " + std::to_string(ei);
            if (e.source < 0 || e.source >= int(a.locations.size()) || e.target < 0 ||
                e.target >= int(a.locations.size()))
                add("BadEdgeEndpoint", where + " has an out-of-range endpoint");
            check_constraints(e.clock_guard, where + " guard");
            for (ClockId r : e.resets) {
                if (r == kZeroClock)
                    add("UndeclaredClock", where + " resets the zero clock");
                else
                    check_clock(r, where + " reset");
            }
            for (const VarPredicate& p : e.var_guard) {
                if (p.var < 0 || p.var >= int(n.vars.size()))
                    add("UndeclaredVar", where + " guard references an undeclared variable");
                if (p.rhs_is_var && (p.rhs_var < 0 || p.rhs_var >= int(n.vars.size())))
                    add("UndeclaredVar", where + " guard references an undeclared variable");
            }
            if (e.sync == SyncDir::None) {
                if (e.channel != -1)
                    add("BadSync", where + " carries a channel without a direction");
            } else if (e.channel < 0 || e.channel >= int(n.channels.size())) {
                add("UndeclaredChannel", where + " syncs on an undeclared channel");
            }
            if (!e.update.empty() && !n.updates.count(e.update.fn))
                add("UnknownUpdate", where + " calls unregistered update '" + e.update.fn + "'");
        }
    }

    // channel pairing: an emit somewhere must have a receive in another automaton
    for (int c = 0; c < int(n.channels.size()); ++c) {
        bool any_emit = false, any_recv = false;
        std::vector<int> emit_autos, recv_autos;
        for (int ai = 0; ai < int(n.automata.size()); ++ai)
            for (const Edge& e : n.automata[std::size_t(ai)].edges) {
                if (e.channel != c) continue;
                if (e.sync == SyncDir::Emit) {
                    any_emit = true;
                    emit_autos.push_back(ai);
                }
                if (e.sync == SyncDir::Recv) {
                    any_recv = true;
                    recv_autos.push_back(ai);
                }
            }
        const std::string& cname = n.channels[std::size_t(c)].name;
        if (any_emit && !any_recv)
            add("UnpairedChannel", "channel '" + cname + "' has emitters but no receiver edge");
        if (any_recv && !any_emit)
            add("UnpairedChannel", "channel '" + cname + "' has receivers but no emitter edge");
        if (any_emit && any_recv) {
            // the only receivers must not all live in the single emitting automaton
            bool pairable = false;
            for (int ea : emit_autos)
                for (int ra : recv_autos)
                    if (ea != ra) pairable = true;
            if (!pairable)
                add("UnpairedChannel",
                    "channel '" + cname + "' only pairs within a single automaton");
        }
    }
    return ds;
}

}  // namespace stablecheck
