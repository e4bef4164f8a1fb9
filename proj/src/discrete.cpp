#include "stablecheck/discrete.hpp"

#include <cstddef>

namespace stablecheck {

namespace {

VarValue clock_value(const DState& s, ClockId c) {
    return c == kZeroClock ? 0 : s.clocks[std::size_t(c) - 1];
}

bool constraint_holds(const DState& s, const ClockConstraint& cc) {
    if (cc.bound.is_infinity()) return true;
    VarValue diff = clock_value(s, cc.left) - clock_value(s, cc.right);
    return cc.bound.is_strict() ? diff < cc.bound.value() : diff <= cc.bound.value();
}

bool guard_holds(const DState& s, const Edge& e) {
    for (const ClockConstraint& cc : e.clock_guard)
        if (!constraint_holds(s, cc)) return false;
    for (const VarPredicate& p : e.var_guard)
        if (!p.eval(s.vars)) return false;
    return true;
}

void run_update(const Network& n, const UpdateCall& u, std::vector<VarValue>& vals) {
    if (u.empty()) return;
    auto it = n.updates.find(u.fn);
    if (it == n.updates.end()) throw UnknownUpdate(u.fn);
    it->second(vals, u.args);
}

std::optional<std::pair<DState, TransitionLabel>> try_fire(const Network& n, const DState& s,
                                                           FiredEdge first,
                                                           std::optional<FiredEdge> second,
                                                           int channel) {
    const Edge& e1 = n.automata[std::size_t(first.automaton)].edges[std::size_t(first.edge)];
    if (!guard_holds(s, e1)) return std::nullopt;
    const Edge* e2 = nullptr;
    if (second) {
        e2 = &n.automata[std::size_t(second->automaton)].edges[std::size_t(second->edge)];
        // receiver guards read the valuation before either update runs
        if (!guard_holds(s, *e2)) return std::nullopt;
    }

    DState next = s;
    run_update(n, e1.update, next.vars);
    if (e2) run_update(n, e2->update, next.vars);
    for (std::size_t i = 0; i < n.vars.size(); ++i) {
        const VarDecl& d = n.vars[i];
        if (next.vars[i] < d.lo || next.vars[i] > d.hi)
            throw UpdateOutOfRange(d.name, next.vars[i], d.lo, d.hi);
    }
    for (ClockId x : e1.resets) next.clocks[std::size_t(x) - 1] = 0;
    if (e2)
        for (ClockId x : e2->resets) next.clocks[std::size_t(x) - 1] = 0;
    next.locs[std::size_t(first.automaton)] = e1.target;
    if (second) next.locs[std::size_t(second->automaton)] = e2->target;
    if (!discrete_invariants_hold(n, next)) return std::nullopt;

    TransitionLabel label;
    label.edges.push_back(first);
    if (second) label.edges.push_back(*second);
    label.channel = channel;
    for (std::size_t i = 0; i < next.vars.size(); ++i)
        if (next.vars[i] != s.vars[i]) label.var_deltas.emplace_back(int(i), next.vars[i] - s.vars[i]);
    return std::make_pair(std::move(next), std::move(label));
}

}  // namespace

DState discrete_initial(const Network& n) {
    DState s;
    s.locs.reserve(n.automata.size());
    for (const Automaton& a : n.automata) s.locs.push_back(a.initial);
    s.vars.reserve(n.vars.size());
    for (const VarDecl& v : n.vars) s.vars.push_back(v.init);
    s.clocks.assign(n.clocks.size(), 0);
    if (!discrete_invariants_hold(n, s)) throw InvariantEmpty();
    return s;
}

bool discrete_invariants_hold(const Network& n, const DState& s) {
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai)
        for (const ClockConstraint& cc :
             n.automata[ai].locations[std::size_t(s.locs[ai])].invariant)
            if (!constraint_holds(s, cc)) return false;
    return true;
}

std::optional<DState> discrete_unit_delay(const Network& n, const DState& s, VarValue cap) {
    DState delayed = s;
    bool moved = false;
    for (VarValue& c : delayed.clocks)
        if (c < cap) {
            ++c;
            moved = true;
        }
    if (!moved || !discrete_invariants_hold(n, delayed)) return std::nullopt;
    return delayed;
}

std::vector<std::pair<DState, TransitionLabel>> discrete_action_successors(const Network& n,
                                                                           const DState& s) {
    std::vector<std::pair<DState, TransitionLabel>> out;
    for (int ai = 0; ai < int(n.automata.size()); ++ai) {
        const Automaton& a = n.automata[std::size_t(ai)];
        for (int ei = 0; ei < int(a.edges.size()); ++ei) {
            const Edge& e = a.edges[std::size_t(ei)];
            if (e.sync != SyncDir::None || e.source != s.locs[std::size_t(ai)]) continue;
            if (auto r = try_fire(n, s, {ai, ei}, std::nullopt, -1)) out.push_back(std::move(*r));
        }
    }
    for (int c = 0; c < int(n.channels.size()); ++c)
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
                        if (auto r = try_fire(n, s, {ae, ee}, FiredEdge{ar, er}, c))
                            out.push_back(std::move(*r));
                    }
                }
            }
        }
    return out;
}

std::optional<DState> discrete_fire_label(const Network& n, const DState& s,
                                          const TransitionLabel& label) {
    if (label.edges.empty() || label.edges.size() > 2) return std::nullopt;
    auto second = label.edges.size() == 2 ? std::optional<FiredEdge>(label.edges[1]) : std::nullopt;
    for (const FiredEdge& fe : label.edges) {
        if (fe.automaton < 0 || fe.automaton >= int(n.automata.size())) return std::nullopt;
        const Automaton& a = n.automata[std::size_t(fe.automaton)];
        if (fe.edge < 0 || fe.edge >= int(a.edges.size())) return std::nullopt;
        if (a.edges[std::size_t(fe.edge)].source != s.locs[std::size_t(fe.automaton)])
            return std::nullopt;
    }
    const Edge& e1 = n.automata[std::size_t(label.edges[0].automaton)]
                         .edges[std::size_t(label.edges[0].edge)];
    if (!second) {
        if (e1.sync != SyncDir::None || label.channel != -1) return std::nullopt;
    } else {
        const Edge& e2 = n.automata[std::size_t(second->automaton)].edges[std::size_t(second->edge)];
        if (e1.sync != SyncDir::Emit || e2.sync != SyncDir::Recv) return std::nullopt;
        if (e1.channel != label.channel || e2.channel != label.channel) return std::nullopt;
        if (label.edges[0].automaton == second->automaton) return std::nullopt;
    }
    auto r = try_fire(n, s, label.edges[0], second, label.channel);
    if (!r || r->second.var_deltas != label.var_deltas) return std::nullopt;
    return std::move(r->first);
}

SymState to_symbolic(const Network& n, const DState& s) {
    SymState sym;
    sym.locs = s.locs;
    sym.vars = s.vars;
    Zone z = Zone::universe(n.dim());
    for (ClockId c = 1; c < n.dim(); ++c) {
        VarValue v = clock_value(s, c);
        z = z.constrained(ClockConstraint::le(c, v)).constrained(ClockConstraint::ge(c, v));
    }
    sym.zone = std::move(z);
    return sym;
}

}  // namespace stablecheck
