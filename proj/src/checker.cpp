#include "stablecheck/checker.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>

#include "stablecheck/discrete.hpp"

namespace stablecheck {

StateFormula StateFormula::loc_atom(int automaton, int location) {
    StateFormula f;
    f.kind = Kind::LocAtom;
    f.automaton = automaton;
    f.location = location;
    return f;
}

StateFormula StateFormula::var_atom(VarPredicate p) {
    StateFormula f;
    f.kind = Kind::VarAtom;
    f.pred = p;
    return f;
}

StateFormula StateFormula::negation(StateFormula inner) {
    StateFormula f;
    f.kind = Kind::Not;
    f.children.push_back(std::move(inner));
    return f;
}

StateFormula StateFormula::conjunction(std::vector<StateFormula> fs) {
    StateFormula f;
    f.kind = Kind::And;
    f.children = std::move(fs);
    return f;
}

StateFormula StateFormula::disjunction(std::vector<StateFormula> fs) {
    StateFormula f;
    f.kind = Kind::Or;
    f.children = std::move(fs);
    return f;
}

StateFormula StateFormula::implication(StateFormula lhs, StateFormula rhs) {
    StateFormula f;
    f.kind = Kind::Implies;
    f.children.push_back(std::move(lhs));
    f.children.push_back(std::move(rhs));
    return f;
}

bool StateFormula::eval(const std::vector<int>& locs, std::span<const VarValue> vars) const {
    switch (kind) {
        case Kind::True: return true;
        case Kind::LocAtom: return locs[std::size_t(automaton)] == location;
        case Kind::VarAtom: return pred.eval(vars);
        case Kind::Not: return !children[0].eval(locs, vars);
        case Kind::And:
            for (const StateFormula& c : children)
                if (!c.eval(locs, vars)) return false;
            return true;
        case Kind::Or:
            for (const StateFormula& c : children)
                if (c.eval(locs, vars)) return true;
            return false;
        case Kind::Implies: return !children[0].eval(locs, vars) || children[1].eval(locs, vars);
    }
    return true;
}

const char* verdict_name(Verdict v) {
    switch (v) {
        case Verdict::Verified: return "verified";
        case Verdict::CounterExample: return "counter_example";
        case Verdict::BoundExceeded: return "bound_exceeded";
    }
    return "?";
}

std::string rational_to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).convert_to<std::string>();
    return numerator(r).convert_to<std::string>() + "/" + denominator(r).convert_to<std::string>();
}

namespace {

struct Node {
    SymState state;
    std::ptrdiff_t parent = -1;
    TransitionLabel label;  // transition that produced this node
    std::size_t depth = 0;
};

std::vector<ClockId> step_resets(const Network& n, const TransitionLabel& label) {
    std::vector<ClockId> resets;
    for (const FiredEdge& fe : label.edges) {
        const Edge& e = n.automata[std::size_t(fe.automaton)].edges[std::size_t(fe.edge)];
        resets.insert(resets.end(), e.resets.begin(), e.resets.end());
    }
    std::sort(resets.begin(), resets.end());
    resets.erase(std::unique(resets.begin(), resets.end()), resets.end());
    return resets;
}

Zone clip_invariants(const Network& n, const std::vector<int>& locs, Zone z) {
    for (std::size_t ai = 0; ai < n.automata.size(); ++ai)
        for (const ClockConstraint& cc :
             n.automata[ai].locations[std::size_t(locs[ai])].invariant) {
            z = z.constrained(cc);
            if (z.is_empty()) return z;
        }
    return z;
}

Zone clip_guards(const Network& n, const TransitionLabel& label, Zone z) {
    for (const FiredEdge& fe : label.edges) {
        const Edge& e = n.automata[std::size_t(fe.automaton)].edges[std::size_t(fe.edge)];
        for (const ClockConstraint& cc : e.clock_guard) {
            z = z.constrained(cc);
            if (z.is_empty()) return z;
        }
    }
    return z;
}

bool point_in_zone(const std::vector<Rational>& v, const Zone& z) {
    for (ClockId i = 0; i < z.dim(); ++i)
        for (ClockId j = 0; j < z.dim(); ++j) {
            Bound b = z.at(i, j);
            if (b.is_infinity()) continue;
            Rational diff = v[i] - v[j];
            if (b.is_strict() ? !(diff < b.value()) : !(diff <= b.value())) return false;
        }
    return true;
}

// Minimal feasible delays along a node path: a backward pass narrows each
// pre-action zone to the points from which the violation stays reachable,
// then a forward pass walks a concrete rational valuation through them.
std::vector<Rational> concretize_delays(const Network& n, const std::vector<const Node*>& path) {
    std::size_t k = path.size() - 1;
    std::vector<Rational> delays(path.size(), Rational(0));
    if (k == 0) return delays;

    std::vector<Zone> fire_zones(path.size(), Zone::zero(1));  // index i: zone where step i fires
    Zone good = path[k]->state.zone;                           // B_i, backward
    for (std::size_t i = k; i >= 1; --i) {
        Zone pre_reset = good;
        for (ClockId x : step_resets(n, path[i]->label)) pre_reset = pre_reset.freed(x);
        Zone delayed = clip_invariants(n, path[i - 1]->state.locs, path[i - 1]->state.zone.up());
        Zone fire = clip_guards(n, path[i]->label, delayed).intersect(pre_reset);
        if (fire.is_empty()) throw std::logic_error("trace concretization lost the path");
        fire_zones[i] = fire;
        good = path[i - 1]->state.zone.intersect(fire.down());
        if (good.is_empty()) throw std::logic_error("trace concretization lost the path");
    }

    std::vector<Rational> v(n.dim(), Rational(0));
    for (std::size_t i = 1; i <= k; ++i) {
        const Zone& fire = fire_zones[i];
        // v + d must enter `fire`; difference constraints are delay-invariant,
        // so only the bounds against clock 0 constrain d
        Rational lo(0);
        bool lo_strict = false;
        std::optional<Rational> hi;
        bool hi_strict = false;
        for (ClockId c = 1; c < n.dim(); ++c) {
            Bound ub = fire.at(c, kZeroClock);
            if (!ub.is_infinity()) {
                Rational cand = Rational(ub.value()) - v[c];
                if (!hi || cand < *hi || (cand == *hi && ub.is_strict())) {
                    hi = cand;
                    hi_strict = ub.is_strict();
                }
            }
            Bound lb = fire.at(kZeroClock, c);
            if (!lb.is_infinity()) {
                Rational cand = Rational(-lb.value()) - v[c];
                if (cand > lo || (cand == lo && lb.is_strict())) {
                    lo = cand;
                    lo_strict = lb.is_strict();
                }
            }
        }
        if (lo < 0) {
            lo = 0;
            lo_strict = false;
        }
        Rational d;
        if (!lo_strict)
            d = lo;
        else if (hi)
            d = (lo + *hi) / 2;
        else
            d = lo + 1;
        (void)hi_strict;
        for (ClockId c = 1; c < n.dim(); ++c) v[c] += d;
        if (!point_in_zone(v, fire)) throw std::logic_error("delay witness fell outside its zone");
        delays[i] = d;
        for (ClockId x : step_resets(n, path[i]->label)) v[x] = 0;
    }
    return delays;
}

Trace build_trace(const Network& n, const Property& p, const std::vector<Node>& arena,
                  std::size_t leaf) {
    std::vector<const Node*> path;
    for (std::ptrdiff_t i = std::ptrdiff_t(leaf); i >= 0; i = arena[std::size_t(i)].parent)
        path.push_back(&arena[std::size_t(i)]);
    std::reverse(path.begin(), path.end());

    std::vector<Rational> delays = concretize_delays(n, path);

    Trace t;
    t.property = p.name;
    for (std::size_t i = 1; i < path.size(); ++i) {
        TraceStep step;
        step.label = path[i]->label;
        step.delay = delays[i];
        step.locs = path[i]->state.locs;
        step.vars = path[i]->state.vars;
        t.steps.push_back(std::move(step));
    }
    return t;
}

}  // namespace

CheckResult check(const Network& n, const Property& p, const CheckLimits& limits,
                  const CheckOptions& opt) {
    CheckResult res;
    std::vector<Node> arena;
    std::map<LocsVars, std::vector<std::size_t>> seen;
    std::deque<std::size_t> queue;
    bool truncated = false;

    SymState s0 = initial_state(n);
    seen[{s0.locs, s0.vars}].push_back(0);
    arena.push_back({std::move(s0), -1, {}, 0});
    queue.push_back(0);

    while (!queue.empty()) {
        std::size_t idx = queue.front();
        queue.pop_front();
        ++res.states_explored;
        // counter-example check happens at dequeue so the first hit is at
        // minimal BFS depth, tie-broken by exploration order
        if (!p.body.eval(arena[idx].state.locs, arena[idx].state.vars)) {
            res.verdict = Verdict::CounterExample;
            res.trace = build_trace(n, p, arena, idx);
            SymState end = replay(n, *res.trace);
            if (p.body.eval(end.locs, end.vars))
                throw std::logic_error("counter-example trace does not violate the property");
            return res;
        }
        if (res.states_explored >= limits.max_states) {
            truncated = true;
            break;
        }
        if (arena[idx].depth >= limits.max_depth) {
            truncated = true;
            continue;
        }
        std::size_t depth = arena[idx].depth;
        for (auto& [succ, label] : successors(n, arena[idx].state)) {
            LocsVars key{succ.locs, succ.vars};
            auto& bucket = seen[key];
            bool pruned = false;
            for (std::size_t j : bucket) {
                const Zone& old = arena[j].state.zone;
                if (opt.use_subsumption ? old.includes(succ.zone) : old == succ.zone) {
                    pruned = true;
                    break;
                }
            }
            if (pruned) continue;
            bucket.push_back(arena.size());
            arena.push_back({std::move(succ), std::ptrdiff_t(idx), std::move(label), depth + 1});
            queue.push_back(arena.size() - 1);
        }
    }
    res.verdict = truncated ? Verdict::BoundExceeded : Verdict::Verified;
    return res;
}

SymState replay(const Network& n, const Trace& t) {
    SymState s = initial_state(n);
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        auto r = fire_label(n, s, t.steps[i].label);
        if (!r) throw IllegalStep(i);
        if (r->first.locs != t.steps[i].locs || r->first.vars != t.steps[i].vars)
            throw IllegalStep(i);
        s = std::move(r->first);
    }
    return s;
}

// ── discrete-time oracle ────────────────────────────────────────────────────

namespace {

struct DiscreteRun {
    Verdict verdict;
    std::size_t explored;
    std::set<LocsVars> projections;
};

DiscreteRun explore_discrete(const Network& n, const Property* p, VarValue tick_bound) {
    DState s0 = discrete_initial(n);
    DiscreteRun run{Verdict::Verified, 0, {}};
    std::set<DState> visited;
    std::deque<DState> queue;
    visited.insert(s0);
    queue.push_back(std::move(s0));
    while (!queue.empty()) {
        DState cur = std::move(queue.front());
        queue.pop_front();
        ++run.explored;
        run.projections.insert({cur.locs, cur.vars});
        if (p && !p->body.eval(cur.locs, cur.vars)) {
            run.verdict = Verdict::CounterExample;
            return run;
        }
        if (auto d = discrete_unit_delay(n, cur, tick_bound))
            if (visited.insert(*d).second) queue.push_back(std::move(*d));
        for (auto& [nxt, label] : discrete_action_successors(n, cur))
            if (visited.insert(nxt).second) queue.push_back(std::move(nxt));
    }
    return run;
}

}  // namespace

CheckResult check_discrete_oracle(const Network& n, const Property& p, VarValue tick_bound) {
    DiscreteRun run = explore_discrete(n, &p, tick_bound);
    CheckResult res;
    res.verdict = run.verdict;
    res.states_explored = run.explored;
    return res;
}

std::set<LocsVars> discrete_reachable(const Network& n, VarValue tick_bound) {
    return explore_discrete(n, nullptr, tick_bound).projections;
}

std::set<LocsVars> zone_reachable(const Network& n, const CheckLimits& limits) {
    std::set<LocsVars> out;
    std::vector<Node> arena;
    std::map<LocsVars, std::vector<std::size_t>> seen;
    std::deque<std::size_t> queue;
    SymState s0 = initial_state(n);
    seen[{s0.locs, s0.vars}].push_back(0);
    arena.push_back({std::move(s0), -1, {}, 0});
    queue.push_back(0);
    std::size_t explored = 0;
    while (!queue.empty()) {
        std::size_t idx = queue.front();
        queue.pop_front();
        if (++explored > limits.max_states) break;
        out.insert({arena[idx].state.locs, arena[idx].state.vars});
        if (arena[idx].depth >= limits.max_depth) continue;
        std::size_t depth = arena[idx].depth;
        for (auto& [succ, label] : successors(n, arena[idx].state)) {
            LocsVars key{succ.locs, succ.vars};
            auto& bucket = seen[key];
            bool pruned = false;
            for (std::size_t j : bucket)
                if (arena[j].state.zone.includes(succ.zone)) {
                    pruned = true;
                    break;
                }
            if (pruned) continue;
            bucket.push_back(arena.size());
            arena.push_back({std::move(succ), std::ptrdiff_t(idx), std::move(label), depth + 1});
            queue.push_back(arena.size() - 1);
        }
    }
    return out;
}

}  // namespace stablecheck
