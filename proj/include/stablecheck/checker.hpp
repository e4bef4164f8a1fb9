#pragma once

// Zone-based reachability checking of AG safety properties, with replayable
// shortest counter-example traces and a discrete-time cross-validation oracle.

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "stablecheck/automaton.hpp"
#include "stablecheck/rational.hpp"

namespace stablecheck {

struct IllegalStep : std::runtime_error {
    std::size_t index;
    explicit IllegalStep(std::size_t i)
        : std::runtime_error("trace step " + std::to_string(i) +
                             " is not a legal successor"),
          index(i) {}
};

// ── state formulas ──────────────────────────────────────────────────────────
// Atoms read only (locs, vars); the checked properties never constrain clocks.

struct StateFormula {
    enum class Kind { True, LocAtom, VarAtom, Not, And, Or, Implies };

    Kind kind = Kind::True;
    int automaton = -1;  // LocAtom
    int location = -1;   // LocAtom
    VarPredicate pred;   // VarAtom
    std::vector<StateFormula> children;

    static StateFormula truth() { return {}; }
    static StateFormula loc_atom(int automaton, int location);
    static StateFormula var_atom(VarPredicate p);
    static StateFormula negation(StateFormula f);
    static StateFormula conjunction(std::vector<StateFormula> fs);
    static StateFormula disjunction(std::vector<StateFormula> fs);
    static StateFormula implication(StateFormula lhs, StateFormula rhs);

    bool eval(const std::vector<int>& locs, std::span<const VarValue> vars) const;
};

// AG body — the only supported quantifier; checked as reachability of !body.
struct Property {
    std::string name;
    StateFormula body;
};

// ── results ─────────────────────────────────────────────────────────────────

struct TraceStep {
    TransitionLabel label;
    Rational delay;          // time spent in the source state before firing
    std::vector<int> locs;   // after the step
    std::vector<VarValue> vars;

    bool operator==(const TraceStep&) const = default;
};

struct Trace {
    std::string property;
    std::vector<TraceStep> steps;

    bool operator==(const Trace&) const = default;
};

enum class Verdict { Verified, CounterExample, BoundExceeded };

const char* verdict_name(Verdict v);

struct CheckResult {
    Verdict verdict = Verdict::Verified;
    std::size_t states_explored = 0;
    std::optional<Trace> trace;  // set for CounterExample from check()
};

struct CheckLimits {
    // the default BAC model fully explores in ~5.4M states; leave headroom so
    // default invocations can reach Verified rather than a bound
    std::size_t max_states = 8'000'000;
    std::size_t max_depth = 100'000;
};

struct CheckOptions {
    // inclusion subsumption can be disabled to cross-check that pruning
    // never changes the verdict
    bool use_subsumption = true;
};

// BFS over symbolic states; returns the shortest counter-example (by
// transition count, ties broken by exploration order) or Verified. Bound
// exhaustion yields Verdict::BoundExceeded, never a false Verified.
CheckResult check(const Network& n, const Property& p, const CheckLimits& limits = {},
                  const CheckOptions& opt = {});

// Re-executes a trace from the initial state; throws IllegalStep if any
// recorded transition is not enabled or lands on different (locs, vars).
SymState replay(const Network& n, const Trace& t);

// Independent oracle: exhaustive discrete-time exploration with unit delays
// and clocks saturated at tick_bound. Valid for models whose clock guards
// and invariants are closed (no strict bounds), with constants below
// tick_bound, and no difference guards between distinct clocks.
CheckResult check_discrete_oracle(const Network& n, const Property& p, VarValue tick_bound);

// Reachable (locs, vars) projections from each engine, for set comparison.
using LocsVars = std::pair<std::vector<int>, std::vector<VarValue>>;
std::set<LocsVars> zone_reachable(const Network& n, const CheckLimits& limits = {});
std::set<LocsVars> discrete_reachable(const Network& n, VarValue tick_bound);

// Exact fraction rendering for delays ("3", "3/2").
std::string rational_to_string(const Rational& r);

}  // namespace stablecheck
