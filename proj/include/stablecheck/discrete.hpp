#pragma once

// Concrete execution of a network over integer clock valuations with unit
// delays. Shared by the checker's discrete-time cross-validation oracle and
// by the simulator, which needs to step through individual states rather
// than zones.

#include <optional>
#include <utility>
#include <vector>

#include "stablecheck/automaton.hpp"

namespace stablecheck {

struct DState {
    std::vector<int> locs;
    std::vector<VarValue> vars;
    std::vector<VarValue> clocks;  // index c-1 for clock id c

    auto operator<=>(const DState&) const = default;
};

// Initial locations, variable initials, all clocks zero.
// Throws InvariantEmpty if the initial invariants reject clock zero.
DState discrete_initial(const Network& n);

bool discrete_invariants_hold(const Network& n, const DState& s);

// Advances every clock by one tick, saturating at cap. Returns nullopt when
// no clock can move or the delayed state violates an invariant.
std::optional<DState> discrete_unit_delay(const Network& n, const DState& s, VarValue cap);

// Action successors in the engine's order: internal edges by (automaton,
// edge), then handshakes by (channel, emitter, receiver). Receiver guards
// see the pre-handshake valuation; emitter update runs first.
std::vector<std::pair<DState, TransitionLabel>> discrete_action_successors(
    const Network& n, const DState& s);

// Fires exactly the edges named by the label; nullopt when not enabled.
std::optional<DState> discrete_fire_label(const Network& n, const DState& s,
                                          const TransitionLabel& label);

// The singleton zone at s's clock valuation, for handing a concrete state
// to the symbolic engine.
SymState to_symbolic(const Network& n, const DState& s);

}  // namespace stablecheck
