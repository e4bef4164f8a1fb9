#pragma once

// Model and trace JSON. Models round-trip: export -> load -> re-export is
// byte-identical (canonical key order, no locale formatting). Guards travel
// as strings in a two-form grammar:
//
//   <id> <op> <int>            e.g.  t <= 24    price > 1000000
//   <id> - <id> <op> <int>     e.g.  t - u < 5  net_flow - next_flow == 0
//
// where <id> names a clock or a variable. Clock `==` guards are accepted as
// sugar for the >=/<= pair; variable differences compare only against 0.
// Update bodies are not serialized — loading binds names against a registry
// supplied by the caller (see models::standard_update_registry).

#include <map>
#include <stdexcept>
#include <string>

#include "stablecheck/automaton.hpp"
#include "stablecheck/checker.hpp"

namespace stablecheck {

struct ModelFormatError : std::runtime_error {
    explicit ModelFormatError(const std::string& why)
        : std::runtime_error("model format: " + why) {}
};

struct ParsedGuard {
    std::vector<ClockConstraint> clocks;
    std::vector<VarPredicate> vars;
};

ParsedGuard parse_guard_text(const std::string& text, const Network& scope);
std::string var_guard_text(const VarPredicate& p, const Network& scope);

std::string network_to_json(const Network& n);
Network network_from_json(const std::string& text, std::map<std::string, UpdateFn> updates);

std::string trace_to_json(const Network& n, const std::string& property,
                          const CheckResult& result);

// Loads an AG property bound to n: {"name": ..., "body": <formula>} where a
// formula is one of
//   {"op": "true"}
//   {"op": "loc", "automaton": A, "location": L}
//   {"op": "var", "pred": "supply >= 0"}        (guard grammar, vars only)
//   {"op": "not", "arg": F}
//   {"op": "and", "args": [F...]}   {"op": "or", "args": [F...]}
//   {"op": "implies", "lhs": F, "rhs": F}
Property property_from_json(const std::string& text, const Network& n);

}  // namespace stablecheck
