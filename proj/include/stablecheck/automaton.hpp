#pragma once

// Networks of timed automata with handshake channels and bounded integer
// variables, plus the symbolic successor relation over zones.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "stablecheck/zone.hpp"

namespace stablecheck {

using VarValue = std::int64_t;

// ── errors ──────────────────────────────────────────────────────────────────

struct InvariantEmpty : std::runtime_error {
    InvariantEmpty() : std::runtime_error("initial invariants contradict clock zero") {}
};

struct UpdateOutOfRange : std::runtime_error {
    UpdateOutOfRange(const std::string& var, VarValue got, VarValue lo, VarValue hi)
        : std::runtime_error("update drove variable '" + var + "' to " + std::to_string(got) +
                             ", outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]") {}
};

struct UnknownUpdate : std::runtime_error {
    explicit UnknownUpdate(const std::string& fn)
        : std::runtime_error("update function '" + fn + "' is not registered") {}
};

// ── guards over variables ───────────────────────────────────────────────────

enum class CmpOp { Lt, Le, Eq, Ne, Ge, Gt };

const char* cmp_op_token(CmpOp op);

// var <op> (constant | other var)
struct VarPredicate {
    int var = -1;
    CmpOp op = CmpOp::Eq;
    bool rhs_is_var = false;
    VarValue rhs_const = 0;
    int rhs_var = -1;

    static VarPredicate against_const(int var, CmpOp op, VarValue c) {
        return {var, op, false, c, -1};
    }
    static VarPredicate against_var(int var, CmpOp op, int other) {
        return {var, op, true, 0, other};
    }
    bool eval(std::span<const VarValue> vals) const;
};

// ── structure ───────────────────────────────────────────────────────────────

// Named update plus integer parameters; the function body lives in the
// network's registry. An empty name means "no update".
struct UpdateCall {
    std::string fn;
    std::vector<VarValue> args;

    bool empty() const { return fn.empty(); }
    bool operator==(const UpdateCall&) const = default;
};

// Mutates the valuation in place. Args come from the UpdateCall.
using UpdateFn = std::function<void(std::span<VarValue>, std::span<const VarValue>)>;

enum class SyncDir { None, Emit, Recv };

struct Edge {
    int source = 0;
    int target = 0;
    std::vector<ClockConstraint> clock_guard;
    std::vector<VarPredicate> var_guard;
    SyncDir sync = SyncDir::None;
    int channel = -1;  // index into Network::channels when sync != None
    std::vector<ClockId> resets;
    UpdateCall update;
};

struct Location {
    std::string name;
    std::vector<ClockConstraint> invariant;
    bool accepting = false;
};

struct Automaton {
    std::string name;
    std::vector<Location> locations;
    int initial = 0;
    std::vector<Edge> edges;
};

struct ChannelDecl {
    std::string name;
};

struct VarDecl {
    std::string name;
    VarValue lo = 0;
    VarValue hi = 0;
    VarValue init = 0;
};

// ClockId = index into this list + 1 (clock 0 is the constant-zero clock).
struct ClockDecl {
    std::string name;
    int owner = -1;  // automaton index, or -1 for a shared clock
};

struct Network {
    std::string name;
    std::vector<Automaton> automata;
    std::vector<ChannelDecl> channels;
    std::vector<VarDecl> vars;
    std::vector<ClockDecl> clocks;
    std::map<std::string, UpdateFn> updates;

    ClockId dim() const { return ClockId(clocks.size() + 1); }

    int automaton_index(std::string_view name) const;
    int var_index(std::string_view name) const;
    int channel_index(std::string_view name) const;
    ClockId clock_id(std::string_view name) const;  // 0 when not found
    std::vector<std::string> clock_names() const;   // index 0 = "0"
};

// ── symbolic states ─────────────────────────────────────────────────────────

struct SymState {
    std::vector<int> locs;  // one location index per automaton
    std::vector<VarValue> vars;
    Zone zone = Zone::zero(1);

    bool operator==(const SymState& o) const {
        return locs == o.locs && vars == o.vars && zone == o.zone;
    }
    std::size_t hash() const;
};

struct FiredEdge {
    int automaton = -1;
    int edge = -1;
    bool operator==(const FiredEdge&) const = default;
};

struct TransitionLabel {
    // one entry for internal steps, two (emitter first) for handshakes
    std::vector<FiredEdge> edges;
    int channel = -1;  // -1 for internal steps
    std::vector<std::pair<int, VarValue>> var_deltas;  // (var index, new - old), sorted

    bool operator==(const TransitionLabel&) const = default;
};

struct Diagnostic {
    std::string code;
    std::string message;
};

struct SuccessorOptions {
    // out-of-range updates throw by default; lenient mode drops the successor
    bool lenient_ranges = false;
};

SymState initial_state(const Network& n);

// All action successors from s after an arbitrary delay: internal edges in
// (automaton, edge) order, then handshakes in (channel, emitter, receiver)
// order. Receiver guards see the pre-handshake valuation; the emitter's
// update applies before the receiver's.
std::vector<std::pair<SymState, TransitionLabel>> successors(
    const Network& n, const SymState& s, const SuccessorOptions& opt = {});

// Re-fires exactly the edges named by the label (used for trace replay).
// Returns nullopt if the label is not enabled from s.
std::optional<std::pair<SymState, TransitionLabel>> fire_label(
    const Network& n, const SymState& s, const TransitionLabel& label,
    const SuccessorOptions& opt = {});

std::vector<Diagnostic> validate(const Network& n);

}  // namespace stablecheck
