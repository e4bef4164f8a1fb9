#pragma once

// Seeded Monte-Carlo execution of a stablecoin network: resolves the model's
// nondeterminism with a reproducible pseudo-random policy and records hourly
// price/supply trajectories.
//
// Each simulated hour proceeds in three phases:
//   1. market phase — for every trade-size slot, a Bernoulli(trade_rate) draw
//      decides whether a trade request arrives; its side is buy with
//      probability buy_bias (or the active shock override). The trade fires
//      as a stage step plus the settling handshake, and is skipped silently
//      when its guards reject it (budget spent, trade already staged).
//   2. protocol phase — enabled non-market transitions fire until none
//      remain, preferring channel synchronizations over internal steps and
//      breaking ties uniformly at random. Supply increases are recorded as
//      ExpansionFired, decreases as ContractionFired, and a supply-preserving
//      bond-swap round as SwapDeclined.
//   3. a sample (price, supply, exchange side) is recorded, then the clocks
//      advance one hour. If invariants block the delay the network is frozen
//      and remaining hours repeat the final sample.
//
// Randomness comes from splitmix64 only: hour h draws from the stream whose
// state is seed advanced h+1 gamma steps, so trajectories are reproducible
// across platforms and independent of draw counts in earlier hours.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "stablecheck/automaton.hpp"
#include "stablecheck/discrete.hpp"
#include "stablecheck/rational.hpp"

namespace stablecheck {

struct SimShock {
    VarValue start_hour = 0;
    VarValue duration_hours = 0;  // active on hours [start, start + duration)
    Rational buy_bias;            // overrides SimConfig::buy_bias while active
};

struct SimConfig {
    std::uint64_t seed = 1;
    VarValue horizon_hours = 96;
    Rational trade_rate = Rational(1, 2);  // expected trade requests per hour per slot
    Rational buy_bias = Rational(1, 2);
    std::vector<SimShock> shocks;
};

enum class MarketSide { Idle, Sell, Buy };

enum class SimEventKind { ExpansionFired, ContractionFired, SwapDeclined };

struct SimSample {
    VarValue hour = 0;
    VarValue price_micro = 0;
    VarValue supply = 0;
    MarketSide side = MarketSide::Idle;

    bool operator==(const SimSample&) const = default;
};

struct SimEvent {
    VarValue hour = 0;
    SimEventKind kind = SimEventKind::ExpansionFired;

    bool operator==(const SimEvent&) const = default;
};

struct Trajectory {
    std::vector<SimSample> samples;  // one per hour, hours strictly increasing
    std::vector<SimEvent> events;

    bool operator==(const Trajectory&) const = default;
};

const char* market_side_name(MarketSide s);
const char* sim_event_name(SimEventKind k);

// Invoked for every fired transition with the state it fired from.
using SimObserver = std::function<void(const DState&, const TransitionLabel&)>;

// Deterministic in (n, cfg). The network must come from a models builder
// (price/supply variables, named market automata). Throws
// std::invalid_argument on a negative horizon, a bias outside [0, 1], or a
// network without the expected market structure; trade_rate is clipped to
// [0, 1].
Trajectory run(const Network& n, const SimConfig& cfg, const SimObserver& observe = {});

// Header `hour,price,supply,side`; price and supply as 6-digit decimals.
std::string export_csv(const Trajectory& t);

// Canonical JSON document (sorted keys, 2-space indent, trailing newline).
std::string trajectory_to_json(const Trajectory& t);

}  // namespace stablecheck
