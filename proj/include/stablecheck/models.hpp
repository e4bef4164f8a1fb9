#pragma once

// Builders for the stablecoin networks: a seigniorage protocol with bonds
// (BAC-style), a rebase protocol (AMPL-style), and a fractional-collateral
// protocol (FRAX-style), over the automaton + market-math substrate.

#include <stdexcept>
#include <string>
#include <vector>

#include "stablecheck/automaton.hpp"
#include "stablecheck/checker.hpp"

namespace stablecheck {

struct ConfigUnencodable : std::runtime_error {
    explicit ConfigUnencodable(const std::string& why)
        : std::runtime_error("config not encodable: " + why) {}
};

// All quantities in micro-units (coins and prices); periods in hours.
struct BacConfig {
    VarValue peg_micro = 1'000'000;
    VarValue initial_supply = 1'000'000'000;
    VarValue pool_coin = 1'000'000'000;
    VarValue pool_quote = 1'000'000'000;
    VarValue expansion_period = 24;
    std::vector<VarValue> trade_sizes = {50'000'000};
    VarValue max_rounds = 4;  // horizon: number of period rollovers
    VarValue buys_per_round = 2;
    VarValue sells_per_round = 2;
    VarValue expansion_mint = 50'000'000;    // supply minted per expansion edge
    VarValue contraction_burn = 50'000'000;  // supply burned by the swap edge
};

enum class StablecoinKind { BacSeigniorage, AmplRebase, FraxFractional };

// Fixed variable layout shared by all builders (kind extras appended).
namespace var {
inline constexpr int price = 0;
inline constexpr int supply = 1;
inline constexpr int coin = 2;  // pool coin reserve
inline constexpr int net_flow = 3;   // settled net order flow this window
inline constexpr int next_flow = 4;  // net flow including the staged trade
inline constexpr int pending_side = 5;  // 0 none, 1 buy, 2 sell
inline constexpr int pending_delta = 6;
inline constexpr int rounds = 7;
inline constexpr int buys_left = 8;
inline constexpr int sells_left = 9;
// AMPL
inline constexpr int rebase_dir = 10;  // 0 flat, 1 up, 2 down
// FRAX
inline constexpr int ratio = 10;  // collateral ratio in 1/400 steps
inline constexpr int mints_left = 11;
inline constexpr int redeems_left = 12;
}  // namespace var

Network build_bac(const BacConfig& cfg);
Network build_ampl(const BacConfig& cfg);
Network build_frax(const BacConfig& cfg);
Network build_kind(StablecoinKind kind, const BacConfig& cfg);

// Every update function the builders use, keyed by name. Bodies index the
// fixed variable layout above; models loaded from JSON get the same registry.
std::map<std::string, UpdateFn> standard_update_registry();

// The safety pair for each protocol: expansion-side interventions must not
// complete into a buyer's market, contraction-side ones not into a seller's.
std::vector<Property> standard_properties(StablecoinKind kind, const Network& n);
std::vector<Property> standard_properties(StablecoinKind kind);

// Rough classification of a transition for trace inspection and CSV export.
enum class EventKind {
    TradeBuy,
    TradeSell,
    TradeNeutral,
    ExpansionActivated,
    ContractionActivated,
    UpdateMint,   // supply-increasing protocol update
    UpdateBurn,   // supply-decreasing protocol update
    UpdateHold,   // protocol update leaving supply unchanged
    Internal
};

EventKind classify_event(const Network& n, const TransitionLabel& label);
const char* event_kind_name(EventKind k);

}  // namespace stablecheck
