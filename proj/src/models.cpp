#include "stablecheck/models.hpp"

#include <algorithm>
#include <limits>

#include "stablecheck/rational.hpp"

namespace stablecheck {

namespace {

constexpr VarValue kVarMax = std::numeric_limits<VarValue>::max();

VarValue checked(const BigInt& v, const char* what) {
    if (v > kVarMax || v < -BigInt(kVarMax))
        throw ConfigUnencodable(std::string(what) + " does not fit a 64-bit variable");
    return v.convert_to<VarValue>();
}

// Spot price of the constant-product pool in micro-quote per coin, with the
// quote reserve kept implicit as k0/coin.
VarValue pool_price(VarValue k0, VarValue coin) {
    BigInt p = BigInt(kMicro) * k0 / (BigInt(coin) * coin);
    return p.convert_to<VarValue>();
}

VarPredicate vc(int v, CmpOp op, VarValue c) { return VarPredicate::against_const(v, op, c); }

struct MarketBounds {
    VarValue k0 = 0;
    VarValue max_size = 0;
    VarValue price_init = 0;
    VarValue price_hi = 0;
    VarValue coin_hi = 0;
    VarValue flow_cap = 0;
};

MarketBounds market_bounds(const BacConfig& cfg, VarValue total_buys, VarValue total_sells) {
    if (cfg.trade_sizes.empty()) throw ConfigUnencodable("trade_sizes must be non-empty");
    for (VarValue s : cfg.trade_sizes)
        if (s < 0) throw ConfigUnencodable("trade sizes must be non-negative");
    for (VarValue v : {cfg.peg_micro, cfg.initial_supply, cfg.pool_coin, cfg.pool_quote,
                       cfg.expansion_period, cfg.max_rounds, cfg.buys_per_round,
                       cfg.sells_per_round, cfg.expansion_mint, cfg.contraction_burn})
        if (v <= 0) throw ConfigUnencodable("config quantities must be positive");

    MarketBounds b;
    b.k0 = checked(BigInt(cfg.pool_coin) * cfg.pool_quote, "pool invariant coin*quote");
    b.max_size = *std::max_element(cfg.trade_sizes.begin(), cfg.trade_sizes.end());
    b.price_init = pool_price(b.k0, cfg.pool_coin);

    // Buy-side stages require coin > size, so the reserve never drops below 1;
    // the price range must still cover the worst reachable reserve.
    BigInt floor = BigInt(cfg.pool_coin) - BigInt(total_buys) * b.max_size;
    if (floor < 1) floor = 1;
    b.price_hi = checked(BigInt(kMicro) * b.k0 / (floor * floor), "price range");
    b.coin_hi = checked(BigInt(cfg.pool_coin) + BigInt(total_sells) * b.max_size, "coin range");
    b.flow_cap = checked(BigInt(total_buys + total_sells + 1) * b.max_size, "flow range");
    return b;
}

void add_market_vars(Network& n, const BacConfig& cfg, const MarketBounds& b,
                     VarValue supply_hi) {
    n.vars.resize(10);
    n.vars[var::price] = {"price", 0, b.price_hi, b.price_init};
    n.vars[var::supply] = {"supply", 0, supply_hi, cfg.initial_supply};
    n.vars[var::coin] = {"coin", 1, b.coin_hi, cfg.pool_coin};
    n.vars[var::net_flow] = {"net_flow", -b.flow_cap, b.flow_cap, 0};
    n.vars[var::next_flow] = {"next_flow", -b.flow_cap, b.flow_cap, 0};
    n.vars[var::pending_side] = {"pending_side", 0, 2, 0};
    n.vars[var::pending_delta] = {"pending_delta", -b.max_size, b.max_size, 0};
    n.vars[var::rounds] = {"rounds", 0, cfg.max_rounds, 0};
    n.vars[var::buys_left] = {"buys_left", 0, cfg.buys_per_round, cfg.buys_per_round};
    n.vars[var::sells_left] = {"sells_left", 0, cfg.sells_per_round, cfg.sells_per_round};
}

// Seller and buyer populations: stage a request when budget remains and no
// other request is in flight, then emit it on the trade channel.
Automaton make_seller(const BacConfig& cfg, int trade_ch) {
    Automaton s;
    s.name = "S";
    s.locations = {{"Idle", {}, false}};
    for (VarValue size : cfg.trade_sizes) {
        Edge stage;
        stage.var_guard = {vc(var::pending_side, CmpOp::Eq, 0), vc(var::sells_left, CmpOp::Gt, 0)};
        stage.update = {"stage_sell", {size}};
        s.edges.push_back(stage);
    }
    Edge emit;
    emit.sync = SyncDir::Emit;
    emit.channel = trade_ch;
    emit.var_guard = {vc(var::pending_side, CmpOp::Eq, 2)};
    s.edges.push_back(emit);
    return s;
}

Automaton make_buyer(const BacConfig& cfg, int trade_ch) {
    Automaton b;
    b.name = "B";
    b.locations = {{"Idle", {}, false}};
    for (VarValue size : cfg.trade_sizes) {
        Edge stage;
        stage.var_guard = {vc(var::pending_side, CmpOp::Eq, 0), vc(var::buys_left, CmpOp::Gt, 0),
                           vc(var::coin, CmpOp::Gt, size)};
        stage.update = {"stage_buy", {size}};
        b.edges.push_back(stage);
    }
    Edge emit;
    emit.sync = SyncDir::Emit;
    emit.channel = trade_ch;
    emit.var_guard = {vc(var::pending_side, CmpOp::Eq, 1)};
    b.edges.push_back(emit);
    return b;
}

// The exchange: settles staged trades, tracking the market side as the sign
// of cumulative net order flow, and opens a fresh flow window whenever a
// protocol intervention lands on the update channel.
Automaton make_exchange(VarValue k0, int trade_ch, int update_ch) {
    Automaton x;
    x.name = "X";
    x.locations = {{"Idle", {}, false}, {"Sell", {}, false}, {"Buy", {}, false}};
    for (int src = 0; src < 3; ++src) {
        struct {
            int target;
            CmpOp op;
        } settles[] = {{2, CmpOp::Gt}, {1, CmpOp::Lt}, {0, CmpOp::Eq}};
        for (auto [target, op] : settles) {
            Edge e;
            e.source = src;
            e.target = target;
            e.sync = SyncDir::Recv;
            e.channel = trade_ch;
            e.var_guard = {vc(var::pending_side, CmpOp::Gt, 0), vc(var::next_flow, op, 0)};
            e.update = {"settle_trade", {k0}};
            x.edges.push_back(e);
        }
        Edge reset;
        reset.source = src;
        reset.target = 0;
        reset.sync = SyncDir::Recv;
        reset.channel = update_ch;
        reset.update = {"reset_flow", {}};
        x.edges.push_back(reset);
    }
    return x;
}

std::vector<ClockConstraint> at_period(ClockId t, VarValue period) {
    return {ClockConstraint::ge(t, period), ClockConstraint::le(t, period)};
}

StateFormula at_loc(const Network& n, const char* aut, const char* loc) {
    int a = n.automaton_index(aut);
    if (a < 0) throw std::runtime_error("no such automaton: " + std::string(aut));
    const auto& locs = n.automata[a].locations;
    for (int i = 0; i < int(locs.size()); ++i)
        if (locs[i].name == loc) return StateFormula::loc_atom(a, i);
    throw std::runtime_error("no such location: " + std::string(loc));
}

}  // namespace

// Markets stage a trade (side, signed size, resulting window flow) with an
// internal step, then hand it to the exchange over the trade channel. While
// a trade is staged, next_flow == net_flow + pending_delta; otherwise the
// two coincide. reset_flow preserves that invariant across window resets.
std::map<std::string, UpdateFn> standard_update_registry() {
    std::map<std::string, UpdateFn> reg;
    reg["stage_buy"] = [](std::span<VarValue> vals, std::span<const VarValue> args) {
        vals[var::pending_side] = 1;
        vals[var::pending_delta] = args[0];
        vals[var::next_flow] += args[0];
        vals[var::buys_left] -= 1;
    };
    reg["stage_sell"] = [](std::span<VarValue> vals, std::span<const VarValue> args) {
        vals[var::pending_side] = 2;
        vals[var::pending_delta] = -args[0];
        vals[var::next_flow] -= args[0];
        vals[var::sells_left] -= 1;
    };
    reg["settle_trade"] = [](std::span<VarValue> vals, std::span<const VarValue> args) {
        vals[var::coin] -= vals[var::pending_delta];
        vals[var::price] = pool_price(args[0], vals[var::coin]);
        vals[var::net_flow] = vals[var::next_flow];
        vals[var::pending_side] = 0;
        vals[var::pending_delta] = 0;
    };
    reg["reset_flow"] = [](std::span<VarValue> vals, std::span<const VarValue>) {
        vals[var::next_flow] -= vals[var::net_flow];
        vals[var::net_flow] = 0;
    };
    reg["mint"] = [](std::span<VarValue> vals, std::span<const VarValue> args) {
        vals[var::supply] += args[0];
    };
    reg["burn"] = [](std::span<VarValue> vals, std::span<const VarValue> args) {
        vals[var::supply] -= args[0];
    };
    reg["roll"] = [](std::span<VarValue> vals, std::span<const VarValue> args) {
        vals[var::rounds] += 1;
        vals[var::buys_left] = args[0];
        vals[var::sells_left] = args[1];
    };
    reg["rebase"] = [](std::span<VarValue> vals, std::span<const VarValue> args) {
        if (vals.size() <= var::rebase_dir)
            throw std::out_of_range("model lacks the rebase_dir variable");
        VarValue peg = args[0];
        VarValue price = vals[var::price];
        vals[var::rebase_dir] = price > peg ? 1 : price < peg ? 2 : 0;
        BigInt scaled = BigInt(vals[var::supply]) * price / peg;
        vals[var::supply] = scaled.convert_to<VarValue>();
        vals[var::rounds] += 1;
        vals[var::buys_left] = args[1];
        vals[var::sells_left] = args[2];
    };
    reg["step_ratio"] = [](std::span<VarValue> vals, std::span<const VarValue> args) {
        if (vals.size() <= var::ratio) throw std::out_of_range("model lacks the ratio variable");
        VarValue peg = args[0];
        if (vals[var::price] > peg && vals[var::ratio] > 0) vals[var::ratio] -= 1;
        if (vals[var::price] < peg && vals[var::ratio] < 400) vals[var::ratio] += 1;
        vals[var::rounds] += 1;
    };
    reg["mint_frax"] = [](std::span<VarValue> vals, std::span<const VarValue> args) {
        if (vals.size() <= var::mints_left)
            throw std::out_of_range("model lacks the mints_left variable");
        vals[var::supply] += args[0];
        vals[var::mints_left] -= 1;
    };
    reg["redeem_frax"] = [](std::span<VarValue> vals, std::span<const VarValue> args) {
        if (vals.size() <= var::redeems_left)
            throw std::out_of_range("model lacks the redeems_left variable");
        vals[var::supply] -= args[0];
        vals[var::redeems_left] -= 1;
    };
    return reg;
}

Network build_bac(const BacConfig& cfg) {
    VarValue total_rounds = cfg.max_rounds + 1;
    MarketBounds b = market_bounds(cfg, total_rounds * cfg.buys_per_round,
                                   total_rounds * cfg.sells_per_round);
    VarValue supply_hi =
        checked(BigInt(cfg.initial_supply) + BigInt(total_rounds) * 2 * cfg.expansion_mint,
                "supply range");

    Network n;
    n.name = "bac";
    n.channels = {{"expand"}, {"contract"}, {"trade"}, {"update"}};
    const int ch_expand = 0, ch_contract = 1, ch_trade = 2, ch_update = 3;
    n.clocks = {{"t", 1}};
    const ClockId t = 1;
    const VarValue period = cfg.expansion_period;

    add_market_vars(n, cfg, b, supply_hi);
    n.updates = standard_update_registry();
    UpdateCall roll{"roll", {cfg.buys_per_round, cfg.sells_per_round}};

    // P routes on the deviation sign and commits the intervention; the
    // period gate lives on the receiving side.
    Automaton p;
    p.name = "P";
    p.locations = {{"Initial", {}, false},
                   {"Pre_Expansion", {}, false},
                   {"Expanded", {}, false},
                   {"Pre_Contraction", {}, false},
                   {"Contracted", {}, false}};
    {
        Edge e;
        e.source = 0, e.target = 1;
        e.var_guard = {vc(var::price, CmpOp::Gt, cfg.peg_micro)};
        p.edges.push_back(e);
        e = Edge{};
        e.source = 0, e.target = 3;
        e.var_guard = {vc(var::price, CmpOp::Lt, cfg.peg_micro)};
        p.edges.push_back(e);
        e = Edge{};
        e.source = 1, e.target = 2;
        e.sync = SyncDir::Emit, e.channel = ch_expand;
        p.edges.push_back(e);
        e = Edge{};
        e.source = 3, e.target = 4;
        e.sync = SyncDir::Emit, e.channel = ch_contract;
        p.edges.push_back(e);
        e = Edge{};
        e.source = 2, e.target = 0;  // return some time after the intervention
        p.edges.push_back(e);
        e = Edge{};
        e.source = 4, e.target = 0;
        p.edges.push_back(e);
    }

    // E owns the round clock. Both expansion transitions mint; the second
    // one publishes the update to the exchange. Idle and Validated roll the
    // round at the boundary while rounds remain.
    Automaton ea;
    ea.name = "E";
    std::vector<ClockConstraint> cap = {ClockConstraint::le(t, period)};
    ea.locations = {{"Idle", cap, false}, {"Expanding", cap, false}, {"Validated", cap, false}};
    {
        Edge e;
        e.source = 0, e.target = 1;
        e.sync = SyncDir::Recv, e.channel = ch_expand;
        e.clock_guard = at_period(t, period);
        e.update = {"mint", {cfg.expansion_mint}};
        ea.edges.push_back(e);
        e = Edge{};
        e.source = 1, e.target = 2;
        e.sync = SyncDir::Emit, e.channel = ch_update;
        e.update = {"mint", {cfg.expansion_mint}};
        ea.edges.push_back(e);
        e = Edge{};
        e.source = 2, e.target = 0;
        e.clock_guard = at_period(t, period);
        e.var_guard = {vc(var::rounds, CmpOp::Lt, cfg.max_rounds)};
        e.resets = {t};
        e.update = roll;
        ea.edges.push_back(e);
        e = Edge{};
        e.source = 0, e.target = 0;
        e.clock_guard = at_period(t, period);
        e.var_guard = {vc(var::rounds, CmpOp::Lt, cfg.max_rounds)};
        e.resets = {t};
        e.update = roll;
        ea.edges.push_back(e);
    }

    // C's no-swap completion comes first: bond holders may decline the swap,
    // leaving supply untouched.
    Automaton c;
    c.name = "C";
    c.locations = {{"Idle", {}, false}, {"Contracting", cap, false}, {"Validated", {}, false}};
    {
        Edge e;
        e.source = 0, e.target = 1;
        e.sync = SyncDir::Recv, e.channel = ch_contract;
        e.clock_guard = at_period(t, period);
        c.edges.push_back(e);
        e = Edge{};
        e.source = 1, e.target = 2;
        e.sync = SyncDir::Emit, e.channel = ch_update;
        c.edges.push_back(e);
        e = Edge{};
        e.source = 1, e.target = 2;
        e.sync = SyncDir::Emit, e.channel = ch_update;
        e.var_guard = {vc(var::supply, CmpOp::Ge, cfg.contraction_burn)};
        e.update = {"burn", {cfg.contraction_burn}};
        c.edges.push_back(e);
        e = Edge{};
        e.source = 2, e.target = 0;
        c.edges.push_back(e);
    }

    n.automata = {p, ea, c, make_seller(cfg, ch_trade), make_buyer(cfg, ch_trade),
                  make_exchange(b.k0, ch_trade, ch_update)};
    return n;
}

Network build_ampl(const BacConfig& cfg) {
    VarValue total_rounds = cfg.max_rounds + 1;
    MarketBounds b = market_bounds(cfg, total_rounds * cfg.buys_per_round,
                                   total_rounds * cfg.sells_per_round);
    // Supply scales multiplicatively at each rebase, by at most the price cap.
    BigInt s_hi = cfg.initial_supply;
    for (VarValue i = 0; i < cfg.max_rounds; ++i) s_hi = s_hi * b.price_hi / cfg.peg_micro + 1;
    VarValue supply_hi = checked(s_hi, "rebased supply range");

    Network n;
    n.name = "ampl";
    n.channels = {{"trade"}, {"update"}};
    const int ch_trade = 0, ch_update = 1;
    n.clocks = {{"t", 0}};
    const ClockId t = 1;
    const VarValue period = cfg.expansion_period;
    const VarValue offset = 2;  // first rebase two hours in

    add_market_vars(n, cfg, b, supply_hi);
    n.vars.push_back({"rebase_dir", 0, 2, 0});
    n.updates = standard_update_registry();
    UpdateCall rebase{"rebase", {cfg.peg_micro, cfg.buys_per_round, cfg.sells_per_round}};

    Automaton r;
    r.name = "R";
    r.locations = {{"Boot", {ClockConstraint::le(t, offset)}, false},
                   {"Run", {ClockConstraint::le(t, period)}, false},
                   {"Validated", {ClockConstraint::le(t, period)}, false}};
    {
        Edge e;
        e.source = 0, e.target = 2;
        e.sync = SyncDir::Emit, e.channel = ch_update;
        e.clock_guard = at_period(t, offset);
        e.var_guard = {vc(var::rounds, CmpOp::Lt, cfg.max_rounds)};
        e.resets = {t};
        e.update = rebase;
        r.edges.push_back(e);
        e = Edge{};
        e.source = 1, e.target = 2;
        e.sync = SyncDir::Emit, e.channel = ch_update;
        e.clock_guard = at_period(t, period);
        e.var_guard = {vc(var::rounds, CmpOp::Lt, cfg.max_rounds)};
        e.resets = {t};
        e.update = rebase;
        r.edges.push_back(e);
        e = Edge{};
        e.source = 2, e.target = 1;
        r.edges.push_back(e);
    }

    n.automata = {r, make_seller(cfg, ch_trade), make_buyer(cfg, ch_trade),
                  make_exchange(b.k0, ch_trade, ch_update)};
    return n;
}

Network build_frax(const BacConfig& cfg) {
    // Intervention budgets reuse max_rounds; the hourly ratio clock also
    // stops after max_rounds ticks, which keeps the horizon uniform.
    MarketBounds b = market_bounds(cfg, cfg.buys_per_round, cfg.sells_per_round);
    VarValue supply_hi = checked(
        BigInt(cfg.initial_supply) + BigInt(cfg.max_rounds) * cfg.expansion_mint, "supply range");

    Network n;
    n.name = "frax";
    n.channels = {{"trade"}, {"update"}};
    const int ch_trade = 0, ch_update = 1;
    n.clocks = {{"h", 0}};
    const ClockId h = 1;

    add_market_vars(n, cfg, b, supply_hi);
    n.vars.push_back({"ratio", 0, 400, 400});  // collateral ratio, 1/400 steps
    n.vars.push_back({"mints_left", 0, cfg.max_rounds, cfg.max_rounds});
    n.vars.push_back({"redeems_left", 0, cfg.max_rounds, cfg.max_rounds});
    n.updates = standard_update_registry();

    Automaton r;
    r.name = "R";
    r.locations = {{"Run", {ClockConstraint::le(h, 1)}, false}};
    {
        Edge e;
        e.source = 0, e.target = 0;
        e.clock_guard = at_period(h, 1);
        e.var_guard = {vc(var::rounds, CmpOp::Lt, cfg.max_rounds)};
        e.resets = {h};
        e.update = {"step_ratio", {cfg.peg_micro}};
        r.edges.push_back(e);
    }

    Automaton m;
    m.name = "M";
    m.locations = {{"Idle", {}, false}, {"Validated", {}, false}};
    {
        Edge e;
        e.source = 0, e.target = 1;
        e.sync = SyncDir::Emit, e.channel = ch_update;
        e.var_guard = {vc(var::price, CmpOp::Gt, cfg.peg_micro), vc(var::mints_left, CmpOp::Gt, 0)};
        e.update = {"mint_frax", {cfg.expansion_mint}};
        m.edges.push_back(e);
        e = Edge{};
        e.source = 1, e.target = 0;
        m.edges.push_back(e);
    }

    Automaton d;
    d.name = "D";
    d.locations = {{"Idle", {}, false}, {"Validated", {}, false}};
    {
        Edge e;
        e.source = 0, e.target = 1;
        e.sync = SyncDir::Emit, e.channel = ch_update;
        e.var_guard = {vc(var::price, CmpOp::Lt, cfg.peg_micro),
                       vc(var::redeems_left, CmpOp::Gt, 0),
                       vc(var::supply, CmpOp::Ge, cfg.contraction_burn)};
        e.update = {"redeem_frax", {cfg.contraction_burn}};
        d.edges.push_back(e);
        e = Edge{};
        e.source = 1, e.target = 0;
        d.edges.push_back(e);
    }

    n.automata = {r, m, d, make_seller(cfg, ch_trade), make_buyer(cfg, ch_trade),
                  make_exchange(b.k0, ch_trade, ch_update)};
    return n;
}

Network build_kind(StablecoinKind kind, const BacConfig& cfg) {
    switch (kind) {
        case StablecoinKind::BacSeigniorage: return build_bac(cfg);
        case StablecoinKind::AmplRebase: return build_ampl(cfg);
        case StablecoinKind::FraxFractional: return build_frax(cfg);
    }
    throw std::logic_error("unknown stablecoin kind");
}

std::vector<Property> standard_properties(StablecoinKind kind, const Network& n) {
    using F = StateFormula;
    auto no_buy = F::negation(at_loc(n, "X", "Buy"));
    auto no_sell = F::negation(at_loc(n, "X", "Sell"));
    switch (kind) {
        case StablecoinKind::BacSeigniorage: {
            auto expanded = F::conjunction({at_loc(n, "P", "Expanded"), at_loc(n, "E", "Validated")});
            auto contracted =
                F::conjunction({at_loc(n, "P", "Contracted"), at_loc(n, "C", "Validated")});
            return {
                {"expansion-validity", F::implication(std::move(expanded), std::move(no_buy))},
                {"contraction-validity", F::implication(std::move(contracted), std::move(no_sell))},
            };
        }
        case StablecoinKind::AmplRebase: {
            auto up = F::conjunction(
                {at_loc(n, "R", "Validated"), F::var_atom(vc(var::rebase_dir, CmpOp::Eq, 1))});
            auto down = F::conjunction(
                {at_loc(n, "R", "Validated"), F::var_atom(vc(var::rebase_dir, CmpOp::Eq, 2))});
            return {
                {"rebase-expansion-validity", F::implication(std::move(up), std::move(no_buy))},
                {"rebase-contraction-validity", F::implication(std::move(down), std::move(no_sell))},
            };
        }
        case StablecoinKind::FraxFractional:
            return {
                {"mint-validity", F::implication(at_loc(n, "M", "Validated"), std::move(no_buy))},
                {"redeem-validity", F::implication(at_loc(n, "D", "Validated"), std::move(no_sell))},
            };
    }
    throw std::logic_error("unknown stablecoin kind");
}

std::vector<Property> standard_properties(StablecoinKind kind) {
    return standard_properties(kind, build_kind(kind, BacConfig{}));
}

EventKind classify_event(const Network& n, const TransitionLabel& label) {
    auto delta = [&](const char* name) -> VarValue {
        int idx = n.var_index(name);
        for (const auto& [v, d] : label.var_deltas)
            if (v == idx) return d;
        return 0;
    };
    if (label.channel < 0) return EventKind::Internal;
    const std::string& ch = n.channels[label.channel].name;
    if (ch == "expand") return EventKind::ExpansionActivated;
    if (ch == "contract") return EventKind::ContractionActivated;
    if (ch == "trade") {
        VarValue d = delta("coin");
        if (d < 0) return EventKind::TradeBuy;
        if (d > 0) return EventKind::TradeSell;
        return EventKind::TradeNeutral;
    }
    if (ch == "update") {
        VarValue d = delta("supply");
        if (d > 0) return EventKind::UpdateMint;
        if (d < 0) return EventKind::UpdateBurn;
        return EventKind::UpdateHold;
    }
    return EventKind::Internal;
}

const char* event_kind_name(EventKind k) {
    switch (k) {
        case EventKind::TradeBuy: return "buy";
        case EventKind::TradeSell: return "sell";
        case EventKind::TradeNeutral: return "neutral_trade";
        case EventKind::ExpansionActivated: return "expansion";
        case EventKind::ContractionActivated: return "contraction";
        case EventKind::UpdateMint: return "mint";
        case EventKind::UpdateBurn: return "burn";
        case EventKind::UpdateHold: return "hold";
        case EventKind::Internal: return "internal";
    }
    return "unknown";
}

}  // namespace stablecheck
