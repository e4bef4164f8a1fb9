#include "stablecheck/sim.hpp"

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <utility>

#include "json.hpp"

namespace stablecheck {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

struct SplitMix64 {
    std::uint64_t state = 0;

    std::uint64_t next() {
        state += kGamma;
        return mix64(state);
    }
};

// hour h draws from its own stream; the tick index is itself run through the
// output function so streams of neighbouring hours do not overlap
SplitMix64 tick_stream(std::uint64_t seed, VarValue h) {
    return {mix64(seed + kGamma * (std::uint64_t(h) + 1))};
}

bool bernoulli(SplitMix64& g, const Rational& p) {
    std::uint64_t u = g.next();
    return BigInt(u) * denominator(p) < (BigInt(numerator(p)) << 64);
}

Rational clip01(const Rational& r) {
    if (r < 0) return 0;
    if (r > 1) return 1;
    return r;
}

void require_bias(const Rational& r, const char* what) {
    if (r < 0 || r > 1)
        throw std::invalid_argument(std::string("sim: ") + what + " outside [0, 1]");
}

std::vector<FiredEdge> stage_edges(const Network& n, int automaton, const char* fn) {
    std::vector<FiredEdge> out;
    if (automaton < 0) return out;
    const Automaton& a = n.automata[std::size_t(automaton)];
    for (int ei = 0; ei < int(a.edges.size()); ++ei)
        if (a.edges[std::size_t(ei)].sync == SyncDir::None &&
            a.edges[std::size_t(ei)].update.fn == fn)
            out.push_back({automaton, ei});
    return out;
}

// generous saturation cap: invariants stop the clocks long before this
constexpr VarValue kClockCap = 1'000'000;
constexpr int kQuiesceCap = 1024;

}  // namespace

const char* market_side_name(MarketSide s) {
    switch (s) {
        case MarketSide::Idle: return "Idle";
        case MarketSide::Sell: return "Sell";
        case MarketSide::Buy: return "Buy";
    }
    return "?";
}

const char* sim_event_name(SimEventKind k) {
    switch (k) {
        case SimEventKind::ExpansionFired: return "ExpansionFired";
        case SimEventKind::ContractionFired: return "ContractionFired";
        case SimEventKind::SwapDeclined: return "SwapDeclined";
    }
    return "?";
}

Trajectory run(const Network& n, const SimConfig& cfg, const SimObserver& observe) {
    if (cfg.horizon_hours < 0) throw std::invalid_argument("sim: negative horizon");
    require_bias(cfg.buy_bias, "buy_bias");
    for (const SimShock& sh : cfg.shocks) {
        require_bias(sh.buy_bias, "shock buy_bias");
        if (sh.duration_hours < 0) throw std::invalid_argument("sim: negative shock duration");
    }
    const Rational rate = clip01(cfg.trade_rate);

    const int price_idx = n.var_index("price");
    const int supply_idx = n.var_index("supply");
    if (price_idx < 0 || supply_idx < 0)
        throw std::invalid_argument("sim: network lacks price/supply variables");
    const int x_idx = n.automaton_index("X");
    const int s_idx = n.automaton_index("S");
    const int b_idx = n.automaton_index("B");
    const int c_idx = n.automaton_index("C");
    const int trade_ch = n.channel_index("trade");
    const int update_ch = n.channel_index("update");

    const std::vector<FiredEdge> buy_stage = stage_edges(n, b_idx, "stage_buy");
    const std::vector<FiredEdge> sell_stage = stage_edges(n, s_idx, "stage_sell");
    const std::size_t slots = std::max(buy_stage.size(), sell_stage.size());

    DState st = discrete_initial(n);
    Trajectory out;
    VarValue hour = 0;

    auto record_events = [&](const TransitionLabel& label) {
        VarValue dsupply = 0;
        for (const auto& [idx, delta] : label.var_deltas)
            if (idx == supply_idx) dsupply = delta;
        SimEventKind kind;
        if (dsupply > 0)
            kind = SimEventKind::ExpansionFired;
        else if (dsupply < 0)
            kind = SimEventKind::ContractionFired;
        else if (label.channel == update_ch && update_ch >= 0 && !label.edges.empty() &&
                 label.edges[0].automaton == c_idx && c_idx >= 0)
            kind = SimEventKind::SwapDeclined;
        else
            return;
        // one event per episode: the seigniorage expansion mints twice in the
        // same hour (activation and validation)
        if (!out.events.empty() && out.events.back() == SimEvent{hour, kind}) return;
        out.events.push_back({hour, kind});
    };

    auto apply = [&](std::pair<DState, TransitionLabel>& succ) {
        if (observe) observe(st, succ.second);
        record_events(succ.second);
        st = std::move(succ.first);
    };

    auto attempt_trade = [&](const FiredEdge& stage) {
        auto succs = discrete_action_successors(n, st);
        auto it = std::find_if(succs.begin(), succs.end(), [&](const auto& p) {
            return p.second.channel == -1 && p.second.edges.size() == 1 &&
                   p.second.edges[0] == stage;
        });
        if (it == succs.end()) return;  // budget spent or a trade already staged
        apply(*it);
        auto settles = discrete_action_successors(n, st);
        auto st_it = std::find_if(settles.begin(), settles.end(), [&](const auto& p) {
            return p.second.channel == trade_ch && !p.second.edges.empty() &&
                   p.second.edges[0].automaton == stage.automaton;
        });
        if (st_it == settles.end()) throw std::runtime_error("sim: staged trade cannot settle");
        apply(*st_it);
    };

    bool frozen = false;
    for (hour = 0; hour < cfg.horizon_hours; ++hour) {
        if (!frozen) {
            SplitMix64 rng = tick_stream(cfg.seed, hour);
            Rational bias = cfg.buy_bias;
            for (const SimShock& sh : cfg.shocks)
                if (hour >= sh.start_hour && hour < sh.start_hour + sh.duration_hours)
                    bias = sh.buy_bias;

            for (std::size_t slot = 0; slot < slots; ++slot) {
                if (!bernoulli(rng, rate)) continue;
                const bool buy = bernoulli(rng, bias);
                const std::vector<FiredEdge>& stages = buy ? buy_stage : sell_stage;
                if (slot < stages.size()) attempt_trade(stages[slot]);
            }

            for (int iter = 0;; ++iter) {
                if (iter == kQuiesceCap)
                    throw std::runtime_error("sim: protocol phase failed to quiesce");
                auto succs = discrete_action_successors(n, st);
                std::vector<std::size_t> pool, handshakes;
                for (std::size_t i = 0; i < succs.size(); ++i) {
                    const TransitionLabel& l = succs[i].second;
                    const bool market =
                        (trade_ch >= 0 && l.channel == trade_ch) ||
                        (l.channel == -1 && (l.edges[0].automaton == s_idx ||
                                             l.edges[0].automaton == b_idx));
                    if (market) continue;
                    pool.push_back(i);
                    if (l.channel >= 0) handshakes.push_back(i);
                }
                if (pool.empty()) break;
                const std::vector<std::size_t>& pick_from =
                    handshakes.empty() ? pool : handshakes;
                apply(succs[pick_from[std::size_t(rng.next() % pick_from.size())]]);
            }
        }

        MarketSide side = MarketSide::Idle;
        if (x_idx >= 0) {
            const std::string& loc =
                n.automata[std::size_t(x_idx)].locations[std::size_t(st.locs[std::size_t(x_idx)])].name;
            if (loc == "Sell")
                side = MarketSide::Sell;
            else if (loc == "Buy")
                side = MarketSide::Buy;
        }
        out.samples.push_back(
            {hour, st.vars[std::size_t(price_idx)], st.vars[std::size_t(supply_idx)], side});

        if (!frozen) {
            if (auto d = discrete_unit_delay(n, st, kClockCap))
                st = std::move(*d);
            else
                frozen = true;  // invariants block further time; state repeats
        }
    }
    return out;
}

std::string export_csv(const Trajectory& t) {
    std::string out = "hour,price,supply,side\n";
    for (const SimSample& s : t.samples) {
        out += std::to_string(s.hour);
        out += ',';
        out += format_micro(s.price_micro);
        out += ',';
        out += format_micro(s.supply);
        out += ',';
        out += market_side_name(s.side);
        out += '\n';
    }
    return out;
}

std::string trajectory_to_json(const Trajectory& t) {
    nlohmann::json doc;
    doc["samples"] = nlohmann::json::array();
    for (const SimSample& s : t.samples)
        doc["samples"].push_back({{"hour", s.hour},
                                  {"price", format_micro(s.price_micro)},
                                  {"supply", format_micro(s.supply)},
                                  {"side", market_side_name(s.side)}});
    doc["events"] = nlohmann::json::array();
    for (const SimEvent& e : t.events)
        doc["events"].push_back({{"hour", e.hour}, {"kind", sim_event_name(e.kind)}});
    return doc.dump(2) + "\n";
}

}  // namespace stablecheck
