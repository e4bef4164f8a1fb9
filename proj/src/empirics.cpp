#include "stablecheck/empirics.hpp"

#include <algorithm>
#include <charconv>
#include <optional>

#include "json.hpp"

namespace stablecheck {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t from = 0;
    while (true) {
        std::size_t at = s.find(sep, from);
        if (at == std::string::npos) {
            out.push_back(s.substr(from));
            return out;
        }
        out.push_back(s.substr(from, at - from));
        from = at + 1;
    }
}

std::int64_t parse_i64(const std::string& text, std::size_t line, const char* what) {
    std::int64_t v = 0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size())
        throw ParseError(line, std::string("bad ") + what + " '" + text + "'");
    return v;
}

Rational parse_amount(const std::string& text, std::size_t line, const char* what) {
    Rational r;
    try {
        r = parse_decimal(text);
    } catch (const std::invalid_argument&) {
        throw ParseError(line, std::string("bad ") + what + " '" + text + "'");
    }
    if (r < 0) throw ParseError(line, std::string(what) + " is negative");
    return r;
}

constexpr std::int64_t kSecondsPerHour = 3600;

}  // namespace

TimeSeries ingest_csv(const std::string& text, std::string source) {
    std::vector<std::string> lines = split(text, '\n');
    for (std::string& l : lines)
        if (!l.empty() && l.back() == '\r') l.pop_back();
    if (lines.empty() || lines[0].empty()) throw ParseError(1, "missing header");

    bool hour_based = false;
    if (lines[0] == "hour,price,supply,side")
        hour_based = true;
    else if (lines[0] != "timestamp,price,supply")
        throw ParseError(1, "unrecognized header '" + lines[0] + "'");

    TimeSeries ts;
    ts.source = std::move(source);
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::size_t ln = i + 1;
        if (lines[i].empty()) {
            if (i + 1 == lines.size()) break;  // trailing newline
            throw ParseError(ln, "empty row");
        }
        std::vector<std::string> cells = split(lines[i], ',');
        if (cells.size() != (hour_based ? 4u : 3u))
            throw ParseError(ln, "expected " + std::to_string(hour_based ? 4 : 3) +
                                     " columns, got " + std::to_string(cells.size()));
        TimeRecord rec;
        rec.timestamp = parse_i64(cells[0], ln, hour_based ? "hour" : "timestamp");
        if (hour_based) rec.timestamp *= kSecondsPerHour;
        rec.price = parse_amount(cells[1], ln, "price");
        rec.supply = parse_amount(cells[2], ln, "supply");
        if (!ts.records.empty() && rec.timestamp <= ts.records.back().timestamp)
            throw NonMonotonicTimestamp(ln);
        ts.records.push_back(std::move(rec));
    }
    return ts;
}

const char* episode_kind_name(EpisodeKind k) {
    switch (k) {
        case EpisodeKind::EffectiveExpansion: return "EffectiveExpansion";
        case EpisodeKind::BrokenExpansion: return "BrokenExpansion";
        case EpisodeKind::EffectiveContraction: return "EffectiveContraction";
        case EpisodeKind::BrokenContraction: return "BrokenContraction";
        case EpisodeKind::StalledContraction: return "StalledContraction";
    }
    return "?";
}

std::vector<Episode> detect_episodes(const TimeSeries& ts, const DetectParams& p) {
    if (p.window_hours <= 0) throw std::invalid_argument("empirics: window must be positive");
    if (p.peg <= 0) throw std::invalid_argument("empirics: peg must be positive");
    if (p.price_eps < 0 || p.supply_eps < 0)
        throw std::invalid_argument("empirics: thresholds must be non-negative");
    const std::int64_t wsec = p.window_hours * kSecondsPerHour;
    const auto& r = ts.records;
    if (r.empty() || r.back().timestamp - r.front().timestamp < wsec)
        throw std::invalid_argument("empirics: series spans less than one window");

    // first record at or past the window end, by binary search on timestamps
    auto window_close = [&](std::size_t i) -> std::optional<std::size_t> {
        auto it = std::lower_bound(r.begin(), r.end(), r[i].timestamp + wsec,
                                   [](const TimeRecord& rec, std::int64_t t) {
                                       return rec.timestamp < t;
                                   });
        if (it == r.end()) return std::nullopt;
        return std::size_t(it - r.begin());
    };
    auto pct = [](const Rational& from, const Rational& to) -> Rational {
        if (from == 0) return 0;
        return Rational(100) * (to - from) / from;
    };
    auto significant = [&](const Rational& delta, const Rational& base) {
        if (base == 0) return delta != 0;
        return abs(delta) > p.supply_eps * base;
    };

    std::vector<Episode> out;
    std::int64_t eblock = r.front().timestamp;  // next admissible expansion start
    std::int64_t cblock = r.front().timestamp;  // same for the contraction family
    std::optional<std::size_t> stall_from;
    if (r[0].price < p.peg) stall_from = 0;

    for (std::size_t i = 1; i < r.size(); ++i) {
        const Rational ds = r[i].supply - r[i - 1].supply;
        const bool jump = significant(ds, r[i - 1].supply);

        if (jump && ds > 0 && r[i].price > p.peg && r[i].timestamp >= eblock) {
            if (auto j = window_close(i)) {
                const Rational rise = r[*j].price - r[i].price;
                const EpisodeKind kind = rise > p.price_eps * r[i].price
                                             ? EpisodeKind::BrokenExpansion
                                             : EpisodeKind::EffectiveExpansion;
                out.push_back({kind, r[i].timestamp, r[*j].timestamp,
                               pct(r[i].price, r[*j].price), ds});
                eblock = r[*j].timestamp;
            }
        } else if (jump && ds < 0 && r[i].price < p.peg && r[i].timestamp >= cblock) {
            if (auto j = window_close(i)) {
                const Rational rise = r[*j].price - r[i].price;
                const EpisodeKind kind = rise > p.price_eps * r[i].price
                                             ? EpisodeKind::EffectiveContraction
                                             : EpisodeKind::BrokenContraction;
                out.push_back({kind, r[i].timestamp, r[*j].timestamp,
                               pct(r[i].price, r[*j].price), ds});
                cblock = r[*j].timestamp;
                stall_from.reset();
            }
        }

        // a stall is a full window below peg with only sub-threshold supply
        // movement; a burn inside it either classifies (above) or restarts it
        if (!stall_from) {
            if (r[i].price < p.peg && r[i].timestamp >= cblock) stall_from = i;
        } else if (r[i].price >= p.peg || jump) {
            stall_from.reset();
            if (r[i].price < p.peg && r[i].timestamp >= cblock) stall_from = i;
        } else if (r[i].timestamp - r[*stall_from].timestamp >= wsec) {
            out.push_back({EpisodeKind::StalledContraction, r[*stall_from].timestamp,
                           r[i].timestamp, pct(r[*stall_from].price, r[i].price),
                           r[i].supply - r[*stall_from].supply});
            cblock = r[i].timestamp;
            stall_from = i;
        }
    }

    std::stable_sort(out.begin(), out.end(), [](const Episode& a, const Episode& b) {
        if (a.start != b.start) return a.start < b.start;
        return a.end < b.end;
    });
    return out;
}

std::string episodes_to_json_lines(const std::vector<Episode>& episodes) {
    std::string out;
    for (const Episode& e : episodes) {
        nlohmann::json doc;
        doc["kind"] = episode_kind_name(e.kind);
        doc["start"] = e.start;
        doc["end"] = e.end;
        doc["price_change_pct"] = format_decimal(e.price_change_pct, 4);
        doc["supply_change"] = format_decimal(e.supply_change, 6);
        out += doc.dump();
        out += '\n';
    }
    return out;
}

}  // namespace stablecheck
