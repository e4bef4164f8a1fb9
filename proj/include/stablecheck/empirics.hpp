#pragma once

// Price/supply time-series ingestion and detection of expansion/contraction
// episodes: did a supply intervention move the price back toward the peg
// within the observation window, or not?

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "stablecheck/rational.hpp"

namespace stablecheck {

struct ParseError : std::runtime_error {
    std::size_t line;
    ParseError(std::size_t ln, const std::string& what)
        : std::runtime_error("line " + std::to_string(ln) + ": " + what), line(ln) {}
};

struct NonMonotonicTimestamp : std::runtime_error {
    std::size_t line;
    explicit NonMonotonicTimestamp(std::size_t ln)
        : std::runtime_error("line " + std::to_string(ln) +
                             ": timestamp not strictly increasing"),
          line(ln) {}
};

struct TimeRecord {
    std::int64_t timestamp = 0;  // epoch seconds
    Rational price;
    Rational supply;

    bool operator==(const TimeRecord&) const = default;
};

struct TimeSeries {
    std::vector<TimeRecord> records;  // timestamps strictly increasing
    std::string source;
};

// Accepts `timestamp,price,supply` rows, or the simulator's
// `hour,price,supply,side` rows with hours converted to epoch seconds and the
// side column ignored. Prices and supplies are exact decimals, must be >= 0.
TimeSeries ingest_csv(const std::string& text, std::string source = "csv");

enum class EpisodeKind {
    EffectiveExpansion,
    BrokenExpansion,
    EffectiveContraction,
    BrokenContraction,
    StalledContraction,
};

const char* episode_kind_name(EpisodeKind k);

struct Episode {
    EpisodeKind kind = EpisodeKind::EffectiveExpansion;
    std::int64_t start = 0;  // timestamp of the triggering record
    std::int64_t end = 0;    // timestamp of the classifying record
    Rational price_change_pct;  // 100 * (price(end) - price(start)) / price(start)
    Rational supply_change;     // triggering jump; net change over a stall

    bool operator==(const Episode&) const = default;
};

struct DetectParams {
    Rational peg = 1;
    std::int64_t window_hours = 7;       // classification horizon per episode
    Rational price_eps = Rational(1, 200);    // relative price significance
    Rational supply_eps = Rational(1, 1000);  // relative supply-event threshold
};

// Single left-to-right scan. A supply rise above threshold while price > peg
// opens an expansion episode, classified at the first record >= window later:
// Broken when price rose further by more than price_eps, Effective otherwise.
// Supply drops below peg mirror this (Effective when price recovered by more
// than price_eps). A full window of price < peg with only sub-threshold
// supply movement is a StalledContraction. Episodes of the same family never
// overlap; triggers without a full window of data ahead are dropped. Throws
// std::invalid_argument when the series spans less than one window.
std::vector<Episode> detect_episodes(const TimeSeries& ts, const DetectParams& params = {});

// One canonical JSON object per line.
std::string episodes_to_json_lines(const std::vector<Episode>& episodes);

}  // namespace stablecheck
