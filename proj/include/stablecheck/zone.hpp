#pragma once

// Clock-zone arithmetic over difference-bound matrices (DBMs).
//
// A zone is a convex set of clock valuations described by constraints of
// the form x_i - x_j ≺ c with ≺ ∈ {<, <=} and integer c. Clock 0 is the
// constant-zero reference clock, so single-clock bounds are differences
// against it. Canonical form keeps every entry at its tightest derivable
// value (all-pairs shortest paths), which makes emptiness and inclusion
// cheap pointwise checks.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stablecheck {

using ClockId = std::uint16_t;
inline constexpr ClockId kZeroClock = 0;

struct BoundOverflow : std::runtime_error {
    BoundOverflow() : std::runtime_error("bound arithmetic overflow") {}
};

struct EmptyZoneError : std::runtime_error {
    explicit EmptyZoneError(const char* op)
        : std::runtime_error(std::string("operation '") + op + "' on empty zone") {}
};

// ── Bound ───────────────────────────────────────────────────────────────────
// One DBM entry: a finite (value, strictness) pair or +infinity.
// Encoded as raw = 2*value + (weak ? 1 : 0), so the native integer order is
// exactly the bound order (v,<) < (v,<=) < (v+1,<), with infinity greatest.

class Bound {
public:
    static constexpr std::int64_t kMaxValue = std::int64_t{1} << 30;

    static constexpr Bound infinity() { return Bound(kInfRaw); }
    static constexpr Bound weak(std::int64_t v) { return Bound(2 * v + 1); }
    static constexpr Bound strict(std::int64_t v) { return Bound(2 * v); }
    static constexpr Bound zero() { return weak(0); }

    constexpr Bound() : raw_(kInfRaw) {}

    constexpr bool is_infinity() const { return raw_ == kInfRaw; }
    constexpr bool is_strict() const { return !is_infinity() && (raw_ & 1) == 0; }
    // floor division keeps negative values correct
    constexpr std::int64_t value() const { return raw_ >> 1; }

    // Bound addition: used for triangle tightening. Throws on overflow past
    // kMaxValue; model constants are small so a finite overflow is a bug,
    // not a saturation case.
    Bound operator+(Bound o) const {
        if (is_infinity() || o.is_infinity()) return infinity();
        std::int64_t v = value() + o.value();
        if (v > kMaxValue || v < -kMaxValue) throw BoundOverflow();
        return Bound(2 * v + ((raw_ & 1) & (o.raw_ & 1)));
    }

    friend constexpr bool operator==(Bound a, Bound b) { return a.raw_ == b.raw_; }
    friend constexpr auto operator<=>(Bound a, Bound b) { return a.raw_ <=> b.raw_; }

    constexpr std::int64_t raw() const { return raw_; }
    std::string to_string() const;

private:
    static constexpr std::int64_t kInfRaw = std::int64_t{1} << 62;
    explicit constexpr Bound(std::int64_t raw) : raw_(raw) {}
    std::int64_t raw_;
};

// ── ClockConstraint ─────────────────────────────────────────────────────────
// x_left - x_right ≺ bound. Conjunctions are plain lists of these.

struct ClockConstraint {
    ClockId left = 0;
    ClockId right = 0;
    Bound bound = Bound::infinity();

    static ClockConstraint le(ClockId x, std::int64_t c) { return {x, kZeroClock, Bound::weak(c)}; }
    static ClockConstraint lt(ClockId x, std::int64_t c) { return {x, kZeroClock, Bound::strict(c)}; }
    static ClockConstraint ge(ClockId x, std::int64_t c) { return {kZeroClock, x, Bound::weak(-c)}; }
    static ClockConstraint gt(ClockId x, std::int64_t c) { return {kZeroClock, x, Bound::strict(-c)}; }
    static ClockConstraint diff_le(ClockId x, ClockId y, std::int64_t c) { return {x, y, Bound::weak(c)}; }
    static ClockConstraint diff_lt(ClockId x, ClockId y, std::int64_t c) { return {x, y, Bound::strict(c)}; }

    bool operator==(const ClockConstraint&) const = default;
    std::string to_string(std::span<const std::string> clock_names = {}) const;
};

// ── Zone ────────────────────────────────────────────────────────────────────
// Immutable value type. Every factory and operation returns a canonical
// zone (or one flagged empty); only from_matrix may hold a non-canonical
// matrix, for feeding canonicalized() in tests and loaders.

class Zone {
public:
    // All clocks exactly zero.
    static Zone zero(ClockId dim);
    // All clocks >= 0, otherwise unconstrained.
    static Zone universe(ClockId dim);
    // Raw row-major matrix; not canonicalized. Diagonal must be (0,<=).
    static Zone from_matrix(ClockId dim, std::vector<Bound> m);

    ClockId dim() const { return dim_; }
    bool is_canonical_form() const { return canonical_; }
    bool is_empty() const;

    // m[i][j] bounds x_i - x_j. Canonical non-empty zones only.
    Bound at(ClockId i, ClockId j) const;

    // All-pairs tightest closure. Idempotent; detects emptiness.
    Zone canonicalized() const;

    // Future: drop upper bounds on every clock ({v + d | v in z, d >= 0}).
    Zone up() const;
    // Past: valuations from which the zone is reachable by pure delay.
    Zone down() const;
    // Intersection with one constraint, re-tightened; may come back empty.
    Zone constrained(const ClockConstraint& c) const;
    Zone constrained(std::span<const ClockConstraint> cs) const;
    // Listed clocks set to 0, remaining differences preserved.
    Zone reset(std::span<const ClockId> clocks) const;
    // All constraints on one clock removed (except x >= 0).
    Zone freed(ClockId x) const;
    Zone intersect(const Zone& other) const;

    // Superset test: every valuation of other lies in *this.
    bool includes(const Zone& other) const;

    // Recomputed structural check (diagonal + triangle tightness); used by
    // validation and property tests rather than trusted state.
    bool check_canonical() const;

    bool operator==(const Zone& other) const;
    std::size_t hash() const;
    std::string to_string(std::span<const std::string> clock_names = {}) const;

private:
    Zone(ClockId dim, bool canonical) : dim_(dim), canonical_(canonical) {}

    Bound& cell(ClockId i, ClockId j) { return m_[std::size_t(i) * dim_ + j]; }
    Bound cell(ClockId i, ClockId j) const { return m_[std::size_t(i) * dim_ + j]; }
    void require_canonical(const char* op) const;

    ClockId dim_ = 0;
    bool canonical_ = false;
    bool empty_ = false;
    std::vector<Bound> m_;
};

}  // namespace stablecheck
