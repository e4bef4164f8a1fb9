#include "stablecheck/zone.hpp"

#include <cassert>
#include <functional>
#include <sstream>

namespace stablecheck {

std::string Bound::to_string() const {
    if (is_infinity()) return "inf";
    std::ostringstream os;
    os << (is_strict() ? "< " : "<= ") << value();
    return os.str();
}

namespace {
std::string clock_name(std::span<const std::string> names, ClockId i) {
    if (i < names.size()) return names[i];
    if (i == kZeroClock) return "0";
    return "x" + std::to_string(i);
}
}  // namespace

std::string ClockConstraint::to_string(std::span<const std::string> clock_names) const {
    std::ostringstream os;
    if (left == kZeroClock && right != kZeroClock) {
        // 0 - x <= c reads better flipped: x >= -c
        os << clock_name(clock_names, right) << (bound.is_strict() ? " > " : " >= ")
           << -bound.value();
        return os.str();
    }
    if (right == kZeroClock)
        os << clock_name(clock_names, left);
    else
        os << clock_name(clock_names, left) << " - " << clock_name(clock_names, right);
    os << " " << bound.to_string();
    return os.str();
}

Zone Zone::zero(ClockId dim) {
    assert(dim >= 1);
    Zone z(dim, true);
    z.m_.assign(std::size_t(dim) * dim, Bound::zero());
    return z;
}

Zone Zone::universe(ClockId dim) {
    assert(dim >= 1);
    Zone z(dim, true);
    z.m_.assign(std::size_t(dim) * dim, Bound::infinity());
    for (ClockId i = 0; i < dim; ++i) {
        z.cell(i, i) = Bound::zero();
        z.cell(kZeroClock, i) = Bound::zero();  // clocks non-negative
    }
    return z;
}

Zone Zone::from_matrix(ClockId dim, std::vector<Bound> m) {
    assert(m.size() == std::size_t(dim) * dim);
    Zone z(dim, false);
    z.m_ = std::move(m);
    for (ClockId i = 0; i < dim; ++i)
        if (z.cell(i, i) != Bound::zero())
            throw std::invalid_argument("zone matrix diagonal must be (0,<=)");
    return z;
}

void Zone::require_canonical(const char* op) const {
    if (!canonical_)
        throw std::logic_error(std::string("zone op '") + op + "' requires canonical input");
}

bool Zone::is_empty() const {
    if (canonical_) return empty_;
    return canonicalized().empty_;
}

Bound Zone::at(ClockId i, ClockId j) const {
    assert(i < dim_ && j < dim_);
    return cell(i, j);
}

Zone Zone::canonicalized() const {
    if (canonical_) return *this;
    Zone z = *this;
    // Floyd–Warshall over the bound semiring.
    for (ClockId k = 0; k < dim_; ++k)
        for (ClockId i = 0; i < dim_; ++i) {
            if (z.cell(i, k).is_infinity()) continue;
            for (ClockId j = 0; j < dim_; ++j) {
                Bound via = z.cell(i, k) + z.cell(k, j);
                if (via < z.cell(i, j)) z.cell(i, j) = via;
            }
        }
    z.canonical_ = true;
    for (ClockId i = 0; i < dim_; ++i)
        if (z.cell(i, i) < Bound::zero()) {
            z.empty_ = true;
            break;
        }
    return z;
}

Zone Zone::up() const {
    require_canonical("up");
    if (empty_) throw EmptyZoneError("up");
    Zone z = *this;
    for (ClockId i = 1; i < dim_; ++i) z.cell(i, kZeroClock) = Bound::infinity();
    return z;  // closure is preserved: any path through clock 0 only loosens
}

Zone Zone::down() const {
    require_canonical("down");
    if (empty_) throw EmptyZoneError("down");
    Zone z = *this;
    for (ClockId j = 1; j < dim_; ++j) {
        Bound b = Bound::zero();
        for (ClockId k = 1; k < dim_; ++k)
            if (z.cell(k, j) < b) b = z.cell(k, j);
        z.cell(kZeroClock, j) = b;
    }
    return z;
}

Zone Zone::constrained(const ClockConstraint& c) const {
    require_canonical("constrained");
    if (empty_) return *this;
    assert(c.left < dim_ && c.right < dim_);
    if (c.bound.is_infinity() || c.left == c.right) return *this;
    // Contradiction with the reverse bound means an empty intersection.
    if (cell(c.right, c.left) + c.bound < Bound::zero()) {
        Zone z = *this;
        z.empty_ = true;
        return z;
    }
    if (!(c.bound < cell(c.left, c.right))) return *this;
    Zone z = *this;
    z.cell(c.left, c.right) = c.bound;
    // One tightening pass suffices: the only new shortest paths route once
    // through the updated edge (its cycle with the reverse bound is >= 0).
    for (ClockId p = 0; p < dim_; ++p) {
        if (z.cell(p, c.left).is_infinity()) continue;
        Bound head = z.cell(p, c.left) + c.bound;
        for (ClockId q = 0; q < dim_; ++q) {
            Bound via = head + z.cell(c.right, q);
            if (via < z.cell(p, q)) z.cell(p, q) = via;
        }
    }
    return z;
}

Zone Zone::constrained(std::span<const ClockConstraint> cs) const {
    Zone z = *this;
    for (const auto& c : cs) {
        z = z.constrained(c);
        if (z.empty_) break;
    }
    return z;
}

Zone Zone::reset(std::span<const ClockId> clocks) const {
    require_canonical("reset");
    if (empty_) throw EmptyZoneError("reset");
    Zone z = *this;
    for (ClockId x : clocks) {
        if (x == kZeroClock) throw std::invalid_argument("cannot reset the zero clock");
        assert(x < dim_);
        for (ClockId j = 0; j < dim_; ++j) {
            z.cell(x, j) = z.cell(kZeroClock, j);
            z.cell(j, x) = z.cell(j, kZeroClock);
        }
        z.cell(x, x) = Bound::zero();
    }
    return z;
}

Zone Zone::freed(ClockId x) const {
    require_canonical("freed");
    if (empty_) throw EmptyZoneError("freed");
    assert(x != kZeroClock && x < dim_);
    Zone z = *this;
    for (ClockId j = 0; j < dim_; ++j) {
        if (j != x) z.cell(x, j) = Bound::infinity();
        z.cell(j, x) = z.cell(j, kZeroClock);
    }
    z.cell(x, kZeroClock) = Bound::infinity();
    z.cell(kZeroClock, x) = Bound::zero();
    z.cell(x, x) = Bound::zero();
    return z;
}

Zone Zone::intersect(const Zone& other) const {
    require_canonical("intersect");
    other.require_canonical("intersect");
    assert(dim_ == other.dim_);
    if (empty_) return *this;
    if (other.empty_) return other;
    Zone z(dim_, false);
    z.m_.resize(m_.size());
    for (std::size_t i = 0; i < m_.size(); ++i) z.m_[i] = std::min(m_[i], other.m_[i]);
    return z.canonicalized();
}

bool Zone::includes(const Zone& other) const {
    require_canonical("includes");
    other.require_canonical("includes");
    assert(dim_ == other.dim_);
    if (other.empty_) return true;
    if (empty_) return false;
    for (std::size_t i = 0; i < m_.size(); ++i)
        if (m_[i] < other.m_[i]) return false;
    return true;
}

bool Zone::check_canonical() const {
    if (!canonical_) return false;
    if (empty_) return true;
    for (ClockId i = 0; i < dim_; ++i) {
        if (cell(i, i) != Bound::zero()) return false;
        if (i != kZeroClock && Bound::zero() < cell(kZeroClock, i)) return false;
    }
    for (ClockId k = 0; k < dim_; ++k)
        for (ClockId i = 0; i < dim_; ++i)
            for (ClockId j = 0; j < dim_; ++j)
                if (cell(i, k) + cell(k, j) < cell(i, j)) return false;
    return true;
}

bool Zone::operator==(const Zone& other) const {
    if (dim_ != other.dim_) return false;
    bool e1 = is_empty(), e2 = other.is_empty();
    if (e1 || e2) return e1 == e2;
    const Zone a = canonicalized(), b = other.canonicalized();
    return a.m_ == b.m_;
}

std::size_t Zone::hash() const {
    if (is_empty()) return 0x9e3779b97f4a7c15ull;
    const Zone z = canonicalized();
    std::size_t h = z.dim_;
    for (const Bound& b : z.m_)
        h = h * 1099511628211ull + std::size_t(b.raw());
    return h;
}

std::string Zone::to_string(std::span<const std::string> clock_names) const {
    if (is_empty()) return "(empty)";
    std::ostringstream os;
    bool first = true;
    for (ClockId i = 0; i < dim_; ++i)
        for (ClockId j = 0; j < dim_; ++j) {
            if (i == j || cell(i, j).is_infinity()) continue;
            // skip the implicit non-negativity rows that say nothing
            if (i == kZeroClock && cell(i, j) == Bound::zero()) continue;
            if (!first) os << " && ";
            first = false;
            os << ClockConstraint{i, j, cell(i, j)}.to_string(clock_names);
        }
    if (first) os << "(universe)";
    return os.str();
}

}  // namespace stablecheck
