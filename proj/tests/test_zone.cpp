#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "stablecheck/zone.hpp"

using namespace stablecheck;
using namespace testing_oracles;

namespace {

Zone closed(ClockId dim, std::vector<Bound> m) {
    return Zone::from_matrix(dim, std::move(m)).canonicalized();
}

bool same_matrix(const Zone& a, const Zone& b) {
    if (a.dim() != b.dim()) return false;
    for (ClockId i = 0; i < a.dim(); ++i)
        for (ClockId j = 0; j < a.dim(); ++j)
            if (a.at(i, j) != b.at(i, j)) return false;
    return true;
}

// Constants are in [-8, 8]; a two-step difference chain can force a witness
// coordinate up to 16, so sample out to 18. Quarter steps are fine enough
// for two real clocks with integer constants.
constexpr std::int64_t kGridMax = 18;
constexpr std::int64_t kGridDen = 4;

}  // namespace

TEST_CASE("bound encoding and arithmetic") {
    CHECK(Bound::weak(3).value() == 3);
    CHECK(!Bound::weak(3).is_strict());
    CHECK(Bound::strict(3).is_strict());
    CHECK(Bound::strict(-2).value() == -2);
    CHECK(Bound::zero() == Bound::weak(0));

    // ordering: (v,<) below (v,<=) below (v+1,<)
    CHECK(Bound::strict(3) < Bound::weak(3));
    CHECK(Bound::weak(3) < Bound::strict(4));
    CHECK(Bound::strict(4) < Bound::weak(4));
    CHECK(Bound::weak(-1) < Bound::zero());

    // addition: strictness is contagious, infinity absorbs
    CHECK(Bound::weak(2) + Bound::weak(3) == Bound::weak(5));
    CHECK(Bound::weak(2) + Bound::strict(3) == Bound::strict(5));
    CHECK(Bound::strict(2) + Bound::strict(3) == Bound::strict(5));
    CHECK((Bound::infinity() + Bound::weak(-100)).is_infinity());
    CHECK((Bound::weak(7) + Bound::infinity()).is_infinity());

    CHECK_THROWS_AS(void(Bound::weak(Bound::kMaxValue) + Bound::weak(Bound::kMaxValue)),
                    BoundOverflow);
}

TEST_CASE("canonicalize keeps the zero zone fixed") {
    Zone z = Zone::zero(3);
    Zone c = z.canonicalized();
    CHECK(same_matrix(z, c));
    CHECK(!c.is_empty());
    for (ClockId i = 0; i < 3; ++i)
        for (ClockId j = 0; j < 3; ++j) CHECK(c.at(i, j) == Bound::zero());
}

TEST_CASE("canonicalize tightens an implied difference bound") {
    // x <= 5 and y unconstrained except y >= 0: closure must derive x - y <= 5.
    Zone z = Zone::universe(3).constrained(ClockConstraint::le(1, 5));
    CHECK(z.at(1, 0) == Bound::weak(5));
    CHECK(z.at(1, 2) == Bound::weak(5));  // x - y <= x - 0 <= 5
    CHECK(z.at(2, 1).is_infinity());
}

TEST_CASE("canonicalize agrees with fixpoint closure on random matrices") {
    std::mt19937_64 rng(0xC10C5u);
    int nonempty = 0;
    for (int iter = 0; iter < 2000; ++iter) {
        auto raw = random_matrix(rng, 3, 8);
        bool oracle_empty = naive_is_empty(3, raw);
        Zone z = Zone::from_matrix(3, raw).canonicalized();
        CHECK(z.is_empty() == oracle_empty);
        if (oracle_empty) continue;
        ++nonempty;
        auto want = naive_closure(3, raw);
        for (ClockId i = 0; i < 3; ++i)
            for (ClockId j = 0; j < 3; ++j) CHECK(z.at(i, j) == want[std::size_t(i) * 3 + j]);
    }
    CHECK(nonempty > 100);  // the generator must exercise the non-empty path
}

TEST_CASE("canonicalize is idempotent bit for bit") {
    std::mt19937_64 rng(0x1D3Au);
    for (int iter = 0; iter < 500; ++iter) {
        auto raw = random_matrix(rng, 3, 8);
        Zone once = Zone::from_matrix(3, raw).canonicalized();
        if (once.is_empty()) continue;
        Zone twice = once.canonicalized();
        CHECK(same_matrix(once, twice));
    }
}

TEST_CASE("emptiness matches grid sampling") {
    std::mt19937_64 rng(0xE3B7u);
    for (int iter = 0; iter < 800; ++iter) {
        auto raw = random_matrix(rng, 3, 8);
        Zone z = Zone::from_matrix(3, raw).canonicalized();
        bool found = false;
        for_each_grid_point(3, kGridMax, kGridDen, [&](const GridPoint& p) {
            if (!found && grid_point_in_matrix(p, 3, raw)) found = true;
        });
        CHECK(z.is_empty() == !found);
    }
}

TEST_CASE("contradictory constraints give the empty zone") {
    Zone z = Zone::universe(2)
                 .constrained(ClockConstraint::le(1, 5))
                 .constrained(ClockConstraint::ge(1, 7));
    CHECK(z.is_empty());
}

TEST_CASE("up on the zero zone is the diagonal") {
    Zone z = Zone::zero(3).up();
    // x = y and both roam upward from 0
    CHECK(z.at(1, 2) == Bound::zero());
    CHECK(z.at(2, 1) == Bound::zero());
    CHECK(z.at(1, 0).is_infinity());
    CHECK(z.at(2, 0).is_infinity());
    CHECK(z.at(0, 1) == Bound::zero());
    CHECK(!z.is_empty());
    CHECK(z.is_canonical_form());
}

TEST_CASE("up of a point is the ray keeping offsets") {
    // x = 3, y = 1
    Zone pt = Zone::universe(3)
                  .constrained(ClockConstraint::le(1, 3))
                  .constrained(ClockConstraint::ge(1, 3))
                  .constrained(ClockConstraint::le(2, 1))
                  .constrained(ClockConstraint::ge(2, 1));
    Zone ray = pt.up();
    CHECK(ray.at(1, 2) == Bound::weak(2));
    CHECK(ray.at(2, 1) == Bound::weak(-2));
    CHECK(ray.at(0, 1) == Bound::weak(-3));
    CHECK(ray.at(0, 2) == Bound::weak(-1));
    CHECK(ray.at(1, 0).is_infinity());
    CHECK(ray.at(2, 0).is_infinity());
}

TEST_CASE("up preserves membership under uniform delay") {
    std::mt19937_64 rng(0x0Fu);
    const std::int64_t deltas_scaled[] = {0, 1 * kGridDen, 2 * kGridDen + kGridDen / 2};
    for (int iter = 0; iter < 300; ++iter) {
        auto zo = random_nonempty_zone(rng, 3, 8);
        if (!zo) continue;
        Zone z = *zo;
        Zone u = z.up();
        for_each_grid_point(3, kGridMax, kGridDen, [&](const GridPoint& p) {
            if (!grid_point_in(p, z)) return;
            for (std::int64_t d : deltas_scaled) {
                GridPoint q = p;
                for (ClockId i = 1; i < 3; ++i) q.scaled[i] += d;
                CHECK(grid_point_in(q, u));
            }
        });
    }
}

TEST_CASE("up preserves difference bounds between real clocks") {
    std::mt19937_64 rng(0xD1FFu);
    for (int iter = 0; iter < 500; ++iter) {
        auto zo = random_nonempty_zone(rng, 3, 8);
        if (!zo) continue;
        Zone u = zo->up();
        CHECK(u.is_canonical_form());
        for (ClockId i = 1; i < 3; ++i) {
            CHECK(u.at(i, kZeroClock).is_infinity());
            CHECK(u.at(kZeroClock, i) == zo->at(kZeroClock, i));
            for (ClockId j = 1; j < 3; ++j) CHECK(u.at(i, j) == zo->at(i, j));
        }
    }
}

TEST_CASE("and with a redundant constraint changes nothing") {
    std::mt19937_64 rng(0xADDu);
    for (int iter = 0; iter < 200; ++iter) {
        auto zo = random_nonempty_zone(rng, 3, 8);
        if (!zo) continue;
        Zone z2 = zo->constrained(ClockConstraint::ge(1, 0));
        CHECK(same_matrix(*zo, z2));
    }
}

TEST_CASE("and pins the diagonal delay zone to a point") {
    // both clocks advance together from 0; t == 24 forces u == 24 as well
    Zone diag = Zone::zero(3).up();
    Zone pinned = diag.constrained(ClockConstraint::le(1, 24)).constrained(ClockConstraint::ge(1, 24));
    CHECK(pinned.at(1, 0) == Bound::weak(24));
    CHECK(pinned.at(0, 1) == Bound::weak(-24));
    CHECK(pinned.at(2, 0) == Bound::weak(24));
    CHECK(pinned.at(0, 2) == Bound::weak(-24));
    CHECK(pinned.at(1, 2) == Bound::zero());
    CHECK(pinned.at(2, 1) == Bound::zero());
    CHECK(!pinned.is_empty());
}

TEST_CASE("and below the floor empties the zone") {
    Zone z = Zone::universe(2).constrained(ClockConstraint::le(1, 5));
    Zone e = z.constrained(ClockConstraint::ge(1, 7));
    CHECK(e.is_empty());
}

TEST_CASE("constrained output stays canonical") {
    std::mt19937_64 rng(0xC0457u);
    std::uniform_int_distribution<int> val(-8, 8);
    std::uniform_int_distribution<int> pick(0, 2);
    for (int iter = 0; iter < 500; ++iter) {
        auto zo = random_nonempty_zone(rng, 3, 8);
        if (!zo) continue;
        ClockConstraint cc;
        switch (pick(rng)) {
            case 0: cc = ClockConstraint::le(1, val(rng)); break;
            case 1: cc = ClockConstraint::ge(2, val(rng)); break;
            default: cc = ClockConstraint::diff_le(1, 2, val(rng)); break;
        }
        Zone z2 = zo->constrained(cc);
        if (z2.is_empty()) continue;
        CHECK(z2.is_canonical_form());
        CHECK(same_matrix(z2, z2.canonicalized()));
    }
}

TEST_CASE("reset on the zero zone is the identity") {
    Zone z = Zone::zero(3);
    ClockId xs[] = {1};
    Zone r = z.reset(xs);
    CHECK(same_matrix(z, r));
}

TEST_CASE("reset drops one clock and keeps the other") {
    // from t = u = 24, reset u: t stays 24, u = 0, t - u = 24
    Zone pt = Zone::zero(3).up()
                  .constrained(ClockConstraint::le(1, 24))
                  .constrained(ClockConstraint::ge(1, 24));
    ClockId xs[] = {2};
    Zone r = pt.reset(xs);
    CHECK(r.at(1, 0) == Bound::weak(24));
    CHECK(r.at(0, 1) == Bound::weak(-24));
    CHECK(r.at(2, 0) == Bound::zero());
    CHECK(r.at(0, 2) == Bound::zero());
    CHECK(r.at(1, 2) == Bound::weak(24));
    CHECK(r.at(2, 1) == Bound::weak(-24));
}

TEST_CASE("reset twice equals reset once") {
    std::mt19937_64 rng(0x4E5E7u);
    for (int iter = 0; iter < 500; ++iter) {
        auto zo = random_nonempty_zone(rng, 3, 8);
        if (!zo) continue;
        ClockId xs[] = {1};
        Zone once = zo->reset(xs);
        Zone twice = once.reset(xs);
        CHECK(same_matrix(once, twice));
        CHECK(once.is_canonical_form());
    }
}

TEST_CASE("reset of several clocks matches sequential resets") {
    std::mt19937_64 rng(0x5EBu);
    for (int iter = 0; iter < 300; ++iter) {
        auto zo = random_nonempty_zone(rng, 3, 8);
        if (!zo) continue;
        ClockId both[] = {1, 2};
        ClockId first[] = {1};
        ClockId second[] = {2};
        Zone a = zo->reset(both);
        Zone b = zo->reset(first).reset(second);
        CHECK(same_matrix(a, b));
    }
}

TEST_CASE("includes is reflexive and respects up") {
    std::mt19937_64 rng(0x1C5u);
    for (int iter = 0; iter < 400; ++iter) {
        auto zo = random_nonempty_zone(rng, 3, 8);
        if (!zo) continue;
        CHECK(zo->includes(*zo));
        CHECK(zo->up().includes(*zo));
    }
}

TEST_CASE("includes agrees with grid sampling") {
    std::mt19937_64 rng(0x1CC2u);
    int disagreements_possible = 0;
    for (int iter = 0; iter < 300; ++iter) {
        auto ao = random_nonempty_zone(rng, 3, 8);
        auto bo = random_nonempty_zone(rng, 3, 8);
        if (!ao || !bo) continue;
        bool inc = ao->includes(*bo);
        // every sampled point of b must lie in a when inc holds; when it does
        // not hold the grid must expose a witness (constants are small ints)
        bool witness = false;
        for_each_grid_point(3, kGridMax, kGridDen, [&](const GridPoint& p) {
            if (witness || !grid_point_in(p, *bo)) return;
            if (!grid_point_in(p, *ao)) witness = true;
        });
        CHECK(inc == !witness);
        if (!inc) ++disagreements_possible;
    }
    CHECK(disagreements_possible > 20);
}

TEST_CASE("includes is a partial order") {
    std::mt19937_64 rng(0x9A27u);
    std::vector<Zone> zs;
    while (zs.size() < 30) {
        auto zo = random_nonempty_zone(rng, 3, 8);
        if (zo) zs.push_back(*zo);
    }
    for (const Zone& a : zs)
        for (const Zone& b : zs) {
            if (a.includes(b) && b.includes(a)) CHECK(a == b);
            for (const Zone& c : zs)
                if (a.includes(b) && b.includes(c)) CHECK(a.includes(c));
        }
}

TEST_CASE("empty zone edge cases for includes") {
    Zone e = Zone::universe(2)
                 .constrained(ClockConstraint::le(1, 1))
                 .constrained(ClockConstraint::ge(1, 3));
    Zone u = Zone::universe(2);
    CHECK(e.is_empty());
    CHECK(u.includes(e));
    CHECK(e.includes(e));
    CHECK(!e.includes(u));
}

TEST_CASE("down is the past of a zone") {
    // from the point t=u=24, down() reaches every t=u in [0,24]
    Zone pt = Zone::zero(3).up()
                  .constrained(ClockConstraint::le(1, 24))
                  .constrained(ClockConstraint::ge(1, 24));
    Zone past = pt.down();
    CHECK(past.at(0, 1) == Bound::zero());
    CHECK(past.at(1, 0) == Bound::weak(24));
    CHECK(past.at(1, 2) == Bound::zero());
    CHECK(past.at(2, 1) == Bound::zero());
    CHECK(past.includes(pt));
    CHECK(past.includes(Zone::zero(3)));
}

TEST_CASE("freed removes one clock's constraints") {
    Zone pt = Zone::zero(3).up()
                  .constrained(ClockConstraint::le(1, 24))
                  .constrained(ClockConstraint::ge(1, 24));
    Zone f = pt.freed(2);
    CHECK(f.at(1, 0) == Bound::weak(24));
    CHECK(f.at(0, 1) == Bound::weak(-24));
    CHECK(f.at(2, 0).is_infinity());
    CHECK(f.at(0, 2) == Bound::zero());
    CHECK(f.is_canonical_form());
    // original zone is a subset of the freed one
    CHECK(f.includes(pt));
}

TEST_CASE("intersect is the pointwise meet") {
    std::mt19937_64 rng(0x13577u);
    for (int iter = 0; iter < 300; ++iter) {
        auto ao = random_nonempty_zone(rng, 3, 8);
        auto bo = random_nonempty_zone(rng, 3, 8);
        if (!ao || !bo) continue;
        Zone m = ao->intersect(*bo);
        if (m.is_empty()) continue;
        CHECK(ao->includes(m));
        CHECK(bo->includes(m));
        for_each_grid_point(3, kGridMax, kGridDen, [&](const GridPoint& p) {
            bool in_both = grid_point_in(p, *ao) && grid_point_in(p, *bo);
            CHECK(in_both == grid_point_in(p, m));
        });
    }
}

TEST_CASE("operations reject work on empty zones") {
    Zone e = Zone::universe(2)
                 .constrained(ClockConstraint::le(1, 1))
                 .constrained(ClockConstraint::ge(1, 3));
    CHECK_THROWS_AS(e.up(), EmptyZoneError);
    ClockId xs[] = {1};
    CHECK_THROWS_AS(e.reset(xs), EmptyZoneError);
}

TEST_CASE("reset rejects the zero clock") {
    Zone z = Zone::zero(2);
    ClockId xs[] = {kZeroClock};
    CHECK_THROWS_AS(z.reset(xs), std::invalid_argument);
}

TEST_CASE("zone hashing and equality are consistent") {
    std::mt19937_64 rng(0x8A54u);
    for (int iter = 0; iter < 200; ++iter) {
        auto zo = random_nonempty_zone(rng, 3, 8);
        if (!zo) continue;
        Zone same = zo->canonicalized();
        CHECK(*zo == same);
        CHECK(zo->hash() == same.hash());
    }
    Zone a = Zone::universe(2).constrained(ClockConstraint::le(1, 3));
    Zone b = Zone::universe(2).constrained(ClockConstraint::le(1, 4));
    CHECK(a != b);
}

TEST_CASE("to_string prints human-readable constraints") {
    Zone z = Zone::universe(3)
                 .constrained(ClockConstraint::le(1, 5))
                 .constrained(ClockConstraint::gt(2, 1));
    std::vector<std::string> names = {"0", "x", "y"};
    std::string s = z.to_string(names);
    CHECK(s.find("x <= 5") != std::string::npos);
    CHECK(s.find("y > 1") != std::string::npos);
}
