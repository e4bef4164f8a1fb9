#include <random>
#include <vector>

#include "doctest.h"
#include "stablecheck/amm.hpp"

using namespace stablecheck;

namespace {

Rational rat(long long n, long long d = 1) { return Rational(n, d); }

Rational random_rational(std::mt19937_64& rng, long long max_num, long long max_den) {
    std::uniform_int_distribution<long long> num(1, max_num);
    std::uniform_int_distribution<long long> den(1, max_den);
    return Rational(num(rng), den(rng));
}

}  // namespace

TEST_CASE("spot price is the reserve ratio") {
    CHECK(spot_price({rat(100), rat(100)}) == rat(1));
    CHECK(spot_price({rat(100), rat(150)}) == rat(3, 2));
    // the December 14 scenario starts at $1.35
    CHECK(spot_price({rat(1000), rat(1350)}) == rat(27, 20));
    CHECK(spot_price({rat(1000), rat(1350)}) == parse_decimal("1.35"));
}

TEST_CASE("buying coin moves the pool along the constant product") {
    Pool p{rat(1000), rat(1000)};
    auto [p2, price] = apply_trade(p, {TradeSide::BuyCoin, rat(10)});
    // frozen from the fraction oracle: k = 10^6
    CHECK(p2.reserve_coin == rat(990));
    CHECK(p2.reserve_quote == rat(100000, 99));
    CHECK(p2.reserve_quote - p.reserve_quote == rat(1000, 99));  // quote paid in
    CHECK(price == rat(10000, 9801));
    CHECK(p2.reserve_coin * p2.reserve_quote == rat(1000000));
}

TEST_CASE("selling coin moves the pool the other way") {
    Pool p{rat(1000), rat(1000)};
    auto [p2, price] = apply_trade(p, {TradeSide::SellCoin, rat(10)});
    CHECK(p2.reserve_coin == rat(1010));
    CHECK(p2.reserve_quote == rat(100000, 101));
    CHECK(price == rat(10000, 10201));
    CHECK(p2.reserve_coin * p2.reserve_quote == rat(1000000));
}

TEST_CASE("buy then sell the same amount restores the price exactly") {
    Pool p{rat(777), rat(1234)};
    Price start = spot_price(p);
    auto [p2, mid] = apply_trade(p, {TradeSide::BuyCoin, rat(55, 7)});
    auto [p3, end] = apply_trade(p2, {TradeSide::SellCoin, rat(55, 7)});
    CHECK(end == start);
    CHECK(p3 == p);
    CHECK(mid > start);
}

TEST_CASE("constant product is exactly conserved over random fee-free sequences") {
    std::mt19937_64 rng(0xA33u);
    for (int run = 0; run < 200; ++run) {
        Pool p{random_rational(rng, 2000, 20) + 100, random_rational(rng, 2000, 20) + 100};
        Rational k = p.reserve_coin * p.reserve_quote;
        for (int step = 0; step < 20; ++step) {
            Rational amt = random_rational(rng, 50, 9);
            TradeSide side = (rng() & 1) ? TradeSide::BuyCoin : TradeSide::SellCoin;
            if (side == TradeSide::BuyCoin && amt >= p.reserve_coin) continue;
            Price before = spot_price(p);
            auto [next, after] = apply_trade(p, {side, amt});
            CHECK(next.reserve_coin * next.reserve_quote == k);
            if (side == TradeSide::BuyCoin)
                CHECK(after > before);
            else
                CHECK(after < before);
            p = next;
        }
    }
}

TEST_CASE("a positive fee grows the product and raises the buy cost") {
    Pool p{rat(1000), rat(1000)};
    Rational fee(3, 1000);
    auto [pf, _] = apply_trade(p, {TradeSide::BuyCoin, rat(10)}, fee);
    auto [p0, _unused] = apply_trade(p, {TradeSide::BuyCoin, rat(10)});
    CHECK(pf.reserve_quote > p0.reserve_quote);
    CHECK(pf.reserve_coin * pf.reserve_quote > rat(1000000));
}

TEST_CASE("draining trades are rejected") {
    Pool p{rat(100), rat(100)};
    CHECK_THROWS_AS(apply_trade(p, {TradeSide::BuyCoin, rat(100)}), PoolDrained);
    CHECK_THROWS_AS(apply_trade(p, {TradeSide::BuyCoin, rat(101)}), PoolDrained);
    CHECK_NOTHROW(apply_trade(p, {TradeSide::BuyCoin, rat(99)}));
    CHECK_THROWS_AS(apply_trade(p, {TradeSide::BuyCoin, rat(0)}), std::invalid_argument);
}

TEST_CASE("bond price is the square of the coin price") {
    CHECK(bab_price(rat(1)) == rat(1));
    CHECK(bab_price(parse_decimal("1.1")) == parse_decimal("1.21"));
    CHECK(bab_price(parse_decimal("0.8")) == parse_decimal("0.64"));
    // incentive direction: discount below peg, premium above
    std::mt19937_64 rng(0xB0BDu);
    for (int i = 0; i < 200; ++i) {
        Rational p = random_rational(rng, 999, 1000);
        if (p >= 1 || p == 0) continue;
        CHECK(bab_price(p) < p);
        CHECK(bab_price(1 + p) > 1 + p);
    }
}

TEST_CASE("rebase scales balances by price over peg") {
    auto [bal, supply] = ampl_rebase(rat(100), rat(1000), parse_decimal("1.2"), rat(1));
    CHECK(bal == rat(120));
    CHECK(supply == rat(1200));

    auto [same_bal, same_supply] = ampl_rebase(rat(100), rat(1000), rat(1), rat(1));
    CHECK(same_bal == rat(100));
    CHECK(same_supply == rat(1000));

    auto [burned, burned_supply] = ampl_rebase(rat(200), rat(1000), parse_decimal("0.9"), rat(1));
    CHECK(burned == rat(180));
    CHECK(burned_supply == rat(900));
}

TEST_CASE("rebase leaves every ownership share exactly unchanged") {
    std::mt19937_64 rng(0x5EAu);
    for (int run = 0; run < 100; ++run) {
        std::vector<Rational> balances;
        Rational supply = 0;
        for (int i = 0; i < 5; ++i) {
            balances.push_back(random_rational(rng, 500, 7));
            supply += balances.back();
        }
        Price price = random_rational(rng, 30, 10);
        for (const Rational& b : balances) {
            auto [b2, s2] = ampl_rebase(b, supply, price, rat(1));
            CHECK(b2 / s2 == b / supply);
        }
    }
}

TEST_CASE("fractional mint splits value between collateral and FXS burn") {
    MintSplit half = frax_mint(rat(1), {rat(1, 2)});
    CHECK(half.collateral_value == rat(1, 2));
    CHECK(half.fxs_value == rat(1, 2));

    MintSplit full = frax_mint(rat(7), {rat(1)});
    CHECK(full.collateral_value == rat(7));
    CHECK(full.fxs_value == rat(0));

    MintSplit algo = frax_mint(rat(7), {rat(0)});
    CHECK(algo.collateral_value == rat(0));
    CHECK(algo.fxs_value == rat(7));

    std::mt19937_64 rng(0xF4A3u);
    for (int i = 0; i < 200; ++i) {
        Rational n = random_rational(rng, 1000, 13);
        Rational r = random_rational(rng, 100, 100);
        if (r > 1) r = 1 / r;
        MintSplit s = frax_mint(n, {r});
        CHECK(s.collateral_value + s.fxs_value == n);
    }
}

TEST_CASE("ratio steps by exactly 0.25% toward the algorithmic side") {
    CollateralRatio genesis{rat(1)};
    CollateralRatio stepped = frax_step_ratio(genesis, parse_decimal("1.01"), rat(1));
    CHECK(stepped.r == parse_decimal("0.9975"));
    CHECK(stepped.r == rat(399, 400));

    CHECK(frax_step_ratio({rat(0)}, parse_decimal("1.01"), rat(1)).r == rat(0));  // clamp
    CHECK(frax_step_ratio({rat(1)}, parse_decimal("0.99"), rat(1)).r == rat(1));  // clamp
    CHECK(frax_step_ratio({rat(1, 2)}, rat(1), rat(1)).r == rat(1, 2));  // at peg: hold

    std::mt19937_64 rng(0x57E9u);
    for (int i = 0; i < 300; ++i) {
        Rational r = random_rational(rng, 400, 400);
        if (r > 1) r = 1 / r;
        Price price = random_rational(rng, 21, 20);
        CollateralRatio out = frax_step_ratio({r}, price, rat(1));
        CHECK(out.r >= 0);
        CHECK(out.r <= 1);
        Rational moved = out.r - r;
        if (moved < 0) moved = -moved;
        CHECK((moved == 0 || moved == ratio_step()));
    }
}

TEST_CASE("micro-unit conversion truncates toward zero") {
    CHECK(to_micro(rat(1, 3)) == 333333);
    CHECK(to_micro(rat(-1, 3)) == -333333);
    CHECK(to_micro(rat(1)) == 1000000);
    CHECK(to_micro(parse_decimal("1.35")) == 1350000);
    CHECK(from_micro(1350000) == rat(27, 20));
}

TEST_CASE("decimal strings parse and format exactly") {
    CHECK(parse_decimal("1.35") == rat(27, 20));
    CHECK(parse_decimal("-0.25") == rat(-1, 4));
    CHECK(parse_decimal("42") == rat(42));
    CHECK(parse_decimal("+0.5") == rat(1, 2));
    CHECK_THROWS_AS(parse_decimal("1.3.5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_decimal(""), std::invalid_argument);
    CHECK_THROWS_AS(parse_decimal("abc"), std::invalid_argument);

    CHECK(format_decimal(rat(27, 20), 6) == "1.350000");
    CHECK(format_decimal(rat(27, 20), 2) == "1.35");
    CHECK(format_decimal(rat(-1, 4), 2) == "-0.25");
    CHECK(format_decimal(rat(2, 3), 6) == "0.666667");
    CHECK(format_decimal(rat(1, 2), 0) == "1");  // half away from zero
    CHECK(format_micro(1350000) == "1.350000");
    CHECK(format_micro(999999) == "0.999999");

    // 6-digit decimals round-trip losslessly through format/parse
    std::mt19937_64 rng(0xF0u);
    std::uniform_int_distribution<std::int64_t> micros(-5'000'000, 5'000'000);
    for (int i = 0; i < 500; ++i) {
        std::int64_t m = micros(rng);
        CHECK(parse_decimal(format_micro(m)) == from_micro(m));
    }
}
