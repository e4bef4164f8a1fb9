#pragma once

// Exact market math: constant-product pool pricing, bond pricing, supply
// rebase, and fractional-collateral mint/ratio stepping.

#include <stdexcept>
#include <utility>

#include "stablecheck/rational.hpp"

namespace stablecheck {

struct PoolDrained : std::runtime_error {
    PoolDrained() : std::runtime_error("trade would drain the pool's coin reserve") {}
};

struct Pool {
    Rational reserve_coin;
    Rational reserve_quote;

    bool operator==(const Pool&) const = default;
};

using Price = Rational;  // quote per coin

enum class TradeSide { BuyCoin, SellCoin };

struct Trade {
    TradeSide side = TradeSide::BuyCoin;
    Rational amount;  // coin units, > 0
};

struct CollateralRatio {
    Rational r;  // in [0, 1]
};

// 0.25% per adjustment
inline const Rational& ratio_step() {
    static const Rational step(1, 400);
    return step;
}

struct MintSplit {
    Rational collateral_value;
    Rational fxs_value;
};

// reserve_quote / reserve_coin, exact.
Price spot_price(const Pool& p);

// Constant-product swap. With fee = 0 the product is exactly preserved;
// a positive fee is charged on the input side and accrues to the pool.
std::pair<Pool, Price> apply_trade(const Pool& p, const Trade& t, const Rational& fee = Rational(0));

// Bond price is the square of the coin price.
Price bab_price(const Price& p_bac);

// Proportional supply change: every balance scales by price/peg.
std::pair<Rational, Rational> ampl_rebase(const Rational& balance, const Rational& total_supply,
                                          const Price& price, const Price& peg);

// Minting n of value places n*r as collateral and burns n*(1-r) of FXS.
MintSplit frax_mint(const Rational& n, const CollateralRatio& r);

// Hourly ratio adjustment: above peg steps down (more algorithmic), below
// peg steps up, at peg holds; clamped to [0, 1].
CollateralRatio frax_step_ratio(const CollateralRatio& r, const Price& price, const Price& peg);

}  // namespace stablecheck
