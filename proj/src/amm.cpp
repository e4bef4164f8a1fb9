#include "stablecheck/amm.hpp"

#include <cctype>

namespace stablecheck {

Rational parse_decimal(std::string_view text) {
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
    BigInt mantissa = 0;
    BigInt denom = 1;
    bool any_digit = false, seen_dot = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.') {
            if (seen_dot) throw std::invalid_argument("bad decimal: " + std::string(text));
            seen_dot = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw std::invalid_argument("bad decimal: " + std::string(text));
        mantissa = mantissa * 10 + (c - '0');
        if (seen_dot) denom *= 10;
        any_digit = true;
    }
    if (!any_digit) throw std::invalid_argument("bad decimal: " + std::string(text));
    Rational r(mantissa, denom);
    return neg ? -r : r;
}

std::string format_decimal(const Rational& r, int digits) {
    if (digits < 0 || digits > 18) throw std::invalid_argument("digits out of range");
    BigInt scale = 1;
    for (int i = 0; i < digits; ++i) scale *= 10;
    BigInt num = numerator(r) * scale * 2;
    BigInt den = denominator(r);
    bool neg = num < 0;
    if (neg) num = -num;
    BigInt scaled = (num / den + 1) / 2;  // round half away from zero
    BigInt whole = scaled / scale;
    BigInt frac = scaled % scale;
    std::string out = neg && scaled != 0 ? "-" : "";
    out += whole.convert_to<std::string>();
    if (digits > 0) {
        std::string f = frac.convert_to<std::string>();
        out += "." + std::string(std::size_t(digits) - f.size(), '0') + f;
    }
    return out;
}

Price spot_price(const Pool& p) {
    if (p.reserve_coin <= 0 || p.reserve_quote <= 0)
        throw std::invalid_argument("inactive pool");
    return p.reserve_quote / p.reserve_coin;
}

std::pair<Pool, Price> apply_trade(const Pool& p, const Trade& t, const Rational& fee) {
    if (p.reserve_coin <= 0 || p.reserve_quote <= 0)
        throw std::invalid_argument("inactive pool");
    if (t.amount <= 0) throw std::invalid_argument("trade amount must be positive");
    if (fee < 0 || fee >= 1) throw std::invalid_argument("fee must be in [0, 1)");

    Pool out = p;
    if (t.side == TradeSide::BuyCoin) {
        if (t.amount >= p.reserve_coin) throw PoolDrained();
        // trader takes `amount` coins; quote owed keeps the product, grossed
        // up by the fee on the input side
        Rational quote_in = p.reserve_quote * t.amount / ((p.reserve_coin - t.amount) * (1 - fee));
        out.reserve_coin -= t.amount;
        out.reserve_quote += quote_in;
    } else {
        Rational in_effective = t.amount * (1 - fee);
        Rational quote_out = p.reserve_quote * in_effective / (p.reserve_coin + in_effective);
        out.reserve_coin += t.amount;
        out.reserve_quote -= quote_out;
    }
    return {out, spot_price(out)};
}

Price bab_price(const Price& p_bac) {
    if (p_bac < 0) throw std::invalid_argument("negative price");
    return p_bac * p_bac;
}

std::pair<Rational, Rational> ampl_rebase(const Rational& balance, const Rational& total_supply,
                                          const Price& price, const Price& peg) {
    if (total_supply <= 0) throw std::invalid_argument("total supply must be positive");
    if (peg <= 0) throw std::invalid_argument("peg must be positive");
    Rational multiplier = price / peg;
    return {balance * multiplier, total_supply * multiplier};
}

MintSplit frax_mint(const Rational& n, const CollateralRatio& r) {
    if (n <= 0) throw std::invalid_argument("mint value must be positive");
    if (r.r < 0 || r.r > 1) throw std::invalid_argument("collateral ratio out of [0, 1]");
    return {n * r.r, n * (1 - r.r)};
}

CollateralRatio frax_step_ratio(const CollateralRatio& r, const Price& price, const Price& peg) {
    if (r.r < 0 || r.r > 1) throw std::invalid_argument("collateral ratio out of [0, 1]");
    Rational next = r.r;
    if (price > peg)
        next -= ratio_step();
    else if (price < peg)
        next += ratio_step();
    if (next < 0) next = 0;
    if (next > 1) next = 1;
    return {next};
}

}  // namespace stablecheck
