# Price a non-traded call the textbook way and look at how the trade feels
# under the real-world drift: with mu > r the holder of a Black-Scholes
# priced call wins on average, the statically hedged writer loses.

import math

from fairhedge import (
    MarketParams,
    OptionContract,
    bs_call_price,
    d_plus_minus,
    expected_call_payoff_physical,
    expected_profits,
    std_normal_cdf,
)


def main():
    params = MarketParams(spot=100.0, drift=0.10, volatility=0.20, risk_free=0.05)
    contract = OptionContract(strike=100.0, expiry=1.0)

    price = bs_call_price(params, contract)
    expected_payoff = expected_call_payoff_physical(params, contract)
    print(f"Black-Scholes price            C_BS = {price:.4f}")
    print(f"Real-world expected payoff  E[C(T)] = {expected_payoff:.4f}")
    print(f"Compounded premium       C_BS e^rT  = {price * math.exp(0.05):.4f}")
    print()

    # Sell at C_BS and delta hedge once, holding the position to expiry.
    delta = std_normal_cdf(d_plus_minus(params, contract, params.risk_free)[0])
    holder, writer = expected_profits(params, contract, delta, price)
    print(f"Static delta hedge x = N(d+) = {delta:.4f}")
    print(f"  holder expected profit = {holder:+.4f}")
    print(f"  writer expected profit = {writer:+.4f}")
    print()
    print("The writer subsidizes the holder at the Black-Scholes price, which")
    print("is why the premium has to be renegotiated before the trade happens.")

    print()
    print("Writer expected profit as the hedge grows (linear in x):")
    for x in (0.0, 0.25, 0.5, 0.75, 0.99):
        _, writer = expected_profits(params, contract, x, price)
        print(f"  x = {x:4.2f}  ->  {writer:+.4f}")


if __name__ == "__main__":
    main()
