# Every closed form in the library is backed by two independent engines:
# exact-lognormal Monte Carlo and Gauss-Legendre quadrature against the
# normal density. This reproduces those cross-checks by hand.

import math

import numpy as np

from fairhedge import (
    MarketParams,
    McConfig,
    OptionContract,
    expected_call_payoff_physical,
    holder_loss,
    mc_conditional_loss,
    minimize_writer_risk,
    quad_expectation,
    simulate_terminal,
    writer_loss,
)


def main():
    params = MarketParams(spot=100.0, drift=0.10, volatility=0.20, risk_free=0.05)
    contract = OptionContract(strike=100.0, expiry=1.0)
    quote = minimize_writer_risk(params, contract)
    report = quote.report

    # Quadrature: E[f(Z)] with the terminal price written as a function of Z.
    sig_sqrt_t = params.volatility * math.sqrt(contract.expiry)
    loc = (params.drift - 0.5 * params.volatility**2) * contract.expiry

    def terminal(z):
        return params.spot * np.exp(loc + sig_sqrt_t * z)

    expected_payoff_quad = quad_expectation(
        lambda z: np.maximum(terminal(z) - contract.strike, 0.0)
    )
    closed = expected_call_payoff_physical(params, contract)
    print(f"E[(S-K)+]   closed {closed:.10f}   quadrature {expected_payoff_quad:.10f}")

    cuts = [report.thresholds.d1, report.thresholds.d, report.thresholds.d2]
    prob_quad = quad_expectation(
        lambda z: (writer_loss(params, contract, quote.x_star, quote.price, terminal(z)) > 0)
        .astype(float),
        breakpoints=cuts,
    )
    print(f"P(loss)     closed {report.loss_prob:.10f}   quadrature {prob_quad:.10f}")

    # Monte Carlo: one million exact lognormal draws, chunked and seeded so
    # the run is reproducible bit for bit.
    mc = McConfig(paths=1_000_000, seed=20240)
    sample = simulate_terminal(params, contract.expiry, mc)

    w = mc_conditional_loss(writer_loss(params, contract, quote.x_star, quote.price, sample))
    h = mc_conditional_loss(holder_loss(params, contract, quote.price, sample))
    print(f"writer risk closed {report.writer_risk:.6f}   MC {w.mean:.6f} +- {w.std_error:.6f}")
    print(f"holder risk closed {report.holder_risk:.6f}   MC {h.mean:.6f} +- {h.std_error:.6f}")
    payoff = np.maximum(sample - contract.strike, 0.0)
    print(f"E[(S-K)+]   closed {closed:.6f}   MC {payoff.mean():.6f} "
          f"+- {payoff.std(ddof=1) / math.sqrt(len(payoff)):.6f}")

    again = simulate_terminal(params, contract.expiry, mc)
    print(f"simulation bit-identical on rerun: {np.array_equal(sample, again)}")


if __name__ == "__main__":
    main()
