"""Cross-checks of every closed form against the simulation and quadrature engines.

Each check returns a CheckResult; the CLI validate command runs them all
and turns the outcome into an exit code. Tolerances: 1e-8 relative against
quadrature for expectations and risks, 1e-10 for algebraic identities, and
3.5 standard errors against Monte Carlo (the band scales automatically
with the configured path count).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterator

import numpy as np

from . import equilibrium as eq
from .core import (
    MarketParams,
    NumericConfig,
    OptionContract,
    bs_call_price,
    d_plus_minus,
    expected_call_payoff_physical,
    expected_put_payoff_physical,
    implied_vol,
)
from .errors import PricingError
from .oracle import McConfig, QuadConfig, mc_conditional_loss, quad_expectation, simulate_terminal

__all__ = ["CheckResult", "draw_suite", "terminal_price_fn", "run_all_checks"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def rel_err(a: float, b: float) -> float:
    """Relative disagreement of two values, safe at zero."""
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > 0 else 0.0


def terminal_price_fn(params: MarketParams, expiry: float):
    """Map standard normal draws to terminal prices S(T), vectorized."""
    loc = (params.drift - 0.5 * params.volatility**2) * expiry
    scale = params.volatility * math.sqrt(expiry)

    def terminal(z: np.ndarray) -> np.ndarray:
        return params.spot * np.exp(loc + scale * np.asarray(z, dtype=float))

    return terminal


def _price_positive_x_max(params: MarketParams, contract: OptionContract) -> float:
    # The fair price is affine decreasing in x and crosses zero here.
    t = contract.expiry
    slope = (
        0.5
        * params.spot
        * (math.exp(params.drift * t) - math.exp(params.risk_free * t))
        * math.exp(-params.risk_free * t)
    )
    return (
        math.exp(-params.risk_free * t)
        * expected_call_payoff_physical(params, contract)
        / slope
    )


def valid_hedge_upper_bound(params: MarketParams, contract: OptionContract) -> float:
    """Largest searchable x: below both the x < 1 endpoint and price positivity."""
    return min(eq.MAX_HEDGE_FRACTION, _price_positive_x_max(params, contract) * (1.0 - 1e-9))


def draw_suite(
    n: int, seed: int = 2024, threshold_window: float | None = None
) -> Iterator[tuple[MarketParams, OptionContract, float]]:
    """Random market scenarios restricted to the valid hedging domain.

    Ranges: S0 in [50, 200], K in [0.5, 1.5] S0, sigma in [0.05, 0.6],
    r in [0, 0.08], mu - r in (0, 0.15], T in [0.1, 3], x in (0, 1)
    intersected with {fair price > 0}.

    Two numeric guards keep every draw representable in doubles: contracts
    whose unhedged premium falls below 1e-8 of spot are redrawn (such a
    premium perturbs the strike below one ulp, so the strict threshold
    inequalities have no floating-point meaning), and x stays a relative
    1e-3 inside the premium-positivity boundary for the same reason.
    With threshold_window set, draws are further redrawn until every loss
    threshold lies within [-window, window], which makes the loss events
    resolvable by a quadrature oracle on a [-10, 10] z window.
    """
    rng = np.random.default_rng(seed)
    produced = 0
    while produced < n:
        s0 = rng.uniform(50.0, 200.0)
        r = rng.uniform(0.0, 0.08)
        params = MarketParams(
            spot=s0,
            drift=r + 0.15 * (1.0 - rng.uniform(0.0, 1.0)),
            volatility=rng.uniform(0.05, 0.6),
            risk_free=r,
        )
        contract = OptionContract(strike=s0 * rng.uniform(0.5, 1.5), expiry=rng.uniform(0.1, 3.0))
        if expected_call_payoff_physical(params, contract) < 1e-8 * s0:
            continue
        upper = min(eq.MAX_HEDGE_FRACTION, _price_positive_x_max(params, contract) * (1.0 - 1e-3))
        x = upper * rng.uniform(0.0, 1.0)
        if x <= 0.0:
            x = 0.5 * upper
        if threshold_window is not None:
            # Oracle-resolvable draws only: every loss boundary inside the
            # window, and a premium big enough that pointwise loss values
            # clear the cancellation noise (~1 ulp of the strike) that the
            # definitional integrands pick up near the payoff kink.
            price = eq.fair_price(params, contract, x)
            if price < 1e-5 * s0:
                continue
            th = eq.risk_thresholds(params, contract, x, price)
            bounded = (math.isinf(th.d1) or abs(th.d1) <= threshold_window) and all(
                abs(v) <= threshold_window for v in (th.d, th.d2, th.d_prime)
            )
            if not bounded:
                continue
        produced += 1
        yield params, contract, x


def check_implied_vol_round_trip(
    params: MarketParams, contract: OptionContract, cfg: NumericConfig
) -> CheckResult:
    worst = 0.0
    for sigma in (0.05, 0.1, 0.2, 0.4, 1.0):
        trial = replace(params, volatility=sigma)
        recovered = implied_vol(trial, contract, bs_call_price(trial, contract), cfg)
        worst = max(worst, abs(recovered - sigma))
    return CheckResult(
        "implied_vol_round_trip", worst <= 1e-6, f"max abs err {worst:.3e} (tol 1e-06)"
    )


def check_price_vs_quadrature(
    params: MarketParams, contract: OptionContract, quad_cfg: QuadConfig
) -> CheckResult:
    t = contract.expiry

    def payoff_at(growth: float):
        loc = (growth - 0.5 * params.volatility**2) * t
        scale = params.volatility * math.sqrt(t)

        def payoff(z: np.ndarray) -> np.ndarray:
            return np.maximum(params.spot * np.exp(loc + scale * z) - contract.strike, 0.0)

        return payoff

    kink_q = -d_plus_minus(params, contract, params.risk_free)[1]
    kink_p = -d_plus_minus(params, contract, params.drift)[1]
    bs_quad = math.exp(-params.risk_free * t) * quad_expectation(
        payoff_at(params.risk_free), quad_cfg, breakpoints=[kink_q]
    )
    epc_quad = quad_expectation(payoff_at(params.drift), quad_cfg, breakpoints=[kink_p])
    err = max(
        rel_err(bs_call_price(params, contract), bs_quad),
        rel_err(expected_call_payoff_physical(params, contract), epc_quad),
    )
    return CheckResult(
        "prices_vs_quadrature", err <= 1e-8, f"max rel err {err:.3e} (tol 1e-08)"
    )


def check_physical_parity(params: MarketParams, contract: OptionContract) -> CheckResult:
    t = contract.expiry
    call = expected_call_payoff_physical(params, contract)
    put = expected_put_payoff_physical(params, contract)
    forward = params.spot * math.exp(params.drift * t) - contract.strike
    err = abs(call - put - forward) / max(1.0, abs(call), abs(put))
    return CheckResult(
        "physical_put_call_parity", err <= 1e-10, f"rel err {err:.3e} (tol 1e-10)"
    )


def check_fair_play_identity(params: MarketParams, contract: OptionContract) -> CheckResult:
    upper = valid_hedge_upper_bound(params, contract)
    worst = 0.0
    for x in (0.0, 0.25, 0.5, 0.7212, 0.99):
        if x > upper:
            continue
        price = eq.fair_price(params, contract, x)
        holder, writer = eq.expected_profits(params, contract, x, price)
        worst = max(worst, abs(holder - writer))
    return CheckResult(
        "fair_play_identity", worst <= 1e-10, f"max abs gap {worst:.3e} (tol 1e-10)"
    )


def check_threshold_ordering(n_draws: int, seed: int) -> CheckResult:
    violations = 0
    for params, contract, x in draw_suite(n_draws, seed):
        price = eq.fair_price(params, contract, x)
        th = eq.risk_thresholds(params, contract, x, price)
        if math.isfinite(th.d1) and not th.d1 < th.d:
            violations += 1
        elif not (th.d < th.d2 and th.d < th.d_prime):
            violations += 1
    return CheckResult(
        "threshold_ordering",
        violations == 0,
        f"{violations} violations in {n_draws} draws",
    )


def check_threshold_arg_monotonicity(n_draws: int, seed: int) -> CheckResult:
    violations = 0
    for params, contract, _ in draw_suite(n_draws, seed):
        upper = min(0.99, valid_hedge_upper_bound(params, contract) * 0.99)
        if upper <= 0.02:
            continue
        t = contract.expiry
        compounding = math.exp(params.risk_free * t)
        xs = np.linspace(0.01, upper, 100)
        prices = np.array([eq.fair_price(params, contract, float(x)) for x in xs])
        dead_call = (xs * params.spot - prices) * compounding / (params.spot * xs)
        live_call = (contract.strike + (prices - xs * params.spot) * compounding) / (
            params.spot * (1.0 - xs)
        )
        if np.any(np.diff(dead_call) < -1e-12) or np.any(np.diff(live_call) < -1e-12):
            violations += 1
    return CheckResult(
        "threshold_arg_monotonicity",
        violations == 0,
        f"{violations} violating draws out of {n_draws}",
    )


def quadrature_risk(
    params: MarketParams,
    contract: OptionContract,
    x: float,
    price: float,
    quad_cfg: QuadConfig,
) -> tuple[float, float, float]:
    """Loss probability, writer risk and holder risk from quadrature alone.

    Losses are evaluated from their definitions path by path; the closed-form
    thresholds enter only as panel breakpoints to keep the rule high-order.
    """
    th = eq.risk_thresholds(params, contract, x, price)
    terminal = terminal_price_fn(params, contract.expiry)

    def w_loss(z: np.ndarray) -> np.ndarray:
        return eq.writer_loss(params, contract, x, price, terminal(z))

    def h_loss(z: np.ndarray) -> np.ndarray:
        return eq.holder_loss(params, contract, price, terminal(z))

    cuts = [th.d1, th.d, th.d2, th.d_prime]
    prob = quad_expectation(lambda z: (w_loss(z) > 0).astype(float), quad_cfg, cuts)
    w_cond = quad_expectation(lambda z: np.maximum(w_loss(z), 0.0), quad_cfg, cuts) / prob
    h_prob = quad_expectation(lambda z: (h_loss(z) > 0).astype(float), quad_cfg, cuts)
    h_cond = quad_expectation(lambda z: np.maximum(h_loss(z), 0.0), quad_cfg, cuts) / h_prob
    return prob, w_cond, h_cond


def check_risks_vs_quadrature(
    params: MarketParams, contract: OptionContract, quad_cfg: QuadConfig
) -> CheckResult:
    upper = valid_hedge_upper_bound(params, contract)
    worst = 0.0
    tested = 0
    for x in (0.0, 0.25, 0.5, 0.75):
        if x > upper:
            continue
        try:
            report = eq.writer_risk(params, contract, x)
        except PricingError:
            continue
        prob_q, gw_q, gh_q = quadrature_risk(params, contract, x, report.fair_price, quad_cfg)
        worst = max(
            worst,
            rel_err(report.loss_prob, prob_q),
            rel_err(report.writer_risk, gw_q),
            rel_err(report.holder_risk, gh_q),
        )
        tested += 1
    return CheckResult(
        "risks_vs_quadrature",
        tested > 0 and worst <= 1e-8,
        f"max rel err {worst:.3e} over {tested} hedge fractions (tol 1e-08)",
    )


def check_mc_agreement(
    params: MarketParams,
    contract: OptionContract,
    numeric_cfg: NumericConfig,
    mc_cfg: McConfig,
) -> CheckResult:
    quote = eq.minimize_writer_risk(params, contract, numeric_cfg)
    report = quote.report
    sample = simulate_terminal(params, contract.expiry, mc_cfg)
    n = sample.size

    payoff = np.maximum(sample - contract.strike, 0.0)
    payoff_se = float(payoff.std(ddof=1) / math.sqrt(n))
    gaps = []
    gaps.append(
        (
            "expected_call",
            abs(expected_call_payoff_physical(params, contract) - float(payoff.mean())),
            3.5 * payoff_se,
        )
    )

    w_losses = eq.writer_loss(params, contract, quote.x_star, quote.price, sample)
    p_hat = float((w_losses > 0).mean())
    p_se = math.sqrt(p_hat * (1.0 - p_hat) / n)
    gaps.append(("loss_prob", abs(report.loss_prob - p_hat), 3.5 * p_se))

    w_est = mc_conditional_loss(w_losses)
    gaps.append(("writer_risk", abs(report.writer_risk - w_est.mean), 3.5 * w_est.std_error))

    h_est = mc_conditional_loss(eq.holder_loss(params, contract, quote.price, sample))
    gaps.append(("holder_risk", abs(report.holder_risk - h_est.mean), 3.5 * h_est.std_error))

    passed = all(gap <= band for _, gap, band in gaps)
    detail = "; ".join(f"{name} gap {gap:.2e} (band {band:.2e})" for name, gap, band in gaps)
    return CheckResult("mc_agreement", passed, f"{detail}; paths {n}")


def check_quote_grid_consistency(
    params: MarketParams, contract: OptionContract, numeric_cfg: NumericConfig
) -> CheckResult:
    quote = eq.minimize_writer_risk(params, contract, numeric_cfg)
    upper = valid_hedge_upper_bound(params, contract)
    best = quote.report.writer_risk
    worst_drop = 0.0
    for x in (quote.x_star - numeric_cfg.minimizer_grid, quote.x_star + numeric_cfg.minimizer_grid):
        if 0.0 <= x <= upper:
            worst_drop = max(
                worst_drop, best - eq.writer_risk(params, contract, x).writer_risk
            )
    return CheckResult(
        "quote_grid_consistency",
        worst_drop <= 1e-9,
        f"x_star {quote.x_star:.6f}; neighbor improvement {worst_drop:.3e} (tol 1e-09)",
    )


def run_all_checks(
    params: MarketParams,
    contract: OptionContract,
    numeric_cfg: NumericConfig | None = None,
    mc_cfg: McConfig | None = None,
    quad_cfg: QuadConfig | None = None,
    ordering_draws: int = 200,
    monotonicity_draws: int = 50,
    seed: int = 2024,
) -> list[CheckResult]:
    """Run the full oracle-equivalence and property suite."""
    numeric_cfg = numeric_cfg or NumericConfig()
    mc_cfg = mc_cfg or McConfig()
    quad_cfg = quad_cfg or QuadConfig()
    return [
        check_implied_vol_round_trip(params, contract, numeric_cfg),
        check_price_vs_quadrature(params, contract, quad_cfg),
        check_physical_parity(params, contract),
        check_fair_play_identity(params, contract),
        check_threshold_ordering(ordering_draws, seed),
        check_threshold_arg_monotonicity(monotonicity_draws, seed + 1),
        check_risks_vs_quadrature(params, contract, quad_cfg),
        check_mc_agreement(params, contract, numeric_cfg, mc_cfg),
        check_quote_grid_consistency(params, contract, numeric_cfg),
    ]
