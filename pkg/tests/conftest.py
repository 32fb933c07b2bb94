import pytest

from fairhedge import MarketParams, OptionContract

# Reference scenario used throughout: S0=100, mu=10%, sigma=20%, r=5%, K=100, T=1.


@pytest.fixture
def ref_params() -> MarketParams:
    return MarketParams(spot=100.0, drift=0.10, volatility=0.20, risk_free=0.05)


@pytest.fixture
def ref_contract() -> OptionContract:
    return OptionContract(strike=100.0, expiry=1.0)
