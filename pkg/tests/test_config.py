from fractions import Fraction

import pytest

from salem.spectra.config import (
    BUDGET_ENV_VAR,
    DEFAULT_BUDGET,
    CensusQuery,
    RunConfig,
    as_rational,
    resolve_budget,
)


def test_as_rational_keeps_decimal_value() -> None:
    assert as_rational(1.2) == Fraction(6, 5)
    assert as_rational("3/2") == Fraction(3, 2)
    assert as_rational("2.5") == Fraction(5, 2)
    assert as_rational(4) == 4
    with pytest.raises(ValueError, match="rational"):
        as_rational("1/0")
    with pytest.raises(ValueError, match="rational"):
        as_rational("abc")


def test_census_query_defaults() -> None:
    query = CensusQuery(m=2, Q=10)
    assert query.Q == Fraction(10)
    assert query.D is None
    assert query.budget == DEFAULT_BUDGET
    assert query.summary()["Q"] == "10"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"m": 1, "Q": 2},
        {"m": 2, "Q": 0},
        {"m": 2, "Q": 2, "D": 4},
        {"m": 2, "Q": 2, "D": -3},
        {"m": 2, "Q": 2, "budget": 0},
        {"m": 2, "Q": 2, "precision": 0.0},
        {"m": 2, "Q": 2, "coefficient_bound_mode": "sharp"},
    ],
)
def test_census_query_invalid(kwargs: dict[str, object]) -> None:
    with pytest.raises(ValueError):
        CensusQuery(**kwargs)


def test_run_config_validation() -> None:
    config = RunConfig(subcommand="census", workers=2)
    assert "workers" not in config.summary()
    with pytest.raises(ValueError, match="subcommand"):
        RunConfig(subcommand="plot")
    with pytest.raises(ValueError, match="format"):
        RunConfig(subcommand="census", output_format="xml")
    with pytest.raises(ValueError, match="worker"):
        RunConfig(subcommand="census", workers=0)
    with pytest.raises(ValueError, match="precision"):
        RunConfig(subcommand="census", precision=1e-20)


def test_resolve_budget(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(BUDGET_ENV_VAR, raising=False)
    assert resolve_budget() == DEFAULT_BUDGET
    assert resolve_budget(500) == 500
    monkeypatch.setenv(BUDGET_ENV_VAR, "2500")
    assert resolve_budget() == 2500
    assert resolve_budget(7) == 7
    monkeypatch.setenv(BUDGET_ENV_VAR, "many")
    with pytest.raises(ValueError, match=BUDGET_ENV_VAR):
        resolve_budget()
    with pytest.raises(ValueError, match="positive"):
        resolve_budget(0)
