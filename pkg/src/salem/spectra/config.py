"""Run contracts: census queries, CLI run configuration and the candidate budget."""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction

from salem.spectra.polynomials import DEFAULT_PRECISION, check_squarefree_D

DEFAULT_BUDGET = 10**8
BUDGET_ENV_VAR = "SALEM_BUDGET"
MIN_PRECISION = 1e-15
MAX_PRECISION = 1e-6
OUTPUT_FORMATS = ("csv", "json")
SUBCOMMANDS = (
    "classify",
    "count-triples",
    "gen-triples",
    "lattice",
    "census",
    "constants",
    "spectrum",
    "integralize",
    "compat",
)


def as_rational(value: int | float | str | Fraction) -> Fraction:
    """Exact rational from user input; decimal strings and floats keep their decimal value."""
    if isinstance(value, float):
        value = repr(value)
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {value!r}") from exc


def resolve_budget(explicit: int | None = None) -> int:
    """Candidate cap: explicit value, else $SALEM_BUDGET, else the default."""
    if explicit is not None:
        value = int(explicit)
    else:
        raw = os.environ.get(BUDGET_ENV_VAR, "").strip()
        try:
            value = int(raw) if raw else DEFAULT_BUDGET
        except ValueError as exc:
            raise ValueError(f"{BUDGET_ENV_VAR} must be an integer, got {raw!r}") from exc
    if value <= 0:
        raise ValueError("budget must be positive")
    return value


@dataclass(frozen=True)
class CensusQuery:
    """Which family to enumerate: S_m(Q) when D is absent, F_{m,D}(Q) otherwise."""

    m: int
    Q: Fraction
    D: int | None = None
    budget: int = DEFAULT_BUDGET
    precision: float = DEFAULT_PRECISION
    include_reducible: bool = False
    coefficient_bound_mode: str = "binomial"

    def __post_init__(self) -> None:
        object.__setattr__(self, "Q", as_rational(self.Q))
        if self.m < 2:
            raise ValueError("m must be at least 2")
        if self.Q <= 0:
            raise ValueError("Q must be positive")
        if self.D is not None:
            check_squarefree_D(self.D)
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.precision <= 0:
            raise ValueError("precision must be positive")
        if self.coefficient_bound_mode != "binomial":
            raise ValueError("only the binomial coefficient bound is supported")

    def summary(self) -> dict[str, object]:
        return {
            "m": self.m,
            "Q": str(self.Q),
            "D": self.D,
            "budget": self.budget,
            "precision": self.precision,
            "include_reducible": self.include_reducible,
            "coefficient_bound_mode": self.coefficient_bound_mode,
        }


@dataclass(frozen=True)
class RunConfig:
    """Command-line run settings shared by every subcommand."""

    subcommand: str
    output: str | None = None
    output_format: str = "csv"
    workers: int = 1
    precision: float = DEFAULT_PRECISION
    budget: int = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"unknown subcommand {self.subcommand!r}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ValueError(f"format must be one of {OUTPUT_FORMATS}")
        if self.workers < 1:
            raise ValueError("worker count must be at least 1")
        if not MIN_PRECISION <= self.precision <= MAX_PRECISION:
            raise ValueError(f"precision must lie in [{MIN_PRECISION}, {MAX_PRECISION}]")
        if self.budget <= 0:
            raise ValueError("budget must be positive")

    def summary(self) -> dict[str, object]:
        return {
            "subcommand": self.subcommand,
            "output_format": self.output_format,
            "precision": self.precision,
            "budget": self.budget,
        }
