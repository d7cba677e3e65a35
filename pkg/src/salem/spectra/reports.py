"""Report models, value normalization and hashing helpers."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import mpmath
import numpy as np
import polars as pl

SIGNIFICANT_DIGITS = 15


def _stable_json(data: dict[str, Any]) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)


def compute_hash(data: dict[str, Any]) -> str:
    return hashlib.sha256(_stable_json(data).encode("utf-8")).hexdigest()


def normalize_value(value: Any) -> Any:
    """Map a value onto its serialized form: rationals as "p/q", reals to 15 digits."""
    if value is None or isinstance(value, (bool, str)):
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, (float, np.floating, mpmath.mpf)):
        real = float(value)
        if not math.isfinite(real):
            raise ValueError(f"cannot serialize non-finite value {real!r}")
        return float(f"{real:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, (list, tuple)):
        return [normalize_value(v) for v in value]
    if isinstance(value, dict):
        return {str(k): normalize_value(v) for k, v in value.items()}
    raise TypeError(f"unsupported report value {value!r}")


def _csv_cell(value: Any) -> str | None:
    if value is None:
        return None
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, list):
        return ",".join(str(v) for v in value)
    return str(value)


@dataclass(frozen=True)
class Report:
    """Tabular result of one subcommand plus the parameters that produced it."""

    kind: str
    columns: tuple[str, ...]
    rows: tuple[dict[str, Any], ...] = ()
    metadata: dict[str, Any] = field(default_factory=dict)
    config_hash: str | None = None

    def __post_init__(self) -> None:
        columns = tuple(self.columns)
        if not columns:
            raise ValueError("columns must be non-empty")
        if len(set(columns)) != len(columns):
            raise ValueError("columns must be unique")
        rows = []
        for row in self.rows:
            missing = [col for col in columns if col not in row]
            if missing:
                raise ValueError(f"row is missing columns {missing}")
            rows.append({col: normalize_value(row[col]) for col in columns})
        object.__setattr__(self, "columns", columns)
        object.__setattr__(self, "rows", tuple(rows))
        object.__setattr__(self, "metadata", normalize_value(dict(self.metadata)))

    def to_frame(self) -> pl.DataFrame:
        return pl.DataFrame(
            {col: [row[col] for row in self.rows] for col in self.columns},
            strict=False,
        )

    def to_csv(self) -> str:
        frame = pl.DataFrame(
            {col: [_csv_cell(row[col]) for row in self.rows] for col in self.columns},
            schema={col: pl.Utf8 for col in self.columns},
        )
        return frame.write_csv()

    def to_json(self) -> str:
        payload = {
            "kind": self.kind,
            "columns": list(self.columns),
            "rows": list(self.rows),
            "metadata": self.metadata,
            "config_hash": self.config_hash,
        }
        return json.dumps(payload, indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> Report:
        data = json.loads(text)
        return cls(
            kind=data["kind"],
            columns=tuple(data["columns"]),
            rows=tuple(data["rows"]),
            metadata=data.get("metadata", {}),
            config_hash=data.get("config_hash"),
        )

    def render(self, output_format: str) -> str:
        if output_format == "csv":
            return self.to_csv()
        if output_format == "json":
            return self.to_json()
        raise ValueError(f"unknown output format {output_format!r}")

    def write(self, path: str | Path | None, output_format: str) -> str:
        text = self.render(output_format)
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text


def count_row(
    inputs: dict[str, Any],
    count: int,
    main_term: float,
    *,
    term_column: str = "main_term",
) -> dict[str, Any]:
    """Row with the empirical count, the predicted term, their gap and their ratio."""
    return {
        **inputs,
        "count": count,
        term_column: main_term,
        "abs_error": abs(count - main_term),
        "ratio": count / main_term if main_term > 0 else None,
    }


@dataclass(frozen=True)
class CountReport(Report):
    """Empirical counts against a predicted main term over a parameter grid."""

    term_column: str = "main_term"

    def __post_init__(self) -> None:
        super().__post_init__()
        for col in ("count", self.term_column, "abs_error", "ratio"):
            if col not in self.columns:
                raise ValueError(f"count report requires column {col!r}")
        for row in self.rows:
            term = row[self.term_column]
            if term is not None and term > 0:
                if row["ratio"] is None or not math.isclose(
                    row["ratio"], row["count"] / term, rel_tol=1e-12
                ):
                    raise ValueError("ratio must equal count / main term")

    @classmethod
    def from_json(cls, text: str) -> CountReport:
        data = json.loads(text)
        return cls(
            kind=data["kind"],
            columns=tuple(data["columns"]),
            rows=tuple(data["rows"]),
            metadata=data.get("metadata", {}),
            config_hash=data.get("config_hash"),
            term_column=data.get("term_column", "main_term"),
        )

    def to_json(self) -> str:
        payload = json.loads(super().to_json())
        payload["term_column"] = self.term_column
        return json.dumps(payload, indent=2) + "\n"
