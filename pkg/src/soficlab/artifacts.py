"""Deterministic CSV/JSON artifact writing (stable order, atomic replace)."""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

CSV_COLUMNS = ["experiment_id", "n", "probe", "r", "count", "denominator",
               "overflow", "bound_side"]


@dataclass
class CsvRow:
    experiment_id: str
    n: int
    probe: str
    r: int
    count: int
    denominator: int
    overflow: int = 0
    bound_side: str = ""

    def as_line(self) -> str:
        return ",".join(
            str(x) for x in [self.experiment_id, self.n, self.probe, self.r,
                             self.count, self.denominator, self.overflow,
                             self.bound_side]
        )


@dataclass
class Assertion:
    name: str
    passed: bool
    measured: str
    bound: str

    def as_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed,
                "measured": self.measured, "bound": self.bound}


@dataclass
class ExperimentResult:
    experiment_id: str
    rows: list = field(default_factory=list)
    assertions: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def add_row(self, **kw) -> None:
        self.rows.append(CsvRow(experiment_id=self.experiment_id, **kw))

    def assert_that(self, name: str, passed: bool, measured, bound) -> None:
        self.assertions.append(Assertion(name, bool(passed), str(measured), str(bound)))


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_csv(rows: list, path: str) -> None:
    lines = [",".join(CSV_COLUMNS)]
    lines.extend(r.as_line() for r in rows)
    _atomic_write(path, "\n".join(lines) + "\n")


def read_csv(path: str) -> list:
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].split(",") != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header in {path}")
    out = []
    for line in lines[1:]:
        parts = line.split(",")
        out.append(CsvRow(parts[0], int(parts[1]), parts[2], int(parts[3]),
                          int(parts[4]), int(parts[5]), int(parts[6]), parts[7]))
    return out


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "tolist"):
        return x.tolist()
    return x


def write_json(result: ExperimentResult, path: str, config_snapshot: Optional[dict] = None,
               stamp: bool = True) -> None:
    doc = {
        "experiment_id": result.experiment_id,
        "passed": result.passed,
        "assertions": [a.as_dict() for a in result.assertions],
        "summary": _jsonable(result.summary),
    }
    if config_snapshot is not None:
        doc["config"] = _jsonable(config_snapshot)
    if stamp:
        doc["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime())
    _atomic_write(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")
