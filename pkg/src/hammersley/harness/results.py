"""Result containers and their serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

SCHEMA = 1
VARIANCE_SCAN_COLUMNS = ("N", "m", "n", "samples", "mean_G", "var_G", "var_stderr", "seed")


@dataclass
class Verdict:
    name: str
    kind: str  # "exact" or "statistical"
    passed: bool
    statistic: Optional[float] = None
    threshold: Optional[float] = None
    detail: str = ""
    samples: Optional[int] = None
    seed: Optional[int] = None
    attempts: list = field(default_factory=list)


@dataclass
class ExperimentResult:
    name: str
    config: dict
    rows: list
    verdicts: list
    summary: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    @property
    def exact_failed(self) -> bool:
        return any(v.kind == "exact" and not v.passed for v in self.verdicts)

    @property
    def statistical_failed(self) -> bool:
        return any(v.kind == "statistical" and not v.passed for v in self.verdicts)

    def verdict(self, name: str) -> Verdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)

    def exit_code(self) -> int:
        if self.exact_failed:
            return 2
        if self.statistical_failed:
            return 1
        return 0


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_plain(v) for v in x.tolist()]
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        f = float(x)
        return f if math.isfinite(f) else None
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def to_json(res: ExperimentResult) -> str:
    doc = {
        "schema": SCHEMA,
        "experiment": res.name,
        "config": res.config,
        "rows": res.rows,
        "verdicts": [asdict(v) for v in res.verdicts],
        "summary": res.summary,
        "metadata": res.metadata,
    }
    return json.dumps(_plain(doc), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _fmt(v) -> str:
    v = _plain(v)
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, dict)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def to_csv(res: ExperimentResult) -> str:
    buf = io.StringIO()
    if res.name == "variance-scan":
        cols = list(VARIANCE_SCAN_COLUMNS)
    else:
        cols = []
        for r in res.rows:
            cols.extend(k for k in r if k not in cols)
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(cols)
    for r in res.rows:
        wr.writerow([_fmt(r.get(c)) for c in cols])
    return buf.getvalue()


def write(res: ExperimentResult, path: str, fmt: str = "json") -> None:
    text = to_json(res) if fmt == "json" else to_csv(res)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
