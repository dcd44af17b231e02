"""Result containers shared by the quadrature and Monte Carlo estimators."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

PASS = "PASS"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"
DIVERGENT = "DIVERGENT"
FINITE = "FINITE"


@dataclass
class EstimateReport:
    """A numeric result with provenance.

    `estimate` is the point estimate, `se` its standard error (0.0 for
    deterministic quadrature results), `n` the replicate count, `seed` the
    RNG seed (None for pure quadrature), `reference` an independent
    quadrature/closed-form value when one exists, and `verdict` one of
    PASS / FAIL / INCONCLUSIVE / DIVERGENT / FINITE.  Extra diagnostics go
    into `details`.
    """

    name: str
    estimate: float
    se: float = 0.0
    n: int = 0
    seed: int | None = None
    reference: float | None = None
    verdict: str = PASS
    details: dict = field(default_factory=dict)

    def within_3se(self) -> bool:
        if self.reference is None:
            return False
        return abs(self.estimate - self.reference) <= 3.0 * self.se

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "estimate": self.estimate,
            "se": self.se,
            "n": self.n,
            "seed": self.seed,
            "reference": self.reference,
            "verdict": self.verdict,
            "details": _jsonable(self.details),
        }


def _jsonable(obj):
    """Recursively convert numpy scalars/arrays so json.dumps accepts them."""
    import numpy as np

    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dump_json(obj, path: str | Path) -> None:
    """Write deterministic JSON (sorted keys, fixed separators)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


def dump_csv(path: str | Path, header: list[str], rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])
