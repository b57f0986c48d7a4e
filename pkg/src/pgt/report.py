"""Verdict reports and the toolkit-wide tolerance convention."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

PASS, FAIL, INAPPLICABLE = "pass", "fail", "inapplicable"


def band(tol: float, u: float, v: float) -> float:
    """Allowed gap between ``u`` and ``v``: ``tol * (1 + max(|u|, |v|))``."""
    return tol * (1.0 + max(abs(u), abs(v)))


def close(u: float, v: float, tol: float) -> bool:
    return abs(u - v) <= band(tol, u, v)


def jsonable(obj: Any) -> Any:
    """Recursively convert tuples / numpy scalars / arrays into JSON-friendly values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


@dataclass
class TestReport:
    """Outcome of one criterion check.

    ``verdict`` is ``pass``, ``fail`` or ``inapplicable`` for criteria;
    ``detect_abnormal`` uses ``abnormal`` / ``not abnormal``.  A verdict
    over a sample instead of an exhaustive enumeration carries the
    ``(sampled)`` suffix in :attr:`label`.
    """

    __test__ = False

    verdict: str
    method: str
    residual_max: float = 0.0
    witness: Any = None
    samples_used: int = 0
    exhaustive: bool = False
    abstentions: int = 0
    notes: list[str] = field(default_factory=list)
    details: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    @property
    def label(self) -> str:
        if self.verdict in (INAPPLICABLE, "abnormal") or self.exhaustive:
            return self.verdict
        return f"{self.verdict} (sampled)"

    def to_dict(self) -> dict[str, Any]:
        return jsonable({
            "method": self.method,
            "verdict": self.label,
            "residual_max": float(self.residual_max),
            "witness": self.witness,
            "samples_used": int(self.samples_used),
            "exhaustive": bool(self.exhaustive),
            "abstentions": int(self.abstentions),
            "notes": list(self.notes),
            "details": self.details,
        })

    def __str__(self) -> str:
        lines = [f"{self.method}: {self.label}",
                 f"  residual_max  {self.residual_max:.6g}",
                 f"  samples_used  {self.samples_used}   exhaustive {self.exhaustive}"]
        if self.abstentions:
            lines.append(f"  abstentions   {self.abstentions}")
        if self.witness is not None:
            lines.append(f"  witness       {jsonable(self.witness)}")
        for k, v in self.details.items():
            lines.append(f"  {k:<13} {jsonable(v)}")
        lines.extend(f"  note: {n}" for n in self.notes)
        return "\n".join(lines)


def inapplicable(method: str, reason: str) -> TestReport:
    return TestReport(INAPPLICABLE, method, notes=[reason])


class Tracker:
    """Running max-residual / first-witness reduction used by every checker.

    Items are fed in lexicographic order, so keeping the first strict maximum
    gives the lexicographically first maximal-residual witness.
    """

    def __init__(self):
        self.residual = 0.0
        self.witness: Any = None
        self.fail_witness: Any = None
        self.fail_residual = -1.0
        self.count = 0
        self.abstentions = 0
        self.failed = False

    def see(self, residual: float, witness: Any, ok: bool) -> None:
        self.count += 1
        if self.witness is None or residual > self.residual:
            self.residual = max(self.residual, residual)
            self.witness = witness
        if not ok and residual > self.fail_residual:
            self.failed = True
            self.fail_residual = residual
            self.fail_witness = witness

    def report(self, method: str, exhaustive: bool, **kw: Any) -> TestReport:
        # witnesses may be passed lazily as zero-argument callables
        if callable(self.witness):
            self.witness = self.witness()
        if callable(self.fail_witness):
            self.fail_witness = self.fail_witness()
        if self.failed:
            # residual of the reported witness, so replaying it reproduces the number
            return TestReport(FAIL, method, self.fail_residual, self.fail_witness, self.count,
                              exhaustive, self.abstentions, **kw)
        return TestReport(PASS, method, self.residual, self.witness if self.count else None,
                          self.count, exhaustive, self.abstentions, **kw)
