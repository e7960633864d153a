"""Check outcome records and their JSON-lines / CSV encodings."""

import csv
import io
import json
import math
from dataclasses import dataclass, field

PASS = "pass"
FAIL = "fail"
INAPPLICABLE = "inapplicable"

EXACT_TOL = 1e-9
SIGMA = 4.0

CSV_COLUMNS = ("name", "paper_ref", "n", "lhs", "rhs", "stderr", "pass", "seed")


@dataclass
class CheckReport:
    """Outcome of one identity or inequality check.

    ``kind`` is ``"identity"`` (pass iff ``|lhs - rhs| <= allowance``) or
    ``"inequality"`` (pass iff ``lhs <= rhs + allowance``).  The allowance is
    ``EXACT_TOL * max(1, |lhs|, |rhs|)`` for ``margin_policy="exact_tol"``
    and ``SIGMA * stderr`` for ``"sigma_4"``.
    """

    name: str
    paper_ref: str
    n: int
    lhs: float
    rhs: float
    stderr: float = 0.0
    kind: str = "inequality"
    margin_policy: str = "exact_tol"
    seed: int = 0
    params: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    status: str = ""
    tol: float = EXACT_TOL

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        self.stderr = float(self.stderr)
        if not self.status:
            self.status = PASS if self._holds() else FAIL

    @property
    def allowance(self):
        if self.margin_policy == "sigma_4":
            return SIGMA * self.stderr
        return self.tol * max(1.0, abs(self.lhs), abs(self.rhs)) if self.margin_policy == "exact_tol" else self.tol

    def _holds(self):
        if not (math.isfinite(self.lhs) and math.isfinite(self.rhs)):
            return False
        if self.kind == "identity":
            return abs(self.lhs - self.rhs) <= self.allowance
        return self.lhs <= self.rhs + self.allowance

    @property
    def passed(self):
        return self.status == PASS

    @property
    def margin(self):
        return self.rhs - self.lhs

    def retolerance(self, tol):
        """Re-judge an exact-path report with relative tolerance ``tol``."""
        if self.margin_policy == "exact_tol" and self.status != INAPPLICABLE:
            self.tol = float(tol)
            self.status = PASS if self._holds() else FAIL
        return self

    @classmethod
    def inapplicable(cls, name, paper_ref, n, reason, seed=0, params=None):
        return cls(
            name, paper_ref, n, math.nan, math.nan, seed=seed, params=params or {},
            notes=[reason], status=INAPPLICABLE,
        )

    def to_dict(self):
        return {
            "name": self.name,
            "paper_ref": self.paper_ref,
            "n": self.n,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "stderr": _num(self.stderr),
            "kind": self.kind,
            "margin_policy": self.margin_policy,
            "pass": self.passed,
            "status": self.status,
            "seed": self.seed,
            "params": {k: _jsonable(v) for k, v in self.params.items()},
            "notes": list(self.notes),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _num(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


def _jsonable(v):
    if hasattr(v, "tolist"):
        v = v.tolist()
    if isinstance(v, float):
        return _num(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def to_jsonl(reports):
    return "".join(r.to_json() + "\n" for r in reports)


def to_csv(reports):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([r.name, r.paper_ref, r.n, repr(r.lhs), repr(r.rhs), repr(r.stderr), r.status, r.seed])
    return buf.getvalue()
