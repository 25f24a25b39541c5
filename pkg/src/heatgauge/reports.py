"""Inequality report rows and their serialization.

Every check in this package reduces to comparing a left-hand side against a
right-hand side, possibly with Monte Carlo error bars on either side.  The
report row records both sides, the margin ``rhs - lhs``, and a verdict:

``PASS-exact``
    both sides are deterministic (stderr 0) and the margin is nonnegative up
    to a relative tolerance of 1e-9;
``PASS``
    the margin is nonnegative up to three combined standard errors plus the
    tolerance;
``FAIL``
    the margin is below minus (three combined standard errors + tolerance);
``INCONCLUSIVE``
    the check could not resolve the claim (degenerate fit, no data); never
    used for a resolved margin.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, asdict

PASS = "PASS"
PASS_EXACT = "PASS-exact"
FAIL = "FAIL"
INCONCLUSIVE = "INCONCLUSIVE"

#: default absolute tolerance added on top of the 3-sigma band
DEFAULT_TOL = 1e-9


def combined_stderr(lhs_stderr: float, rhs_stderr: float) -> float:
    return math.hypot(lhs_stderr, rhs_stderr)


def resolve_verdict(lhs, rhs, lhs_stderr=0.0, rhs_stderr=0.0, tol=DEFAULT_TOL):
    """Apply the verdict policy to a computed pair of sides.

    Exact claims (both stderrs zero) are judged at relative tolerance
    ``tol`` scaled by max(1, |lhs|, |rhs|).  Statistical claims pass while
    the margin stays above -(3 * combined stderr + tol) and fail below it;
    there is no gap, so a resolved margin never yields INCONCLUSIVE.
    """
    margin = rhs - lhs
    if math.isnan(margin):
        return INCONCLUSIVE
    se = combined_stderr(lhs_stderr, rhs_stderr)
    if se == 0.0:
        scale = max(1.0, abs(lhs), abs(rhs))
        return PASS_EXACT if margin >= -tol * scale else FAIL
    return PASS if margin >= -(3.0 * se + tol) else FAIL


@dataclass
class InequalityReport:
    """One checked claim instance.

    ``claim`` is a stable descriptive identifier of the inequality being
    checked (e.g. ``"kernel-contraction"``), ``x`` an optional scalar grid
    coordinate for plotting, ``control`` marks deliberately perturbed claims
    that are expected to FAIL, and ``provenance`` carries the knobs needed
    to reproduce the row (seed, n, dt, scheme, method, chart).
    """

    claim: str
    lhs: float
    rhs: float
    verdict: str
    lhs_stderr: float = 0.0
    rhs_stderr: float = 0.0
    tol: float = DEFAULT_TOL
    suite: str = ""
    geometry: str = ""
    function: str = ""
    x: float | None = None
    control: bool = False
    witness: dict = field(default_factory=dict)
    provenance: dict = field(default_factory=dict)
    notes: str = ""

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs

    @classmethod
    def from_sides(cls, claim, lhs, rhs, lhs_stderr=0.0, rhs_stderr=0.0,
                   tol=DEFAULT_TOL, **kw):
        verdict = resolve_verdict(lhs, rhs, lhs_stderr, rhs_stderr, tol)
        return cls(claim=claim, lhs=float(lhs), rhs=float(rhs),
                   verdict=verdict, lhs_stderr=float(lhs_stderr),
                   rhs_stderr=float(rhs_stderr), tol=tol, **kw)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["margin"] = self.margin
        return d

    def ok(self) -> bool:
        """True when the row meets its expectation (controls must FAIL)."""
        if self.control:
            return self.verdict == FAIL
        return self.verdict in (PASS, PASS_EXACT)


CSV_COLUMNS = [
    "claim", "suite", "geometry", "function", "x", "lhs", "rhs",
    "lhs_stderr", "rhs_stderr", "margin", "verdict", "control", "notes",
]


def rows_to_json(rows, config=None) -> str:
    doc = {
        "schema": 1,
        "config": config if config is not None else {},
        "rows": [r.as_dict() for r in rows],
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        d = r.as_dict()
        w.writerow([d[c] for c in CSV_COLUMNS])
    return buf.getvalue()
