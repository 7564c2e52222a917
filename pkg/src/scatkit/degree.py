"""Degree of a physical-region singularity and its local models.

The degree counts, in amplitude scale powers, how singular the scattering
function is where a diagram becomes classically realizable: each internal
line spreads its probability over a growing volume (a factor 3/2 in
amplitude per line), each vertex beyond the first fixes four conservation
constraints, and the constant is pinned by the single-internal-line case.
Degrees -1, 0 and 1/2 correspond to pole, logarithmic and square-root local
behavior; anything else is reported as a generic power.  Local evaluators
approach the real axis from the upper half plane (plus-i-epsilon rule).
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass
from fractions import Fraction

from .diagram import Diagram, loop_count, validate_diagram

DEFAULT_EPSILON = 1e-6


@dataclass(frozen=True)
class SingularityDegree:
    d: Fraction
    n_lines: int
    n_vertices: int

    def __post_init__(self):
        # the two bookkeeping forms must agree identically
        assert 2 * self.d == 3 * self.n_lines - 4 * (self.n_vertices - 1) - 1


def degree(n_lines: int, n_vertices: int) -> SingularityDegree:
    """Exact rational degree for a diagram with the given counts."""
    if n_lines < 0 or n_vertices < 1:
        raise ValueError("need n_lines >= 0 and n_vertices >= 1")
    d = Fraction(3 * n_lines - 4 * n_vertices + 3, 2)
    return SingularityDegree(d=d, n_lines=n_lines, n_vertices=n_vertices)


@dataclass(frozen=True)
class LocalModel:
    """Local singular behavior in the variable E (distance to the surface in
    the invariant, e.g. E = p^2 - m^2 for an intermediate pole)."""

    kind: str  # "pole" | "log" | "sqrt" | "power"
    d: Fraction
    epsilon_rule: str = "plus_i_epsilon"

    def evaluate(self, E: float, eps: float = DEFAULT_EPSILON) -> complex:
        z = E + 1j * eps
        if self.kind == "pole":
            return 1j / z
        if self.kind == "log":
            return cmath.log(z)
        if self.kind == "sqrt":
            return cmath.sqrt(z)
        return z ** complex(self.d)


def local_model(deg: SingularityDegree) -> LocalModel:
    if deg.d == -1:
        return LocalModel("pole", deg.d)
    if deg.d == 0:
        return LocalModel("log", deg.d)
    if deg.d == Fraction(1, 2):
        return LocalModel("sqrt", deg.d)
    return LocalModel("power", deg.d)


@dataclass(frozen=True)
class AccountingReport:
    """Itemized classical bookkeeping whose rows total the degree."""

    rows: tuple  # (label, Fraction) pairs
    total: Fraction
    n_lines: int
    n_vertices: int

    def to_dict(self) -> dict:
        return {
            "rows": [{"item": label, "value": str(value)} for label, value in self.rows],
            "total": str(self.total),
            "n_lines": self.n_lines,
            "n_vertices": self.n_vertices,
        }


def degree_accounting(d: Diagram) -> AccountingReport:
    """Ledger of the degree: geometric spreading per internal line (+3/2
    each in amplitude), conservation constraints at every vertex beyond the
    first (-2 each), and the constant -1/2 fixed by the pole case."""
    report = validate_diagram(d)
    if not report.valid:
        raise ValueError("invalid diagram: " + "; ".join(report.violations))
    n_l = d.n_internal
    n_v = d.n_vertices
    rows = (
        ("internal-line spreading", Fraction(3 * n_l, 2)),
        ("vertex conservation constraints", Fraction(-2 * (n_v - 1), 1)),
        ("pole-case constant", Fraction(-1, 2)),
    )
    total = sum((v for _, v in rows), Fraction(0))
    assert total == degree(n_l, n_v).d
    # loop_count is cheap and confirms the counts refer to a connected graph
    loop_count(d)
    return AccountingReport(rows=rows, total=total, n_lines=n_l, n_vertices=n_v)
