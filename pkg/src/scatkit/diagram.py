"""Scattering-diagram data model, validation and JSON persistence.

A diagram is a network of vertices joined by internal lines, each carrying a
massive particle, plus external lines attached to vertices and oriented as
initial (incoming) or final (outgoing).  Internal line direction src -> dst is
the positive-energy flow direction; it is stored explicitly, never inferred.

External momenta are handled in the "mathematical" convention: k equals the
physical momentum for initial particles and its negative for final ones, so
that overall conservation reads sum(k) = 0.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

from .errors import DiagramFormatError, DisconnectedDiagramError
from .fourvector import FourVector, ZERO

DEFAULT_TOL_SHELL = 1e-9
DEFAULT_TOL_CONS = 1e-9

ORIENTATIONS = ("initial", "final")


@dataclass(frozen=True, slots=True)
class ParticleSpec:
    """A particle species: strictly positive rest mass plus a label."""

    mass: float
    label: str = ""

    def __post_init__(self):
        if not self.mass > 0.0:
            raise ValueError(f"non-positive mass: {self.mass!r}")


@dataclass(frozen=True, slots=True)
class InternalLine:
    src: Hashable
    dst: Hashable
    particle: ParticleSpec


@dataclass(frozen=True, slots=True)
class ExternalLine:
    vertex: Hashable
    particle: ParticleSpec
    orientation: str  # "initial" | "final"

    def __post_init__(self):
        if self.orientation not in ORIENTATIONS:
            raise ValueError(f"orientation must be one of {ORIENTATIONS}")


@dataclass(frozen=True)
class Diagram:
    """Topology of a scattering process.

    ``allow_low_degree`` marks source/sink test fixtures for which the usual
    degree >= 2 rule is waived; it is not part of the persisted document.
    """

    vertices: tuple
    internal: tuple
    external: tuple
    allow_low_degree: bool = field(default=False, compare=False)

    def __init__(self, vertices, internal=(), external=(), allow_low_degree=False):
        object.__setattr__(self, "vertices", tuple(vertices))
        object.__setattr__(self, "internal", tuple(internal))
        object.__setattr__(self, "external", tuple(external))
        object.__setattr__(self, "allow_low_degree", bool(allow_low_degree))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_internal(self) -> int:
        return len(self.internal)

    @property
    def n_external(self) -> int:
        return len(self.external)

    def external_masses(self) -> list[float]:
        return [line.particle.mass for line in self.external]

    def vertex_index(self) -> dict:
        return {v: i for i, v in enumerate(self.vertices)}


@dataclass(frozen=True)
class KConfiguration:
    """External mathematical momenta, ordered as the diagram's external list."""

    momenta: tuple

    def __init__(self, momenta: Sequence[FourVector]):
        object.__setattr__(self, "momenta", tuple(momenta))

    def __len__(self) -> int:
        return len(self.momenta)

    def __iter__(self):
        return iter(self.momenta)

    def __getitem__(self, i):
        return self.momenta[i]

    def total(self) -> FourVector:
        tot = ZERO
        for k in self.momenta:
            tot = tot + k
        return tot


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of diagram validation: empty violation list means valid."""

    violations: tuple
    n_vertices: int
    n_internal: int
    n_external: int
    loops: int | None  # None when the diagram is disconnected

    @property
    def valid(self) -> bool:
        return not self.violations


def _adjacency(d: Diagram) -> dict:
    adj = {v: set() for v in d.vertices}
    for line in d.internal:
        if line.src in adj and line.dst in adj:
            adj[line.src].add(line.dst)
            adj[line.dst].add(line.src)
    return adj


def _is_connected(d: Diagram) -> bool:
    if not d.vertices:
        return False
    adj = _adjacency(d)
    seen = {d.vertices[0]}
    stack = [d.vertices[0]]
    while stack:
        v = stack.pop()
        for w in adj[v]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(d.vertices)


def validate_diagram(d: Diagram) -> ValidationReport:
    """Check structural invariants, reporting every violation found.

    Returns the derived counts along with the violations; the loop count is
    reported only when the diagram is connected.
    """
    violations = []
    known = set(d.vertices)
    if len(known) != len(d.vertices):
        violations.append("duplicate vertex ids")
    if not d.vertices:
        violations.append("no vertices")

    degree = {v: 0 for v in d.vertices}
    for line in d.internal:
        for end in (line.src, line.dst):
            if end not in known:
                violations.append(f"internal line references unknown vertex {end!r}")
            else:
                degree[end] += 1
    for line in d.external:
        if line.vertex not in known:
            violations.append(f"external line references unknown vertex {line.vertex!r}")
        else:
            degree[line.vertex] += 1

    connected = _is_connected(d) if d.vertices else False
    if d.vertices and not connected:
        violations.append("disconnected")

    if not d.allow_low_degree:
        for v, deg in degree.items():
            if deg < 2:
                violations.append(f"vertex {v!r} has degree {deg} < 2")

    loops = d.n_internal - d.n_vertices + 1 if connected else None
    return ValidationReport(
        violations=tuple(violations),
        n_vertices=d.n_vertices,
        n_internal=d.n_internal,
        n_external=d.n_external,
        loops=loops,
    )


def loop_count(d: Diagram) -> int:
    """Number of independent internal cycles (first Betti number)."""
    if not _is_connected(d):
        raise DisconnectedDiagramError("loop count requires a connected diagram")
    return d.n_internal - d.n_vertices + 1


def kinematic_violations(
    d: Diagram,
    K: KConfiguration,
    tol_shell: float = DEFAULT_TOL_SHELL,
    tol_cons: float = DEFAULT_TOL_CONS,
) -> list[str]:
    """Check a momentum configuration against the diagram's external lines.

    Verifies per-line mass shells, the energy-sign convention (initial
    positive, final negative) and overall conservation sum(k) = 0.
    """
    out = []
    if len(K) != d.n_external:
        out.append(f"expected {d.n_external} momenta, got {len(K)}")
        return out
    for i, (k, line) in enumerate(zip(K, d.external)):
        m = line.particle.mass
        gap = abs(k.lorentz_square() - m * m)
        if gap > tol_shell:
            out.append(f"momentum {i} off shell by {gap:.3e}")
        if line.orientation == "initial" and k.t <= 0:
            out.append(f"momentum {i} is initial but has energy {k.t:.3e} <= 0")
        if line.orientation == "final" and k.t >= 0:
            out.append(f"momentum {i} is final but has energy {k.t:.3e} >= 0")
    total = K.total()
    if total.euclidean_norm() > tol_cons:
        out.append(f"conservation violated by {total.euclidean_norm():.3e}")
    return out


def conservation_residual(
    d: Diagram,
    K: KConfiguration,
    q: Mapping[int, FourVector],
) -> dict:
    """Per-vertex momentum balance for a given internal assignment.

    ``q`` maps internal line index -> four-momentum flowing along the stored
    src -> dst direction.  At each vertex the residual is the sum of incoming
    minus outgoing momenta: external lines contribute their mathematical
    momentum, internal lines +q at dst and -q at src.  All residuals vanish
    exactly when conservation holds.  The map is linear in (K, q).
    """
    if len(K) != d.n_external:
        raise ValueError(f"expected {d.n_external} momenta, got {len(K)}")
    for idx in range(d.n_internal):
        if idx not in q:
            raise ValueError(f"missing momentum for internal line {idx}")
    res = {v: ZERO for v in d.vertices}
    for k, line in zip(K, d.external):
        res[line.vertex] = res[line.vertex] + k
    for idx, line in enumerate(d.internal):
        res[line.src] = res[line.src] - q[idx]
        res[line.dst] = res[line.dst] + q[idx]
    return res


# ---------------------------------------------------------------------------
# Persistence.  Schema:
#   {"vertices": [id, ...],
#    "internal": [{"from": id, "to": id, "mass": r, "label": s}, ...],
#    "external": [{"vertex": id, "mass": r, "label": s,
#                  "orientation": "initial"|"final"}, ...]}
# K documents: {"momenta": [[t, x, y, z], ...]} ordered as the external list.
# ---------------------------------------------------------------------------

_INTERNAL_FIELDS = {"from", "to", "mass", "label"}
_EXTERNAL_FIELDS = {"vertex", "mass", "label", "orientation"}


def _parse_particle(obj: dict, where: str) -> ParticleSpec:
    if "mass" not in obj:
        raise DiagramFormatError(f"missing mass in {where}")
    mass = obj["mass"]
    if not isinstance(mass, (int, float)) or not mass > 0:
        raise DiagramFormatError(f"non-positive mass in {where}: {mass!r}")
    return ParticleSpec(mass=float(mass), label=str(obj.get("label", "")))


def diagram_to_dict(d: Diagram) -> dict:
    return {
        "vertices": list(d.vertices),
        "internal": [
            {"from": l.src, "to": l.dst, "mass": l.particle.mass, "label": l.particle.label}
            for l in d.internal
        ],
        "external": [
            {
                "vertex": l.vertex,
                "mass": l.particle.mass,
                "label": l.particle.label,
                "orientation": l.orientation,
            }
            for l in d.external
        ],
    }


def diagram_from_dict(doc: dict) -> Diagram:
    if not isinstance(doc, dict):
        raise DiagramFormatError("diagram document must be a JSON object")
    unknown = set(doc) - {"vertices", "internal", "external"}
    if unknown:
        raise DiagramFormatError(f"unknown field {sorted(unknown)[0]!r}")
    if "vertices" not in doc:
        raise DiagramFormatError("missing vertices")
    internal = []
    for i, obj in enumerate(doc.get("internal", [])):
        extra = set(obj) - _INTERNAL_FIELDS
        if extra:
            raise DiagramFormatError(f"unknown field {sorted(extra)[0]!r} in internal line {i}")
        for key in ("from", "to"):
            if key not in obj:
                raise DiagramFormatError(f"missing {key!r} in internal line {i}")
        internal.append(InternalLine(obj["from"], obj["to"], _parse_particle(obj, f"internal line {i}")))
    external = []
    for i, obj in enumerate(doc.get("external", [])):
        extra = set(obj) - _EXTERNAL_FIELDS
        if extra:
            raise DiagramFormatError(f"unknown field {sorted(extra)[0]!r} in external line {i}")
        if "vertex" not in obj:
            raise DiagramFormatError(f"missing vertex in external line {i}")
        orientation = obj.get("orientation")
        if orientation not in ORIENTATIONS:
            raise DiagramFormatError(f"bad orientation in external line {i}: {orientation!r}")
        external.append(
            ExternalLine(obj["vertex"], _parse_particle(obj, f"external line {i}"), orientation)
        )
    return Diagram(doc["vertices"], internal, external)


def save_diagram(d: Diagram) -> bytes:
    return json.dumps(diagram_to_dict(d), sort_keys=True, indent=1).encode("utf-8")


def load_diagram(raw: bytes | str) -> Diagram:
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DiagramFormatError(f"invalid JSON: {exc}") from exc
    return diagram_from_dict(doc)


def kconfig_to_dict(K: KConfiguration) -> dict:
    return {"momenta": [[k.t, k.x, k.y, k.z] for k in K]}


def kconfig_from_dict(doc: dict) -> KConfiguration:
    if not isinstance(doc, dict) or "momenta" not in doc:
        raise DiagramFormatError("momentum document must contain 'momenta'")
    momenta = []
    for i, row in enumerate(doc["momenta"]):
        if len(row) != 4:
            raise DiagramFormatError(f"momentum {i} must have 4 components")
        momenta.append(FourVector(*(float(c) for c in row)))
    return KConfiguration(momenta)


def save_kconfig(K: KConfiguration) -> bytes:
    return json.dumps(kconfig_to_dict(K), sort_keys=True, indent=1).encode("utf-8")


def load_kconfig(raw: bytes | str) -> KConfiguration:
    if isinstance(raw, bytes):
        raw = raw.decode("utf-8")
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise DiagramFormatError(f"invalid JSON: {exc}") from exc
    return kconfig_from_dict(doc)
