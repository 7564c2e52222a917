"""Displacement geometry of realizations.

For a process with n external particles, a realization picks one point per
external line (here: the attachment vertex), giving a 4n-dimensional
displacement vector.  Translating the whole picture or sliding a point along
its line changes nothing physical; those moves span an (n+4)-dimensional
gauge subspace.  What remains after projecting the gauge away is the
direction in which the external configuration is displaced relative to the
all-through-one-point processes, and it is numerically normal to the
realizability surface through K.

Two inner products coexist on the 4n components: the gauge projection uses
the Euclidean one (positive definite, so orthogonal projection is
well-posed), while normality against surface tangents uses the slot-wise
Lorentz pairing, matching the phase that couples momenta to displacements.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, replace

import numpy as np

from .diagram import Diagram, KConfiguration
from .errors import GaugeRankError, NoRayError, UnsupportedSurfaceError
from .fourvector import FourVector
from .landau import Realization, SolverOptions, _solve_all, realize_spacetime

_AXES = [FourVector(1.0), FourVector(0.0, 1.0), FourVector(0.0, 0.0, 1.0), FourVector(0.0, 0.0, 0.0, 1.0)]

_LORENTZ_SIGNS = np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class DisplacementVector:
    """One four-vector per external line, each a point on that line."""

    components: tuple

    def __init__(self, components):
        object.__setattr__(self, "components", tuple(components))

    @property
    def n(self) -> int:
        return len(self.components)

    def flat(self) -> np.ndarray:
        return np.concatenate([u.as_array() for u in self.components])

    @staticmethod
    def from_flat(arr: np.ndarray) -> "DisplacementVector":
        arr = np.asarray(arr, dtype=float).reshape(-1, 4)
        return DisplacementVector([FourVector.from_array(row) for row in arr])


@dataclass(frozen=True)
class GaugeBasis:
    """Generators of the physically irrelevant moves: 4 rigid translations
    plus one slide along each external line."""

    generators: tuple

    def __init__(self, generators):
        object.__setattr__(self, "generators", tuple(generators))

    def matrix(self) -> np.ndarray:
        return np.array([g.flat() for g in self.generators])


@dataclass(frozen=True)
class ReducedU:
    """Gauge-free coordinates of a displacement vector.

    ``coords`` lives in the (3n-4)-dimensional orthogonal complement of the
    gauge span; ``ambient`` is the same vector expressed back in the 4n
    components.  ``fingerprint`` identifies the momentum configuration whose
    gauge basis was used.
    """

    coords: np.ndarray
    ambient: np.ndarray
    fingerprint: str

    def norm(self) -> float:
        return float(np.linalg.norm(self.coords))

    def unit(self) -> np.ndarray:
        n = self.norm()
        if n == 0:
            raise ValueError("zero reduced vector has no direction")
        return self.coords / n

    def to_dict(self) -> dict:
        return {"coords": [float(c) for c in self.coords], "basis": self.fingerprint}


def compute_U(r: Realization, d: Diagram, K: KConfiguration) -> DisplacementVector:
    """Displacement vector of a realization: for each external line, the
    position of the vertex it attaches to (a valid point on the line)."""
    return DisplacementVector([r.vertex_positions[line.vertex] for line in d.external])


def gauge_basis(K: KConfiguration) -> GaugeBasis:
    """Translation and line-slide generators at the given external momenta."""
    n = len(K)
    gens = [DisplacementVector([axis] * n) for axis in _AXES]
    zero = [FourVector(0.0)] * n
    for i, k in enumerate(K):
        comp = list(zero)
        comp[i] = k
        gens.append(DisplacementVector(comp))
    return GaugeBasis(gens)


def _complement_basis(basis: GaugeBasis) -> np.ndarray:
    """Orthonormal basis (rows) of the Euclidean orthogonal complement."""
    G = basis.matrix()
    n_gen, dim = G.shape
    u, s, vt = np.linalg.svd(G, full_matrices=True)
    tol = max(G.shape) * np.finfo(float).eps * (s[0] if s.size else 1.0)
    rank = int(np.sum(s > tol))
    if rank < n_gen:
        raise GaugeRankError(rank, n_gen)
    return vt[rank:]


def reduce_mod_gauge(U: DisplacementVector, basis: GaugeBasis) -> ReducedU:
    """Euclidean-orthogonal projection of U onto the complement of the gauge
    span, expressed in a deterministic orthonormal basis of that complement.

    Idempotent, kills every gauge generator, and leaves 3n-4 coordinates for
    n external lines.  Raises GaugeRankError for degenerate momenta.
    """
    comp = _complement_basis(basis)
    flat = U.flat()
    coords = comp @ flat
    ambient = comp.T @ coords
    K_fp = hashlib.sha256(basis.matrix().tobytes()).hexdigest()[:16]
    return ReducedU(coords=coords, ambient=ambient, fingerprint=K_fp)


def lorentz_pairing(u_flat: np.ndarray, t_flat: np.ndarray) -> float:
    """Slot-wise Lorentz pairing of two 4n-component vectors."""
    u = np.asarray(u_flat, dtype=float).reshape(-1, 4)
    t = np.asarray(t_flat, dtype=float).reshape(-1, 4)
    return float(np.sum(u * t * _LORENTZ_SIGNS))


def normality_check(U, K: KConfiguration, tangents) -> float:
    """Worst normalized Lorentz pairing of U against a family of tangents.

    ``U`` may be a DisplacementVector, ReducedU or flat array.  Values near
    zero certify normality of U to the surface the tangents sample; order-one
    values reject it.  Raises on an empty tangent list.
    """
    tangents = list(tangents)
    if not tangents:
        raise ValueError("empty tangent list")
    if isinstance(U, DisplacementVector):
        u = U.flat()
    elif isinstance(U, ReducedU):
        u = U.ambient
    else:
        u = np.asarray(U, dtype=float)
    un = np.linalg.norm(u)
    if un == 0:
        raise ValueError("zero displacement has no direction")
    worst = 0.0
    for t in tangents:
        t = np.asarray(t, dtype=float)
        tn = np.linalg.norm(t)
        if tn == 0:
            continue
        worst = max(worst, abs(lorentz_pairing(u, t)) / (un * tn))
    return worst


# ---------------------------------------------------------------------------
# Numerical tangents
# ---------------------------------------------------------------------------


def _constraint_jacobian(fn, K_flat: np.ndarray, h: float = 1e-7) -> np.ndarray:
    c0 = np.atleast_1d(fn(K_flat))
    J = np.empty((c0.size, K_flat.size))
    for j in range(K_flat.size):
        kp = K_flat.copy()
        kp[j] += h
        km = K_flat.copy()
        km[j] -= h
        J[:, j] = (np.atleast_1d(fn(kp)) - np.atleast_1d(fn(km))) / (2 * h)
    return J


def _project_to_constraints(fn, K_flat: np.ndarray, iters: int = 12) -> np.ndarray:
    x = K_flat.copy()
    for _ in range(iters):
        c = np.atleast_1d(fn(x))
        if np.linalg.norm(c) < 1e-13:
            break
        J = _constraint_jacobian(fn, x)
        step, *_ = np.linalg.lstsq(J, -c, rcond=None)
        x = x + step
    return x


def manifold_constraints(d: Diagram, K: KConfiguration):
    """Constraint function for the mass-shell + conservation manifold,
    acting on a flattened 4n vector."""
    masses = np.array(d.external_masses())

    def fn(flat):
        k = flat.reshape(-1, 4)
        shells = k[:, 0] ** 2 - np.sum(k[:, 1:] ** 2, axis=1) - masses**2
        cons = k.sum(axis=0)
        return np.concatenate([shells, cons])

    return fn


def finite_difference_tangents(
    constraint_fn,
    K: KConfiguration,
    count: int,
    seed: int,
    h: float = 1e-4,
) -> list[np.ndarray]:
    """Central-difference tangents of a constraint surface at K.

    Random ambient directions are projected onto the surface on both sides of
    K; the secant through the two projected points is second-order accurate,
    which keeps spurious normal components near h^2.
    """
    rng = np.random.default_rng(seed)
    flat = np.concatenate([k.as_array() for k in K])
    out = []
    for _ in range(count):
        w = rng.normal(size=flat.size)
        w /= np.linalg.norm(w)
        plus = _project_to_constraints(constraint_fn, flat + h * w)
        minus = _project_to_constraints(constraint_fn, flat - h * w)
        t = (plus - minus) / (2 * h)
        norm = np.linalg.norm(t)
        if norm > 1e-10:
            out.append(t / norm)
    return out


def tangents_from_samples(K_center: KConfiguration, samples) -> list[np.ndarray]:
    """Finite-difference tangents from nearby on-surface sample points."""
    base = np.concatenate([k.as_array() for k in K_center])
    out = []
    for s in samples:
        t = np.concatenate([k.as_array() for k in s]) - base
        n = np.linalg.norm(t)
        if n > 1e-12:
            out.append(t / n)
    return out


def cone_ray(d: Diagram, K: KConfiguration, opts: SolverOptions | None = None) -> ReducedU:
    """Gauge-free unit direction of the displacement at a singular point.

    Requires a realization with strictly positive scale factors; the opposite
    direction is not realizable (the interior particles would run backward in
    time), so the result is a ray rather than a line.  Raises NoRayError off
    the surface and UnsupportedSurfaceError when distinct feasible solutions
    disagree on the direction, which signals several surfaces through K.
    """
    opts = opts or SolverOptions()
    if d.n_internal == 0:
        raise NoRayError("stationary-vertex diagram generates no displacement ray")
    solutions, _, _ = _solve_all(d, K, opts, early_exit=False)
    basis = gauge_basis(K)
    directions = []
    for rnorm, q, alpha in solutions:
        if rnorm > opts.tol_feas:
            continue
        if np.min(alpha) <= opts.alpha_min:
            continue
        momenta = [FourVector.from_array(row) for row in q]
        positions = realize_spacetime(d, dict(enumerate(momenta)), dict(enumerate(alpha)))
        real = Realization(positions, tuple(momenta), tuple(float(a) for a in alpha))
        red = reduce_mod_gauge(compute_U(real, d, K), basis)
        if red.norm() < 1e-12:
            continue
        directions.append(red)
    if not directions:
        raise NoRayError("no realization with strictly positive scales")
    ref = directions[0].unit()
    for other in directions[1:]:
        cos = float(np.dot(ref, other.unit()))
        if cos < 1.0 - 1e-8:
            raise UnsupportedSurfaceError(
                f"feasible realizations disagree on the displacement direction (cos={cos:.6f})"
            )
    first = directions[0]
    scale = first.norm()
    return replace(first, coords=first.coords / scale, ambient=first.ambient / scale)
