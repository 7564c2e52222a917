"""Classical realizability of scattering diagrams.

A diagram together with external momenta K admits a classical space-time
realization when every internal line can carry an on-shell positive-energy
momentum, momentum is conserved at each vertex, and each vertex separation is
a nonnegative multiple of the momentum flowing along the connecting line.
Feasibility is decided by multi-start nonlinear least squares over the
internal momenta and squared-slack scale factors; per-cycle closure encodes
the vertex-separation constraint without introducing positions.

A numerical solver cannot certify global infeasibility, so "inconclusive"
(no start converged) is a first-class outcome distinct from "infeasible".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import least_squares

from .diagram import (
    DEFAULT_TOL_CONS,
    DEFAULT_TOL_SHELL,
    Diagram,
    KConfiguration,
    kinematic_violations,
)
from .errors import BackwardInTimeError, ClosureError, DisconnectedDiagramError
from .fourvector import FourVector, ZERO
from .kinematics import pole_surface_config

DEFAULT_TOL_REAL = 1e-8


@dataclass(frozen=True)
class SolverOptions:
    """Flat solver configuration; every field is overridable per call."""

    max_iters: int = 400
    starts: int = 16
    tol_feas: float = 1e-8
    alpha_min: float = 1e-10
    seed: int = 0

    def to_dict(self) -> dict:
        return {
            "max_iters": self.max_iters,
            "starts": self.starts,
            "tol_feas": self.tol_feas,
            "alpha_min": self.alpha_min,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Realization:
    """A space-time embedding: vertex positions, on-shell internal momenta and
    nonnegative scale factors, with each vertex separation parallel to the
    momentum of the joining line."""

    vertex_positions: dict
    internal_momenta: tuple
    alphas: tuple

    def violations(
        self,
        d: Diagram,
        K: KConfiguration,
        tol_real: float = DEFAULT_TOL_REAL,
        tol_shell: float = DEFAULT_TOL_SHELL,
        tol_cons: float = DEFAULT_TOL_CONS,
    ) -> list[str]:
        out = []
        for idx, line in enumerate(d.internal):
            q = self.internal_momenta[idx]
            a = self.alphas[idx]
            if a < 0:
                out.append(f"line {idx} has negative scale {a}")
            gap = abs(q.lorentz_square() - line.particle.mass**2)
            if gap > tol_shell:
                out.append(f"line {idx} off shell by {gap:.3e}")
            if q.t <= 0:
                out.append(f"line {idx} has non-positive energy {q.t:.3e}")
            sep = self.vertex_positions[line.dst] - self.vertex_positions[line.src]
            miss = (sep - a * q).euclidean_norm()
            if miss > tol_real * max(1.0, abs(a) * q.euclidean_norm()):
                out.append(f"line {idx} separation not parallel to momentum ({miss:.3e})")
        from .diagram import conservation_residual

        res = conservation_residual(d, K, dict(enumerate(self.internal_momenta)))
        for v, r in res.items():
            if r.euclidean_norm() > tol_cons:
                out.append(f"conservation at vertex {v!r} violated by {r.euclidean_norm():.3e}")
        return out


@dataclass(frozen=True)
class FeasibilityResult:
    """Decision for one (diagram, K) pair.

    ``status`` is one of "feasible", "infeasible", "inconclusive".
    ``degenerate`` marks feasible points whose realization needs at least one
    contracted line (scale factor below alpha_min); those correspond to the
    diagram shrunk onto fewer vertices and are reported as feasible.
    """

    feasible: bool
    residual: float
    realization: Realization | None
    iterations: int
    status: str
    degenerate: bool = False

    def to_dict(self) -> dict:
        out = {
            "feasible": self.feasible,
            "residual": self.residual,
            "iterations": self.iterations,
            "status": self.status,
            "degenerate": self.degenerate,
        }
        if self.realization is not None:
            out["alphas"] = list(self.realization.alphas)
            out["internal_momenta"] = [
                [q.t, q.x, q.y, q.z] for q in self.realization.internal_momenta
            ]
            out["vertex_positions"] = {
                str(v): [p.t, p.x, p.y, p.z] for v, p in self.realization.vertex_positions.items()
            }
        return out


@dataclass(frozen=True)
class Classification:
    """Catalog verdict at one K: "trivial", "singular" or "unknown"."""

    verdict: str
    singular: tuple
    unknown: tuple
    results: tuple


@dataclass(frozen=True)
class SurfaceSamples:
    """Surface sampling output; ``budget_exhausted`` flags an empty or short
    return caused by running out of attempts."""

    configs: tuple
    budget_exhausted: bool = False

    def __iter__(self):
        return iter(self.configs)

    def __len__(self):
        return len(self.configs)

    def __getitem__(self, i):
        return self.configs[i]


# ---------------------------------------------------------------------------
# Residual construction
# ---------------------------------------------------------------------------


def _spanning_tree(d: Diagram) -> tuple[dict, list[int]]:
    """BFS spanning tree over internal lines.

    Returns (parent edge per vertex as {vertex: (line_idx, +1/-1)}, chords).
    Sign +1 means the tree edge is traversed src -> dst walking away from the
    anchor vertex.
    """
    adj: dict = {v: [] for v in d.vertices}
    for idx, line in enumerate(d.internal):
        adj[line.src].append((line.dst, idx, +1))
        adj[line.dst].append((line.src, idx, -1))
    anchor = d.vertices[0]
    parent = {anchor: None}
    order = [anchor]
    tree_lines = set()
    i = 0
    while i < len(order):
        v = order[i]
        i += 1
        for w, idx, sgn in adj[v]:
            if w not in parent:
                parent[w] = (idx, sgn, v)
                tree_lines.add(idx)
                order.append(w)
    if len(parent) != d.n_vertices:
        raise DisconnectedDiagramError("diagram is not connected")
    chords = [i for i in range(d.n_internal) if i not in tree_lines]
    return parent, chords


def _cycle_basis(d: Diagram) -> list[list[tuple[int, int]]]:
    """Independent cycles as lists of (line_idx, sign); one per chord."""
    parent, chords = _spanning_tree(d)

    def path_to_anchor(v):
        steps = []
        while parent[v] is not None:
            idx, sgn, up = parent[v]
            steps.append((idx, sgn))
            v = up
        return steps

    cycles = []
    for c in chords:
        line = d.internal[c]
        up_src = path_to_anchor(line.src)  # src -> anchor
        up_dst = path_to_anchor(line.dst)  # dst -> anchor
        # cycle: walk chord src -> dst, then dst -> anchor -> src through the
        # tree; stored signs are for walking away from the anchor, so the
        # descent leg flips them and the ascent leg keeps them
        steps = [(c, +1)]
        steps += [(idx, -sgn) for idx, sgn in up_dst]
        steps += [(idx, sgn) for idx, sgn in reversed(up_src)]
        # cancel shared tail through the anchor
        counts: dict = {}
        for idx, sgn in steps:
            counts[idx] = counts.get(idx, 0) + sgn
        cycles.append([(idx, sgn) for idx, sgn in sorted(counts.items()) if sgn != 0])
    return cycles


class _Problem:
    """Packing of unknowns (4 momentum components + 1 slack per line) and the
    residual vector {mass shells, energy hinges, vertex conservation, cycle
    closure, scale normalization}."""

    def __init__(self, d: Diagram, K: KConfiguration):
        self.d = d
        self.K = K
        self.n_lines = d.n_internal
        self.cycles = _cycle_basis(d)
        self.masses = np.array([l.particle.mass for l in d.internal])
        self.k_ext = np.array([k.as_array() for k in K]) if len(K) else np.zeros((0, 4))
        vidx = d.vertex_index()
        self.ext_vertex = np.array([vidx[l.vertex] for l in d.external], dtype=int)
        self.src = np.array([vidx[l.src] for l in d.internal], dtype=int)
        self.dst = np.array([vidx[l.dst] for l in d.internal], dtype=int)

    def unpack(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        q = x[: 4 * self.n_lines].reshape(self.n_lines, 4)
        s = x[4 * self.n_lines :]
        return q, s * s

    def residuals(self, x: np.ndarray) -> np.ndarray:
        q, alpha = self.unpack(x)
        out = []
        # mass shells and forward-energy hinges
        if self.n_lines:
            lor = q[:, 0] ** 2 - np.sum(q[:, 1:] ** 2, axis=1)
            out.append(lor - self.masses**2)
            out.append(np.minimum(q[:, 0], 0.0))
        # conservation at every vertex
        cons = np.zeros((self.d.n_vertices, 4))
        np.add.at(cons, self.ext_vertex, self.k_ext)
        if self.n_lines:
            np.add.at(cons, self.dst, q)
            np.subtract.at(cons, self.src, q)
        out.append(cons.ravel())
        # closure of independent cycles
        for cycle in self.cycles:
            acc = np.zeros(4)
            for idx, sgn in cycle:
                acc += sgn * alpha[idx] * q[idx]
            out.append(acc)
        # pin the free overall scale of the alphas
        if self.n_lines:
            out.append(np.array([alpha.sum() - 1.0]))
        return np.concatenate(out) if out else np.zeros(0)

    def start(self, rng: np.random.Generator) -> np.ndarray:
        scale = float(np.mean([abs(k.t) for k in self.K])) if len(self.K) else 1.0
        q0 = np.zeros((self.n_lines, 4))
        q0[:, 1:] = rng.normal(scale=0.5 * scale, size=(self.n_lines, 3))
        q0[:, 0] = np.sqrt(self.masses**2 + np.sum(q0[:, 1:] ** 2, axis=1))
        s0 = rng.uniform(0.7, 1.2, size=self.n_lines)
        if self.n_lines:
            s0 /= math.sqrt(float(np.sum(s0 * s0)))  # alphas start summing to 1
        return np.concatenate([q0.ravel(), s0])


def _stationary_vertex_result(d: Diagram, K: KConfiguration, opts: SolverOptions) -> FeasibilityResult:
    # no internal lines: the only constraint is K's own conservation
    resid = K.total().euclidean_norm()
    feasible = resid <= opts.tol_feas
    realization = None
    if feasible:
        realization = Realization(
            vertex_positions={v: ZERO for v in d.vertices},
            internal_momenta=(),
            alphas=(),
        )
    return FeasibilityResult(
        feasible=feasible,
        residual=resid,
        realization=realization,
        iterations=0,
        status="feasible" if feasible else "infeasible",
    )


def _solve_all(
    d: Diagram,
    K: KConfiguration,
    opts: SolverOptions,
    early_exit: bool = True,
) -> tuple[list, int, bool]:
    """Run every start; returns (solutions, total_nfev, any_converged).

    Each solution is (residual_norm, q array, alpha array).
    """
    prob = _Problem(d, K)
    n_unknowns = 5 * prob.n_lines
    seeds = np.random.SeedSequence(opts.seed).spawn(opts.starts)
    solutions = []
    total_nfev = 0
    any_converged = False
    for ss in seeds:
        rng = np.random.default_rng(ss)
        x0 = prob.start(rng)
        res = least_squares(
            prob.residuals,
            x0,
            method="lm" if prob.residuals(x0).size >= n_unknowns else "trf",
            xtol=1e-15,
            ftol=1e-15,
            gtol=1e-15,
            max_nfev=opts.max_iters * max(1, n_unknowns),
        )
        total_nfev += res.nfev
        if res.status > 0:
            any_converged = True
        q, alpha = prob.unpack(res.x)
        rnorm = float(np.linalg.norm(prob.residuals(res.x)))
        solutions.append((rnorm, q, alpha))
        if early_exit and rnorm <= opts.tol_feas * 1e-2:
            break
    solutions.sort(key=lambda t: t[0])
    return solutions, total_nfev, any_converged


def solve_landau(
    d: Diagram,
    K: KConfiguration,
    opts: SolverOptions | None = None,
) -> FeasibilityResult:
    """Decide whether (d, K) admits a classical realization.

    Feasible means the best residual over all starts is at most tol_feas;
    when every line scale also clears alpha_min the embedding is attached via
    ``realize_spacetime``.  Scales below alpha_min mark a degenerate
    (contracted) realization, still reported feasible.
    """
    opts = opts or SolverOptions()
    bad = kinematic_violations(d, K)
    if bad:
        raise ValueError("invalid momentum configuration: " + "; ".join(bad))
    if d.n_internal == 0:
        return _stationary_vertex_result(d, K, opts)

    solutions, total_nfev, any_converged = _solve_all(d, K, opts)
    rnorm, q, alpha = solutions[0]

    if rnorm <= opts.tol_feas:
        momenta = tuple(FourVector.from_array(row) for row in q)
        degenerate = bool(np.min(alpha) < opts.alpha_min)
        positions = realize_spacetime(d, dict(enumerate(momenta)), dict(enumerate(alpha)))
        realization = Realization(positions, momenta, tuple(float(a) for a in alpha))
        return FeasibilityResult(
            feasible=True,
            residual=rnorm,
            realization=realization,
            iterations=total_nfev,
            status="feasible",
            degenerate=degenerate,
        )
    status = "infeasible" if any_converged else "inconclusive"
    return FeasibilityResult(
        feasible=False,
        residual=rnorm,
        realization=None,
        iterations=total_nfev,
        status=status,
    )


def realize_spacetime(d: Diagram, q: dict, alphas: dict) -> dict:
    """Assign vertex positions from (momentum, scale) pairs.

    Walks a spanning tree from an anchor at the origin setting each step to
    scale * momentum, then checks that every non-tree line closes.  Negative
    scales are rejected: the interior particle would move backward in time.
    """
    for idx in range(d.n_internal):
        if idx not in q or idx not in alphas:
            raise ValueError(f"missing assignment for internal line {idx}")
        if alphas[idx] < 0:
            raise BackwardInTimeError(f"line {idx} has negative scale {alphas[idx]}")
    parent, chords = _spanning_tree(d)
    positions = {d.vertices[0]: ZERO}
    # parent map is in BFS order, so a single pass fills every vertex
    for v in d.vertices:
        if v in positions:
            continue
        chain = []
        w = v
        while w not in positions:
            chain.append(w)
            idx, sgn, up = parent[w]
            w = up
        for node in reversed(chain):
            idx, sgn, up = parent[node]
            step = alphas[idx] * q[idx]
            positions[node] = positions[up] + (step if sgn > 0 else -step)
    scale = max(1.0, max((abs(alphas[i]) * q[i].euclidean_norm() for i in range(d.n_internal)), default=1.0))
    for c in chords:
        line = d.internal[c]
        gap = (positions[line.dst] - positions[line.src] - alphas[c] * q[c]).euclidean_norm()
        if gap > DEFAULT_TOL_REAL * scale:
            raise ClosureError(f"line {c} fails to close by {gap:.3e}")
    return positions


# ---------------------------------------------------------------------------
# Surface sampling
# ---------------------------------------------------------------------------


def _pole_shape(d: Diagram):
    """Recognize the single-internal-line fusion fixture; returns the index
    permutation and masses or None."""
    if d.n_internal != 1 or d.n_vertices != 2 or d.n_external != 4:
        return None
    line = d.internal[0]
    at_src = [i for i, l in enumerate(d.external) if l.vertex == line.src]
    at_dst = [i for i, l in enumerate(d.external) if l.vertex == line.dst]
    if len(at_src) != 2 or len(at_dst) != 2:
        return None
    if not all(d.external[i].orientation == "initial" for i in at_src):
        return None
    dst_init = [i for i in at_dst if d.external[i].orientation == "initial"]
    dst_fin = [i for i in at_dst if d.external[i].orientation == "final"]
    if len(dst_init) != 1 or len(dst_fin) != 1:
        return None
    m_a = d.external[at_src[0]].particle.mass
    m_b = d.external[at_src[1]].particle.mass
    m_c = line.particle.mass
    m_e = d.external[dst_init[0]].particle.mass
    m_f = d.external[dst_fin[0]].particle.mass
    if m_c <= m_a + m_b or m_f <= m_c + m_e:
        return None
    return at_src[0], at_src[1], dst_init[0], dst_fin[0], (m_a, m_b, m_c, m_e, m_f)


def _project_onto_surface(d: Diagram, rng: np.random.Generator, tol: float) -> KConfiguration | None:
    """Generic path: draw a random configuration and project it onto the full
    constraint set (external shells, conservation, internal shells, closure,
    positive scales) by least squares with a Gauss-Newton polish."""
    n = d.n_external
    n_lines = d.n_internal
    masses_ext = np.array(d.external_masses())
    signs = np.array([1.0 if l.orientation == "initial" else -1.0 for l in d.external])
    prob = _Problem(d, KConfiguration([ZERO] * n))

    def unpack(x):
        k = x[: 4 * n].reshape(n, 4)
        rest = x[4 * n :]
        return k, rest

    def residuals(x):
        k, rest = unpack(x)
        prob.k_ext = k
        out = [
            k[:, 0] ** 2 - np.sum(k[:, 1:] ** 2, axis=1) - masses_ext**2,
            np.minimum(signs * k[:, 0], 0.0),
        ]
        out.append(prob.residuals(rest))
        return np.concatenate(out)

    k0 = np.zeros((n, 4))
    k0[:, 1:] = rng.normal(scale=0.6, size=(n, 3))
    k0[:, 0] = signs * np.sqrt(masses_ext**2 + np.sum(k0[:, 1:] ** 2, axis=1))
    x0 = np.concatenate([k0.ravel(), prob.start(rng)])
    res = least_squares(residuals, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=4000)
    x = res.x
    for _ in range(4):  # Newton polish onto the constraint manifold
        r = residuals(x)
        if np.linalg.norm(r) < 1e-13:
            break
        eps = 1e-7
        J = np.empty((r.size, x.size))
        for j in range(x.size):
            xp = x.copy()
            xp[j] += eps
            J[:, j] = (residuals(xp) - r) / eps
        step, *_ = np.linalg.lstsq(J, -r, rcond=None)
        x = x + step
    if np.linalg.norm(residuals(x)) > tol:
        return None
    k, _ = unpack(x)
    return KConfiguration([FourVector.from_array(row) for row in k])


def sample_surface(
    d: Diagram,
    count: int,
    seed: int,
    opts: SolverOptions | None = None,
) -> SurfaceSamples:
    """Draw momentum configurations on the diagram's realizability surface.

    Fusion-shaped diagrams are sampled exactly through nested two-body
    splits in the internal particle's rest frame; anything else goes through
    draw-and-project.  Every candidate is re-verified with solve_landau
    before being returned.
    """
    opts = opts or SolverOptions()
    if count <= 0:
        return SurfaceSamples(())
    rng = np.random.default_rng(seed)
    shape = _pole_shape(d)
    configs = []
    budget = 30 * count
    attempts = 0
    while len(configs) < count and attempts < budget:
        attempts += 1
        if shape is not None:
            ia, ib, ie, i_f, masses = shape
            k_a, k_b, k_e, k_f = pole_surface_config(*masses, rng=rng)
            momenta = [None] * 4
            momenta[ia], momenta[ib], momenta[ie], momenta[i_f] = k_a, k_b, k_e, k_f
            K = KConfiguration(momenta)
        else:
            K = _project_onto_surface(d, rng, tol=1e-11)
            if K is None:
                continue
        check = replace(opts, seed=opts.seed + attempts)
        if solve_landau(d, K, check).feasible:
            configs.append(K)
    return SurfaceSamples(tuple(configs), budget_exhausted=len(configs) < count)


def classify_point(
    catalog: list[Diagram],
    K: KConfiguration,
    opts: SolverOptions | None = None,
) -> Classification:
    """Classify K against a finite diagram catalog.

    "trivial" means no catalog diagram is realizable at K (relative to the
    catalog), "singular" lists the realizable ones, and "unknown" is reported
    when nothing is realizable but some solver run was inconclusive.
    """
    opts = opts or SolverOptions()
    singular, unknown, results = [], [], []
    for i, d in enumerate(catalog):
        r = solve_landau(d, K, opts)
        results.append(r)
        if r.feasible:
            singular.append(i)
        elif r.status == "inconclusive":
            unknown.append(i)
    if singular:
        verdict = "singular"
    elif unknown:
        verdict = "unknown"
    else:
        verdict = "trivial"
    return Classification(verdict, tuple(singular), tuple(unknown), tuple(results))
