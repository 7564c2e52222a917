"""Classical statistical-mechanics side of the correspondence.

Free classical particles keep their momentum and drift along straight
world lines; at large times the coordinate distribution in the scaled
variable u = x/t reproduces the momentum distribution at p = m u, spread
over a volume growing like t^3.  Densities built from a wave packet use
the squared profile in momentum and a Gaussian position core whose width
grows like sqrt(gamma tau), matching the packet's position-space envelope.

The overlap estimator asks how often straight world lines, displaced by
scaled offsets, all pass through a common space-time ball whose radius
grows like sqrt(tau): on the classically allowed configuration this decays
at most polynomially, while transverse displacement buys an exponential
penalty from the Gaussian position tails.  Those decay laws are what the
quantum transform magnitudes must reproduce.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fits import FalloffFit
from .packets import BumpProfile, MomentumWavePacket
from .wavepacket import oncone_normalizer


@dataclass(frozen=True)
class PositionSpec:
    """Product position density: Gaussian widths or uniform half-widths."""

    kind: str  # "gaussian" | "uniform"
    scale: tuple  # per-axis sigma or half-width

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform"):
            raise ValueError("position kind must be gaussian or uniform")
        if any(s <= 0 for s in self.scale):
            raise ValueError("position scales must be positive (normalizable)")

    @property
    def dim(self) -> int:
        return len(self.scale)

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        scale = np.asarray(self.scale)
        if self.kind == "gaussian":
            return rng.normal(size=(count, self.dim)) * scale
        return rng.uniform(-1.0, 1.0, size=(count, self.dim)) * scale


@dataclass(frozen=True)
class RadialPositionSpec:
    """Isotropic 3-d position density tabulated on a radial grid.

    Samples by inverse transform of the radial mass 4 pi s^2 g(s) with
    linear jitter inside cells; used when the position density is the
    squared magnitude of the packet's position-space wave function rather
    than a plain Gaussian.
    """

    grid: np.ndarray
    pdf: np.ndarray  # g(s) >= 0 on the grid
    importance_uniform: float = 0.0

    def __init__(self, grid, pdf, importance_uniform: float = 0.0):
        grid = np.asarray(grid, dtype=float)
        pdf = np.asarray(pdf, dtype=float)
        if grid.ndim != 1 or grid.size != pdf.size or grid.size < 8:
            raise ValueError("radial grid and pdf must be matching 1-d arrays")
        if np.any(pdf < 0):
            raise ValueError("pdf must be nonnegative")
        if not 0.0 <= importance_uniform < 1.0:
            raise ValueError("importance_uniform must lie in [0, 1)")
        mass = np.trapezoid(4.0 * math.pi * grid**2 * pdf, grid)
        if not mass > 0 or not np.isfinite(mass):
            raise ValueError("unnormalizable radial density")
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "pdf", pdf)
        object.__setattr__(self, "importance_uniform", float(importance_uniform))

    @property
    def dim(self) -> int:
        return 3

    def _radial_cdf(self):
        weights = 4.0 * math.pi * self.grid**2 * self.pdf
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (weights[1:] + weights[:-1]) * np.diff(self.grid))])
        mass = cum[-1]
        return cum / mass, mass

    def _draw_radii(self, rng: np.random.Generator, count: int) -> np.ndarray:
        cum, _ = self._radial_cdf()
        u = rng.uniform(size=count)
        idx = np.searchsorted(cum, u, side="right") - 1
        idx = np.clip(idx, 0, self.grid.size - 2)
        frac = (u - cum[idx]) / np.maximum(cum[idx + 1] - cum[idx], 1e-300)
        return self.grid[idx] + frac * (self.grid[idx + 1] - self.grid[idx])

    def _isotropic(self, rng: np.random.Generator, radii: np.ndarray) -> np.ndarray:
        dirs = rng.normal(size=(radii.size, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        return radii[:, None] * dirs

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        return self._isotropic(rng, self._draw_radii(rng, count))

    def sample_weighted(self, rng: np.random.Generator, count: int):
        """Importance draw: a mixture of the nominal radial law and a uniform
        radius spreads samples into the far tail, where rare-event overlap
        estimates live; the returned weights keep the estimator unbiased."""
        if self.importance_uniform <= 0.0:
            return self.sample(rng, count), np.ones(count)
        cum, mass = self._radial_cdf()
        radial_density = 4.0 * math.pi * self.grid**2 * self.pdf / mass  # per radius
        extent = float(self.grid[-1])
        from_uniform = rng.uniform(size=count) < self.importance_uniform
        radii = np.empty(count)
        n_u = int(np.sum(from_uniform))
        radii[from_uniform] = rng.uniform(0.0, extent, size=n_u)
        radii[~from_uniform] = self._draw_radii(rng, count - n_u)
        nominal = np.interp(radii, self.grid, radial_density)
        proposal = (1.0 - self.importance_uniform) * nominal + self.importance_uniform / extent
        weights = nominal / np.maximum(proposal, 1e-300)
        return self._isotropic(rng, radii), weights


@dataclass(frozen=True)
class MomentumSpec:
    """Squared-bump momentum density times an optional Gaussian factor:
    chi(|p - center|)^2 exp(-gauss_coeff |p - center|^2), sampled by
    rejection from the bounding box."""

    chi: BumpProfile
    center: tuple
    gauss_coeff: float = 0.0

    @property
    def dim(self) -> int:
        return len(self.center)

    def density(self, p: np.ndarray) -> np.ndarray:
        p = np.atleast_2d(np.asarray(p, dtype=float))
        d = np.linalg.norm(p - np.asarray(self.center), axis=1)
        vals = self.chi(d) ** 2 * np.exp(-self.gauss_coeff * d * d)
        return vals

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        out = np.empty((count, self.dim))
        have = 0
        r2 = self.chi.r2
        center = np.asarray(self.center)
        while have < count:
            n_draw = max(64, int(2.5 * (count - have) / 0.2))
            cand = center + rng.uniform(-r2, r2, size=(n_draw, self.dim))
            accept = rng.uniform(size=n_draw) < self.density(cand)
            good = cand[accept]
            take = min(count - have, good.shape[0])
            out[have : have + take] = good[:take]
            have += take
        return out


@dataclass(frozen=True)
class PhaseSpaceDensity:
    position: PositionSpec
    momentum: MomentumSpec
    mass: float

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.position.dim != self.momentum.dim:
            raise ValueError("position and momentum dimensions differ")


def packet_density(
    packet: MomentumWavePacket,
    tau: float,
    position_width0: float = 1.0,
    position: str = "gaussian",
    position_extent: float = 0.0,
    importance_uniform: float = 0.0,
) -> PhaseSpaceDensity:
    """Classical density matching the squared packet at scale tau.

    Momentum density |chi exp(-gamma tau (p - pbar)^2)|^2.  The position
    factor is either a Gaussian core of variance width0^2 + gamma tau (the
    envelope spread) or, with position="exact", the squared magnitude of the
    packet's position-space wave function at its preparation time, tabulated
    radially out to ``position_extent``.  The exact form keeps the same
    profile-edge tails the quantum magnitudes carry, which matters when
    comparing decay rates.
    """
    d = packet.spatial_dim
    if position == "exact":
        if d != 3 or float(np.linalg.norm(packet.pbar_spatial())) > 1e-12:
            raise ValueError("exact position density needs a rest-frame 3-d packet")
        if position_extent <= 0:
            raise ValueError("position_extent must be set for the exact density")
        pos = exact_position_density(packet, tau, position_extent, importance_uniform)
    else:
        sigma = math.sqrt(position_width0**2 + packet.gamma * tau)
        pos = PositionSpec("gaussian", tuple([sigma] * d))
    return PhaseSpaceDensity(
        position=pos,
        momentum=MomentumSpec(
            chi=packet.chi,
            center=tuple(float(c) for c in packet.pbar_spatial()),
            gauss_coeff=2.0 * packet.gamma * tau,
        ),
        mass=packet.mass,
    )


def exact_position_density(
    packet: MomentumWavePacket, tau: float, extent: float, importance_uniform: float = 0.0
) -> RadialPositionSpec:
    """|position wave function|^2 of a rest-frame packet on a radial grid,
    via the one-dimensional radial reduction of the mass-shell transform."""
    n_p = 1500
    x, w = np.polynomial.legendre.leggauss(n_p)
    r2 = packet.chi.r2
    p = 0.5 * r2 * (x + 1.0)
    wp = 0.5 * r2 * w
    omega = np.sqrt(packet.mass**2 + p * p)
    weight = wp * p * packet.chi(p) * np.exp(-packet.gamma * tau * p * p) / (2.0 * omega)
    s = np.linspace(1e-6, extent, 6000)
    # (2 pi)^-3 * 4 pi / s * integral dp p sin(p s) ...
    vals = (np.sin(np.outer(s, p)) @ weight) / s
    vals *= 4.0 * math.pi / (2.0 * math.pi) ** 3
    return RadialPositionSpec(s, vals * vals, importance_uniform)


def sample_density(rho: PhaseSpaceDensity, count: int, seed: int):
    """Independent (x, p) draws; deterministic for a fixed seed."""
    if count < 0:
        raise ValueError("count must be nonnegative")
    rng = np.random.default_rng(seed)
    if count == 0:
        d = rho.position.dim
        return np.empty((0, d)), np.empty((0, d))
    xs = rho.position.sample(rng, count)
    ps = rho.momentum.sample(rng, count)
    return xs, ps


def propagate_free(sample, t: float, m: float) -> np.ndarray:
    """Straight-line propagation x + t p / m (nonrelativistic, exact)."""
    if m <= 0:
        raise ValueError("mass must be positive")
    xs, ps = sample
    return np.asarray(xs) + t * np.asarray(ps) / m


def asymptotic_density(
    rho: PhaseSpaceDensity,
    u,
    p,
    t: float,
    exponent: float = 1.5,
) -> float:
    """Large-time product form of the free phase-space density.

    The coordinate factor is the momentum density evaluated at the drift
    momentum m u, scaled down by the squared on-cone normalizer; the
    momentum factor is the density at p.  Densities are unnormalized
    profiles (the bump plateau sits at one).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    u = np.asarray(u, dtype=float)
    p = np.asarray(p, dtype=float)
    f2 = abs(oncone_normalizer(rho.mass, t, exponent)) ** 2
    coord = float(rho.momentum.density(rho.mass * u[None, :])[0])
    mom = float(rho.momentum.density(p[None, :])[0])
    return coord * mom / f2


def ball_mass(radial: RadialPositionSpec, center_distance: float, radius: float) -> float:
    """Mass of an isotropic radial density inside a ball at the given center
    distance (spherical-cap overlap, one radial quadrature)."""
    s = radial.grid
    d = max(center_distance, 1e-12)
    cos_cap = (s**2 + d**2 - radius**2) / (2.0 * s * d)
    frac = np.clip(0.5 * (1.0 - cos_cap), 0.0, 1.0)
    return float(np.trapezoid(4.0 * math.pi * s**2 * radial.pdf * frac, s))


def propagated_density_estimate(
    rho: PhaseSpaceDensity,
    u,
    t: float,
    count: int,
    seed: int,
    ball_radius: float,
):
    """Monte Carlo estimate of the coordinate density at x = u t: fraction
    of propagated samples inside the ball over its volume.  Returns
    (estimate, statistical error)."""
    u = np.asarray(u, dtype=float)
    xs, ps = sample_density(rho, count, seed)
    pos = propagate_free((xs, ps), t, rho.mass)
    dist = np.linalg.norm(pos - u * t, axis=1)
    hits = np.sum(dist <= ball_radius)
    dim = rho.position.dim
    if dim == 3:
        vol = 4.0 / 3.0 * math.pi * ball_radius**3
    elif dim == 1:
        vol = 2.0 * ball_radius
    else:
        vol = math.pi * ball_radius**2
    est = hits / (count * vol)
    err = math.sqrt(max(hits, 1.0)) / (count * vol)
    return float(est), float(err)


# ---------------------------------------------------------------------------
# Overlap of displaced trajectories
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OverlapEstimate:
    """Probability that all displaced world lines meet a common growing
    space-time ball.  When no batch accepts anything, ``probability`` holds
    a rule-of-three upper bound and ``is_upper_bound`` is set."""

    probability: float
    statistical_error: float
    tau: float
    region_radius: float
    n_total: int
    is_upper_bound: bool = False

    def to_dict(self) -> dict:
        return {
            "probability": self.probability,
            "statistical_error": self.statistical_error,
            "tau": self.tau,
            "region_radius": self.region_radius,
            "n_total": self.n_total,
            "is_upper_bound": self.is_upper_bound,
        }


def _common_point_residual(anchors: np.ndarray, dirs: np.ndarray,
                           s_lo: np.ndarray, s_hi: np.ndarray,
                           iters: int = 8) -> np.ndarray:
    """Coordinate descent for the best common point of trajectory segments.

    anchors, dirs: (n_lines, N, 4); each trajectory is anchor + s * dir with
    s in [s_lo, s_hi].  Bounding s keeps the meeting inside the experiment's
    own time span; an unbounded line would eventually cross any other line
    and wash out the decay the estimator is meant to expose.  Alternates the
    clamped per-line projection with the mean-center update, starting from
    the centroid of the anchors; returns the worst point-to-center distance
    per sample.
    """
    centers = anchors.mean(axis=0)
    for _ in range(iters):
        t = np.einsum("lni,lni->ln", centers[None] - anchors, dirs)
        t = np.clip(t, s_lo, s_hi)
        points = anchors + t[..., None] * dirs
        centers = points.mean(axis=0)
    dists = np.linalg.norm(points - centers[None], axis=2)
    return dists.max(axis=0)


def overlap_probability(
    packets,
    tau: float,
    growth_c: float = 1.0,
    count: int = 4000,
    seed: int = 0,
    n_batches: int = 16,
    time_window_c: float = 1.0,
) -> OverlapEstimate:
    """Monte Carlo overlap of displaced free trajectories.

    ``packets`` is a list of (PhaseSpaceDensity, FourVector displacement);
    each trajectory starts at its sampled position shifted by the spatial
    displacement times tau, at time equal to the displacement's time
    component times tau, and drifts with velocity p/m through a passage
    window of the same sqrt(tau) scale as the ball.  Acceptance asks for a
    common space-time point within Euclidean distance growth_c * sqrt(tau)
    of every trajectory segment.
    """
    if len(packets) < 2:
        raise ValueError("overlap needs at least two packets")
    if tau <= 0:
        raise ValueError("tau must be positive")
    radius = growth_c * math.sqrt(tau)
    margin = time_window_c * math.sqrt(tau)
    # the experiment spans the preparation times plus a growing margin;
    # passage outside that span belongs to a different, larger experiment
    t_anchors = [disp.t * tau for _, disp in packets]
    t_lo = min(t_anchors) - margin
    t_hi = max(t_anchors) + margin
    seeds = np.random.SeedSequence(seed).spawn(n_batches)
    per_batch = max(1, count // n_batches)
    rates = []
    total = 0
    for ss in seeds:
        rng = np.random.default_rng(ss)
        anchors = []
        dirs = []
        s_los = []
        s_his = []
        weights = np.ones(per_batch)
        for rho, disp in packets:
            sampler = getattr(rho.position, "sample_weighted", None)
            if sampler is not None:
                xs, w = sampler(rng, per_batch)
                weights = weights * w
            else:
                xs = rho.position.sample(rng, per_batch)
            ps = rho.momentum.sample(rng, per_batch)
            if xs.shape[1] != 3:
                raise ValueError("overlap trajectories are three-dimensional")
            t0 = disp.t * tau
            base = xs + disp.spatial() * tau
            anchor = np.concatenate([np.full((per_batch, 1), t0), base], axis=1)
            vel = ps / rho.mass
            d4 = np.concatenate([np.ones((per_batch, 1)), vel], axis=1)
            norms = np.linalg.norm(d4, axis=1, keepdims=True)
            d4 /= norms
            anchors.append(anchor)
            dirs.append(d4)
            # t0 + s / |d4| in [t_lo, t_hi] as an arclength interval
            s_los.append((t_lo - t0) * norms[:, 0])
            s_his.append((t_hi - t0) * norms[:, 0])
        worst = _common_point_residual(
            np.stack(anchors), np.stack(dirs), np.stack(s_los), np.stack(s_his)
        )
        rates.append(float(np.mean(weights * (worst <= radius))))
        total += per_batch
    rates = np.array(rates)
    prob = float(rates.mean())
    if prob == 0.0:
        return OverlapEstimate(
            probability=3.0 / total,
            statistical_error=float("nan"),
            tau=tau,
            region_radius=radius,
            n_total=total,
            is_upper_bound=True,
        )
    err = float(rates.std(ddof=1) / math.sqrt(n_batches))
    return OverlapEstimate(prob, err, tau, radius, total, False)


# ---------------------------------------------------------------------------
# Classical-vs-quantum comparison
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ComparisonReport:
    """Side-by-side decay laws.  The classical side carries probabilities,
    the quantum side amplitudes, so quantum exponents and rates are doubled
    before comparing."""

    corresponds: bool
    kind_match: bool
    classical_value: float
    quantum_doubled: float
    rel_difference: float
    classical_kind: str
    quantum_kind: str

    def to_dict(self) -> dict:
        return {
            "corresponds": self.corresponds,
            "kind_match": self.kind_match,
            "classical_value": self.classical_value,
            "quantum_doubled": self.quantum_doubled,
            "rel_difference": self.rel_difference,
            "classical_kind": self.classical_kind,
            "quantum_kind": self.quantum_kind,
        }


def correspondence_compare(
    classical: FalloffFit,
    quantum: FalloffFit,
    comparison_tol: float = 0.25,
) -> ComparisonReport:
    """Verdict on whether a classical probability decay matches a quantum
    amplitude decay.  Requires overlapping tau ranges; kinds must agree and
    the classical rate or exponent must match twice the quantum one within
    the tolerance."""
    lo = max(classical.tau_range[0], quantum.tau_range[0])
    hi = min(classical.tau_range[1], quantum.tau_range[1])
    if not lo < hi:
        raise ValueError(
            f"disjoint tau ranges {classical.tau_range} and {quantum.tau_range}"
        )
    kind_match = classical.kind == quantum.kind
    c = classical.exponent_or_rate
    q2 = 2.0 * quantum.exponent_or_rate
    denom = max(abs(c), abs(q2), 1e-12)
    rel = abs(c - q2) / denom
    return ComparisonReport(
        corresponds=bool(kind_match and rel <= comparison_tol),
        kind_match=kind_match,
        classical_value=c,
        quantum_doubled=q2,
        rel_difference=rel,
        classical_kind=classical.kind,
        quantum_kind=quantum.kind,
    )
