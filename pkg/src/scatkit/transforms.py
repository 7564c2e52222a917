"""Low-dimensional reduced transforms between local momentum coordinates q
and their dual displacement coordinates v.

The forward map sends a compactly supported momentum profile F(q) through

    T(v, r) = integral dq F(q) exp(-r mu(q)) exp(-i q v),

with a damping polynomial mu >= 0, mu(0) = 0 (everything Euclidean here).
Rapid decay of T at r = 0 makes F recoverable by the inverse transform; the
decomposition machinery re-expresses F as a boundary term F1 (the damped
slice r = gamma0 |v|) plus a divergence remainder F2 built from the Hefer
factorization mu(q) - mu(q') = rho(q, q') . (q - q'), and the identity
F1 + F2 = F holds for every admissible gamma0.  Splitting v-space into a
cone through a hole and its complement yields F = F_H + F_A with F_H
analytic wherever Im q pairs positively with the hole directions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .errors import GrowthError, QuadratureError, TruncationError
from .packets import BumpProfile

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Damping polynomial and its Hefer factorization
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MuForm:
    """Polynomial in l variables with no constant term (mu(0) = 0).

    ``terms`` maps exponent tuples to coefficients, e.g. {(2,): 1.0} is q^2.
    Nonnegativity on the working support is the caller's responsibility and
    is what makes exp(-r mu) a damping factor.
    """

    terms: tuple
    l: int

    @staticmethod
    def from_dict(terms: dict, l: int) -> "MuForm":
        clean = []
        for exps, coef in sorted(terms.items()):
            if len(exps) != l:
                raise ValueError(f"exponent tuple {exps} does not match l={l}")
            if all(e == 0 for e in exps):
                raise ValueError("mu may not contain a constant term (mu(0) must be 0)")
            if coef != 0:
                clean.append((tuple(int(e) for e in exps), float(coef)))
        return MuForm(terms=tuple(clean), l=l)

    @staticmethod
    def diagonal_quadratic(coeffs) -> "MuForm":
        coeffs = list(coeffs)
        l = len(coeffs)
        terms = {}
        for j, c in enumerate(coeffs):
            exps = [0] * l
            exps[j] = 2
            terms[tuple(exps)] = c
        return MuForm.from_dict(terms, l)

    @property
    def degree(self) -> int:
        return max(sum(e) for e, _ in self.terms)

    def __call__(self, q):
        q = np.atleast_2d(np.asarray(q))
        out = np.zeros(q.shape[0], dtype=q.dtype)
        for exps, coef in self.terms:
            mono = np.full(q.shape[0], coef, dtype=q.dtype)
            for j, e in enumerate(exps):
                if e:
                    mono = mono * q[:, j] ** e
            out = out + mono
        return out if out.size > 1 else out[0]

    def hefer_rho(self, q, q2) -> np.ndarray:
        """Vector rho with mu(q) - mu(q2) = rho . (q - q2), exact termwise.

        Each monomial telescopes coordinate by coordinate, so rho is again a
        polynomial in (q, q2) and in particular analytic.
        """
        q = np.asarray(q)
        q2 = np.asarray(q2)
        rho = np.zeros(self.l, dtype=np.result_type(q, q2, float))
        for exps, coef in self.terms:
            for j, e in enumerate(exps):
                if e == 0:
                    continue
                prefix = coef
                for i in range(j):
                    prefix = prefix * q2[i] ** exps[i]
                for i in range(j + 1, self.l):
                    prefix = prefix * q[i] ** exps[i]
                # (q_j^e - q2_j^e) / (q_j - q2_j) summed explicitly
                geo = sum(q[j] ** s * q2[j] ** (e - 1 - s) for s in range(e))
                rho[j] = rho[j] + prefix * geo
        return rho

    def rho_expansion(self, q) -> list[dict]:
        """Per-component expansion of rho(q, q') in powers of q'.

        Returns one dict per component j mapping exponent tuples beta (for
        q') to coefficients depending on q.  Used to rewrite the remainder
        kernel through v-derivatives of T.
        """
        q = np.asarray(q)
        out = [dict() for _ in range(self.l)]
        for exps, coef in self.terms:
            for j, e in enumerate(exps):
                if e == 0:
                    continue
                tail = coef
                for i in range(j + 1, self.l):
                    tail = tail * q[i] ** exps[i]
                for s in range(e):
                    beta = [0] * self.l
                    for i in range(j):
                        beta[i] = exps[i]
                    beta[j] = e - 1 - s
                    key = tuple(beta)
                    out[j][key] = out[j].get(key, 0.0) + tail * q[j] ** s
        return out


def hefer_factor(mu: MuForm, q, q2) -> np.ndarray:
    """Evaluated Hefer vector rho(q, q2)."""
    return mu.hefer_rho(q, q2)


# ---------------------------------------------------------------------------
# Momentum-profile models
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScatteringModelF:
    """Compact momentum profile used as the transform input.

    Kinds: "bump" (the envelope itself), "pole" (1 / (q_1 - q0 + i eps),
    optionally times the envelope), "log" (log(q_1 - q0 + i eps) times the
    envelope), "grid" (tabulated values with linear interpolation).
    """

    kind: str
    l: int
    envelope: BumpProfile | None = None
    q0: float = 0.0
    eps: float = 0.05
    grid_axes: tuple = ()
    grid_values: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in ("bump", "pole", "log", "grid"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.kind == "bump" and self.envelope is None:
            raise ValueError("bump model needs an envelope")
        if self.kind == "grid" and (self.grid_values is None or not self.grid_axes):
            raise ValueError("grid model needs axes and values")

    def support_radius(self) -> float | None:
        if self.envelope is not None:
            return self.envelope.r2
        if self.kind == "grid":
            return max(float(np.max(np.abs(ax))) for ax in self.grid_axes)
        return None

    def feature_scale(self) -> float:
        """Smallest structure the quadrature must resolve."""
        scales = []
        if self.envelope is not None:
            scales.append(self.envelope.r2 - self.envelope.r1)
        if self.kind in ("pole", "log"):
            scales.append(self.eps)
        if self.kind == "grid":
            scales.append(min(float(ax[1] - ax[0]) for ax in self.grid_axes))
        return min(scales) if scales else 1.0

    def value(self, q) -> np.ndarray:
        q = np.atleast_2d(np.asarray(q, dtype=float))
        if self.kind == "grid":
            from scipy.interpolate import RegularGridInterpolator

            interp = RegularGridInterpolator(
                self.grid_axes, self.grid_values, bounds_error=False, fill_value=0.0
            )
            vals = interp(q)
        else:
            vals = np.ones(q.shape[0], dtype=complex)
            if self.kind == "pole":
                vals = 1.0 / (q[:, 0] - self.q0 + 1j * self.eps)
            elif self.kind == "log":
                vals = np.log(q[:, 0] - self.q0 + 1j * self.eps + 0j)
            if self.envelope is not None:
                vals = vals * self.envelope(np.linalg.norm(q, axis=1))
        return vals if vals.size > 1 else vals.reshape(())

    def pole_T(self, v, r: float = 0.0) -> np.ndarray:
        """Closed-form transform of the bare pole at r = 0: one-sided
        exponential concentrated on v > 0."""
        if self.kind != "pole" or self.envelope is not None or r != 0.0:
            raise ValueError("closed form available for the bare pole at r = 0 only")
        v = np.asarray(v, dtype=float)
        out = np.where(v > 0, -2j * np.pi * np.exp((-1j * self.q0 - self.eps) * v), 0.0)
        return out.astype(complex)


# ---------------------------------------------------------------------------
# Forward transform by quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TransformOptions:
    nodes_per_period: float = 16.0
    min_nodes: int = 192
    feature_nodes: float = 24.0  # nodes across the smallest model feature
    max_nodes_per_axis: int = 40000

    def axis_nodes(self, model: ScatteringModelF, v_max_axis: float) -> int:
        R = model.support_radius()
        if R is None:
            raise ValueError("forward quadrature needs a compact model")
        periods = abs(v_max_axis) * (2.0 * R) / TWO_PI
        n = int(
            math.ceil(
                max(
                    self.min_nodes,
                    self.nodes_per_period * periods,
                    self.feature_nodes * (2.0 * R) / model.feature_scale(),
                )
            )
        )
        if n > self.max_nodes_per_axis:
            raise QuadratureError(
                f"forward transform needs {n} nodes per axis (cap {self.max_nodes_per_axis})"
            )
        return n


DEFAULT_TRANSFORM = TransformOptions()


def _q_grid(model: ScatteringModelF, v, opts: TransformOptions):
    R = model.support_radius()
    v = np.atleast_1d(np.asarray(v, dtype=float))
    axes = []
    for j in range(model.l):
        n = opts.axis_nodes(model, float(v[j]) if j < v.size else 0.0)
        x, w = np.polynomial.legendre.leggauss(n)
        axes.append((R * x, R * w))
    if model.l == 1:
        nodes = axes[0][0][:, None]
        weights = axes[0][1]
    else:
        grids = np.meshgrid(*[a[0] for a in axes], indexing="ij")
        nodes = np.stack([g.ravel() for g in grids], axis=-1)
        wgrids = np.meshgrid(*[a[1] for a in axes], indexing="ij")
        weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=1)
    return nodes, weights


def forward_T(
    F: ScatteringModelF,
    mu: MuForm,
    v,
    r: float,
    opts: TransformOptions = DEFAULT_TRANSFORM,
) -> complex:
    """T(v, r) by Gauss-Legendre quadrature over the model support."""
    if r < 0:
        raise ValueError("r must be nonnegative")
    v = np.atleast_1d(np.asarray(v, dtype=float))
    nodes, weights = _q_grid(F, v, opts)
    vals = np.atleast_1d(F.value(nodes)).astype(complex)
    damp = np.exp(-r * np.real(np.atleast_1d(mu(nodes))))
    coeffs = np.ascontiguousarray(weights * vals * damp)
    qr = np.ascontiguousarray(-v[: F.l])
    qi = np.zeros(F.l)
    return kernels.plane_wave_sum(np.ascontiguousarray(nodes), coeffs, qr, qi)


def sample_T_line(F: ScatteringModelF, mu: MuForm, v_axis, r_values,
                  opts: TransformOptions = DEFAULT_TRANSFORM) -> np.ndarray:
    """Vectorized T(v_i, r_k) table for l = 1 models (chunked matrix products
    over a shared quadrature grid sized for the largest |v|)."""
    if F.l != 1:
        raise ValueError("sample_T_line is for l = 1")
    v_axis = np.asarray(v_axis, dtype=float)
    r_values = np.atleast_1d(np.asarray(r_values, dtype=float))
    vmax = float(np.max(np.abs(v_axis)))
    nodes, weights = _q_grid(F, [vmax], opts)
    q = nodes[:, 0]
    fw = np.atleast_1d(F.value(nodes)).astype(complex) * weights
    mu_q = np.real(np.atleast_1d(mu(nodes)))
    damped = np.stack([fw * np.exp(-r * mu_q) for r in r_values], axis=-1)
    out = np.empty((v_axis.size, r_values.size), dtype=complex)
    chunk = max(1, int(4_000_000 // max(q.size, 1)))
    for lo in range(0, v_axis.size, chunk):
        hi = min(lo + chunk, v_axis.size)
        phases = np.exp(-1j * np.outer(v_axis[lo:hi], q))
        out[lo:hi] = phases @ damped
    return out if out.shape[1] > 1 else out[:, 0]


def sample_T_radial_2d(F: ScatteringModelF, v_axes,
                       opts: TransformOptions = DEFAULT_TRANSFORM) -> np.ndarray:
    """T(v, 0) table for a radially symmetric l = 2 model.

    The angular integral reduces to a Bessel kernel, so one radial
    quadrature per |v| fills the whole tensor grid.
    """
    from scipy.special import j0

    if F.l != 2:
        raise ValueError("sample_T_radial_2d is for l = 2")
    if F.kind != "bump":
        raise ValueError("radial reduction implemented for bump models")
    R = F.support_radius()
    v1, v2 = (np.asarray(a, dtype=float) for a in v_axes)
    rad = np.sqrt(v1[:, None] ** 2 + v2[None, :] ** 2)
    rmax = float(np.max(rad))
    n = opts.axis_nodes(F, rmax)
    x, w = np.polynomial.legendre.leggauss(n)
    s = 0.5 * R * (x + 1.0)
    sw = 0.5 * R * w
    prof = F.envelope(s)
    # radial profile once, then cubic interpolation onto the tensor grid;
    # the profile oscillates on the scale 2 pi / R, so this step resolves it
    h_rad = (math.pi / R) / 40.0
    radial_axis = np.arange(0.0, rmax + 2 * h_rad, h_rad)
    profile = np.empty(radial_axis.size, dtype=float)
    chunk = max(1, int(4_000_000 // max(n, 1)))
    for lo in range(0, radial_axis.size, chunk):
        hi = min(lo + chunk, radial_axis.size)
        profile[lo:hi] = TWO_PI * (j0(np.outer(radial_axis[lo:hi], s)) @ (sw * s * prof))
    interp = CubicSpline(radial_axis, profile)
    return interp(rad).astype(complex)


# ---------------------------------------------------------------------------
# Sampled-T containers
# ---------------------------------------------------------------------------


def _uniform_spacing(axis: np.ndarray) -> float:
    d = np.diff(axis)
    if not np.allclose(d, d[0], rtol=1e-9, atol=1e-12):
        raise ValueError("sample axes must be uniform")
    return float(d[0])


@dataclass(frozen=True)
class TSampleGrid:
    """T(., r=0) sampled on a uniform tensor grid in v."""

    axes: tuple
    values: np.ndarray

    def __init__(self, axes, values):
        axes = tuple(np.asarray(a, dtype=float) for a in axes)
        values = np.asarray(values, dtype=complex)
        if values.shape != tuple(a.size for a in axes):
            raise ValueError("values shape does not match axes")
        for a in axes:
            _uniform_spacing(a)
        object.__setattr__(self, "axes", axes)
        object.__setattr__(self, "values", values)

    @property
    def l(self) -> int:
        return len(self.axes)

    def spacings(self) -> tuple:
        return tuple(_uniform_spacing(a) for a in self.axes)

    def peak(self) -> float:
        return float(np.max(np.abs(self.values)))

    def edge_max(self) -> float:
        worst = 0.0
        for ax in range(self.l):
            sl_lo = [slice(None)] * self.l
            sl_hi = [slice(None)] * self.l
            sl_lo[ax] = 0
            sl_hi[ax] = -1
            worst = max(
                worst,
                float(np.max(np.abs(self.values[tuple(sl_lo)]))),
                float(np.max(np.abs(self.values[tuple(sl_hi)]))),
            )
        return worst

    def flat_nodes_weights(self):
        grids = np.meshgrid(*self.axes, indexing="ij")
        nodes = np.stack([g.ravel() for g in grids], axis=-1)
        ws = []
        for a in self.axes:
            w = np.full(a.size, _uniform_spacing(a))
            w[0] *= 0.5
            w[-1] *= 0.5
            ws.append(w)
        wgrids = np.meshgrid(*ws, indexing="ij")
        weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=1)
        return nodes, weights


@dataclass(frozen=True)
class InverseResult:
    value: complex
    truncation_bound: float


def inverse_F(samples: TSampleGrid, q, truncation_tol: float = 1e-7) -> InverseResult:
    """(2 pi)^-l normalized inverse transform of sampled T(., 0).

    Requires visible decay at the grid boundary; the reported truncation
    bound is the boundary magnitude times the box measure, a crude but
    honest scale for the neglected tail.
    """
    peak = samples.peak()
    edge = samples.edge_max()
    if peak > 0 and edge > truncation_tol * peak:
        raise TruncationError(
            f"boundary magnitude {edge:.3e} exceeds {truncation_tol:.1e} of peak {peak:.3e}"
        )
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    nodes, weights = samples.flat_nodes_weights()
    coeffs = np.ascontiguousarray(weights * samples.values.ravel())
    val = kernels.plane_wave_sum(
        np.ascontiguousarray(nodes),
        coeffs,
        np.ascontiguousarray(np.real(q)),
        np.ascontiguousarray(np.imag(q)),
    )
    box = 1.0
    for a in samples.axes:
        box *= float(a[-1] - a[0])
    return InverseResult(value=val / TWO_PI**samples.l, truncation_bound=edge * box / TWO_PI**samples.l)


# ---------------------------------------------------------------------------
# Boundary-plus-remainder decomposition (l = 1)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TRSampleGrid:
    """T(v, r) tabulated on a uniform rectangle, r from 0 up to at least
    gamma0 * max|v|."""

    v_axis: np.ndarray
    r_axis: np.ndarray
    values: np.ndarray  # shape (nv, nr)

    def __init__(self, v_axis, r_axis, values):
        v_axis = np.asarray(v_axis, dtype=float)
        r_axis = np.asarray(r_axis, dtype=float)
        values = np.asarray(values, dtype=complex)
        if values.shape != (v_axis.size, r_axis.size):
            raise ValueError("values shape does not match axes")
        _uniform_spacing(v_axis)
        if r_axis[0] != 0.0:
            raise ValueError("r axis must start at 0")
        object.__setattr__(self, "v_axis", v_axis)
        object.__setattr__(self, "r_axis", r_axis)
        object.__setattr__(self, "values", values)


def _spectral_dv(values: np.ndarray, h: float, order: int) -> np.ndarray:
    """order-th derivative along axis 0 by FFT; assumes decay at the edges."""
    n = values.shape[0]
    freq = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
    mult = (1j * freq) ** order
    return np.fft.ifft(np.fft.fft(values, axis=0) * mult[:, None], axis=0)


@dataclass(frozen=True)
class SplitResult:
    F1: complex
    F2: complex

    @property
    def total(self) -> complex:
        return self.F1 + self.F2


def split_F(
    samples: TRSampleGrid,
    mu: MuForm,
    gamma0: float,
    q,
    growth_tol: float = 1e-6,
) -> SplitResult:
    """Boundary term plus divergence remainder at (possibly complex) q.

    F1 integrates the damped slice T(v, gamma0 |v|) against exp(i q v) with
    the compensating growth factor exp(gamma0 |v| mu(q)); F2 integrates the
    radial component of the remainder kernel, built from the expansion of
    the Hefer vector in powers of q' so that every q'-moment of the
    integrand becomes a v-derivative of T.  Their sum reproduces the
    inverse transform for every admissible gamma0.  One dimension only.
    """
    if gamma0 <= 0:
        raise ValueError("gamma0 must be positive")
    if mu.l != 1:
        raise NotImplementedError("split_F supports l = 1 at desk scale")
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    v = samples.v_axis
    h = _uniform_spacing(v)
    if gamma0 * float(np.max(np.abs(v))) > samples.r_axis[-1] + 1e-12:
        raise ValueError("r axis does not reach gamma0 * max|v|")

    mu_q = complex(np.atleast_1d(mu(q.reshape(1, -1)))[0])
    r_targets = gamma0 * np.abs(v)

    # each row is evaluated at its own damping level r = gamma0 |v_i|
    spline = CubicSpline(samples.r_axis, samples.values, axis=1)
    diag = np.array([spline(r_targets[i])[i] for i in range(v.size)])

    max_order = mu.degree - 1
    dv_diag = []
    for order in range(1, max_order + 1):
        dvals = _spectral_dv(samples.values, h, order)
        dspline = CubicSpline(samples.r_axis, dvals, axis=1)
        dv_diag.append(np.array([dspline(r_targets[i])[i] for i in range(v.size)]))

    w = np.full(v.size, h)
    w[0] *= 0.5
    w[-1] *= 0.5
    phase = np.exp(1j * q[0] * v)
    growth = np.exp(gamma0 * np.abs(v) * mu_q)

    integrand1 = phase * growth * diag
    peak = float(np.max(np.abs(integrand1)))
    edge = max(abs(integrand1[0]), abs(integrand1[-1]))
    if peak > 0 and edge > growth_tol * peak:
        raise GrowthError(
            f"integrand not decaying at |v| = {abs(v[-1]):.1f} "
            f"(edge/peak = {edge / peak:.2e}); shrink q or raise the box"
        )
    F1 = complex(np.sum(w * integrand1)) / TWO_PI

    rho_terms = mu.rho_expansion(q)[0]  # single component for l = 1
    H = np.zeros(v.size, dtype=complex)
    for beta, coef in sorted(rho_terms.items()):
        order = beta[0]
        term = diag if order == 0 else dv_diag[order - 1]
        H += coef * (1j**order) * term
    H *= -1j
    vhat = np.sign(v)
    F2 = gamma0 * complex(np.sum(w * phase * growth * vhat * H)) / TWO_PI
    return SplitResult(F1=F1, F2=F2)


# ---------------------------------------------------------------------------
# Hole / cone split
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HoleSpec:
    """Spherical cap in v-space directions: center (unit vector) and angular
    radius strictly between 0 and pi/2."""

    center: tuple
    theta: float

    def __init__(self, center, theta):
        center = np.asarray(center, dtype=float)
        n = float(np.linalg.norm(center))
        if n == 0:
            raise ValueError("hole center must be a nonzero direction")
        if not (0.0 < theta < math.pi / 2.0):
            raise ValueError("hole angular radius must lie in (0, pi/2)")
        object.__setattr__(self, "center", tuple(center / n))
        object.__setattr__(self, "theta", float(theta))


@dataclass(frozen=True)
class ConeSplitResult:
    F_H: complex | None
    F_A: complex | None
    convergent: bool
    diagnostic: str = ""

    @property
    def total(self) -> complex:
        if self.F_H is None or self.F_A is None:
            raise ValueError("split incomplete: " + self.diagnostic)
        return self.F_H + self.F_A


def _im_margin(q: np.ndarray, hole: HoleSpec) -> float:
    """min over hole directions of cos(angle(Im q, v)); positive inside the
    dual cone."""
    im = np.imag(q)
    nrm = float(np.linalg.norm(im))
    if nrm == 0:
        return 0.0
    imhat = im / nrm
    c = np.asarray(hole.center)
    ang = math.acos(float(np.clip(np.dot(imhat, c), -1.0, 1.0)))
    return math.cos(min(math.pi, ang + hole.theta))


def cone_split(
    samples: TSampleGrid,
    hole: HoleSpec,
    q,
    margin: float = 0.05,
    n_theta: int = 48,
    n_radial: int = 400,
) -> ConeSplitResult:
    """Split the inverse transform into hole-cone and complement pieces.

    F_H integrates over rays through the hole cap and accepts complex q as
    long as Im q pairs with every cap direction above the margin, which
    supplies exponential damping; F_A is evaluated at real q only.  At real
    q the two pieces sum to the full inverse transform.
    """
    q = np.atleast_1d(np.asarray(q, dtype=complex))
    l = samples.l
    if len(hole.center) != l:
        raise ValueError("hole dimension does not match samples")
    imag_norm = float(np.linalg.norm(np.imag(q)))
    complex_q = imag_norm > 0

    if complex_q and _im_margin(q, hole) <= margin:
        return ConeSplitResult(
            F_H=None,
            F_A=None,
            convergent=False,
            diagnostic="Im q lies outside the dual cone of the hole (margin not met)",
        )

    if l == 1:
        sgn = 1.0 if hole.center[0] > 0 else -1.0
        v = samples.axes[0]
        h = _uniform_spacing(v)
        w = np.full(v.size, h)
        w[0] *= 0.5
        w[-1] *= 0.5
        side = sgn * v > 0
        vals = samples.values

        def piece(mask, qq):
            return complex(np.sum(w[mask] * vals[mask] * np.exp(1j * qq * v[mask]))) / TWO_PI

        F_H = piece(side, q[0])
        F_A = piece(~side, complex(np.real(q[0])))  # complement taken at real q
        return ConeSplitResult(F_H=F_H, F_A=F_A, convergent=True)

    if l != 2:
        raise NotImplementedError("cone_split supports l in {1, 2}")

    from scipy.interpolate import RegularGridInterpolator

    interp_re = RegularGridInterpolator(samples.axes, np.real(samples.values), bounds_error=False, fill_value=0.0)
    interp_im = RegularGridInterpolator(samples.axes, np.imag(samples.values), bounds_error=False, fill_value=0.0)
    smax = min(float(a[-1]) for a in samples.axes)
    base = math.atan2(hole.center[1], hole.center[0])
    tg, twg = np.polynomial.legendre.leggauss(n_theta)
    sg, swg = np.polynomial.legendre.leggauss(n_radial)
    thetas = base + hole.theta * tg
    tw = hole.theta * twg
    s = 0.5 * smax * (sg + 1.0)
    sw = 0.5 * smax * swg
    dirs = np.stack([np.cos(thetas), np.sin(thetas)], axis=-1)
    pts = s[:, None, None] * dirs[None, :, :]
    flat = pts.reshape(-1, 2)
    tvals = interp_re(flat) + 1j * interp_im(flat)
    phase = np.exp(1j * (flat @ q))
    jac = (s[:, None] * sw[:, None] * tw[None, :]).ravel()
    F_H = complex(np.sum(jac * tvals * phase)) / TWO_PI**2

    q_real = np.real(q).astype(complex)
    full = inverse_F(samples, q_real, truncation_tol=1.0).value
    phase_r = np.exp(1j * (flat @ q_real))
    F_H_real = complex(np.sum(jac * tvals * phase_r)) / TWO_PI**2
    F_A = full - F_H_real
    return ConeSplitResult(F_H=F_H, F_A=F_A, convergent=True)
