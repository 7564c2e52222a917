"""Relativistic two-body kinematics: boosts, thresholds, momentum splits.

These helpers build exact on-shell configurations (machine precision), which
is what makes constructed surface points trustworthy without any solver in
the loop.
"""

from __future__ import annotations

import math

import numpy as np

from .fourvector import FourVector


def kallen(a: float, b: float, c: float) -> float:
    """Triangle function lambda(a, b, c) = a^2 + b^2 + c^2 - 2ab - 2bc - 2ca."""
    return a * a + b * b + c * c - 2.0 * (a * b + b * c + c * a)


def two_body_momentum(M: float, m1: float, m2: float) -> float:
    """Magnitude of either momentum when a mass-M system splits into (m1, m2)."""
    if M < m1 + m2:
        raise ValueError(f"mass {M} below threshold {m1 + m2}")
    lam = kallen(M * M, m1 * m1, m2 * m2)
    return math.sqrt(max(lam, 0.0)) / (2.0 * M)


def boost_matrix_from_rest(p: FourVector) -> np.ndarray:
    """Pure boost taking (m, 0, 0, 0) to the timelike positive-energy p."""
    m2 = p.lorentz_square()
    if m2 <= 0 or p.t <= 0:
        raise ValueError("boost target must be timelike with positive energy")
    m = math.sqrt(m2)
    gamma = p.t / m
    beta = p.spatial() / p.t
    b2 = float(beta @ beta)
    L = np.eye(4)
    L[0, 0] = gamma
    L[0, 1:] = gamma * beta
    L[1:, 0] = gamma * beta
    if b2 > 0:
        L[1:, 1:] = np.eye(3) + (gamma - 1.0) * np.outer(beta, beta) / b2
    return L


def apply_matrix(L: np.ndarray, v: FourVector) -> FourVector:
    return FourVector.from_array(L @ v.as_array())


def onshell(mass: float, spatial) -> FourVector:
    """Positive-energy four-momentum with the given mass and spatial part."""
    sp = np.asarray(spatial, dtype=float)
    e = math.sqrt(mass * mass + float(sp @ sp))
    return FourVector(e, *sp)


def random_unit_3vector(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    n = np.linalg.norm(v)
    while n < 1e-12:
        v = rng.normal(size=3)
        n = np.linalg.norm(v)
    return v / n


def split_momentum(P: FourVector, m1: float, m2: float, direction) -> tuple[FourVector, FourVector]:
    """Split a timelike P into on-shell (p1, p2) back to back along ``direction``
    in P's rest frame, then boost to the frame where P is given.  Exact:
    p1 + p2 = P and both mass shells hold to machine precision.
    """
    M2 = P.lorentz_square()
    if M2 <= 0:
        raise ValueError("cannot split a non-timelike momentum")
    M = math.sqrt(M2)
    pstar = two_body_momentum(M, m1, m2)
    d = np.asarray(direction, dtype=float)
    d = d / np.linalg.norm(d)
    p1_rest = onshell(m1, pstar * d)
    p2_rest = onshell(m2, -pstar * d)
    L = boost_matrix_from_rest(P)
    return apply_matrix(L, p1_rest), apply_matrix(L, p2_rest)


def random_timelike(mass: float, rng: np.random.Generator, beta_max: float = 0.5) -> FourVector:
    """On-shell momentum of the given mass with a random velocity below beta_max."""
    beta = beta_max * rng.uniform(0.0, 1.0) * random_unit_3vector(rng)
    gamma = 1.0 / math.sqrt(1.0 - float(beta @ beta))
    return FourVector(gamma * mass, *(gamma * mass * beta))


def pole_surface_config(
    m_a: float,
    m_b: float,
    m_c: float,
    m_e: float,
    m_f: float,
    rng: np.random.Generator,
    virtual_shift: float = 0.0,
    beta_max: float = 0.4,
) -> tuple[FourVector, FourVector, FourVector, FourVector]:
    """External momenta for the fusion process a + b -> c, then c + e -> f.

    Built by nested exact two-body splits: f is drawn with a random velocity,
    split into (c, e) in its rest frame, and c is split into (a, b).  With
    virtual_shift = 0 the invariant mass of (a + b) equals m_c exactly, i.e.
    the configuration sits on the realizability surface; a nonzero shift puts
    (k_a + k_b)^2 at m_c^2 + virtual_shift, moving it off the surface while
    keeping every external particle on shell and momentum conserved.

    Returns mathematical momenta (k_a, k_b, k_e, k_f) with k_f = -p_f.
    """
    m_virt = math.sqrt(m_c * m_c + virtual_shift)
    if not (m_a + m_b < m_virt < m_f - m_e):
        raise ValueError(
            f"virtual mass {m_virt:.6g} outside the open window "
            f"({m_a + m_b}, {m_f - m_e})"
        )
    p_f = random_timelike(m_f, rng, beta_max)
    q_c, p_e = split_momentum(p_f, m_virt, m_e, random_unit_3vector(rng))
    # q_c carries the virtual mass; a and b are exactly on their own shells
    p_a, p_b = split_momentum(q_c, m_a, m_b, random_unit_3vector(rng))
    return p_a, p_b, p_e, -p_f
