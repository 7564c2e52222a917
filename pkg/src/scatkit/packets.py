"""Momentum-space wave packets on the positive mass shell.

The profile is a smooth bump: identically one inside an inner radius,
identically zero outside an outer radius, glued with exp(1 - 1/(1 - s^2)).
The plateau makes the packet analytic (constant) around its center, which is
what the contour-shift decay bounds rely on; compact support keeps every
quadrature on a finite box.  An optional Gaussian factor exp(-gamma tau
|p - pbar|^2) narrows the packet as the scale tau grows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .fourvector import FourVector


@dataclass(frozen=True)
class BumpProfile:
    """Radial bump: 1 on [0, r1], smooth transition on (r1, r2), 0 beyond."""

    r1: float
    r2: float

    def __post_init__(self):
        if not (0 < self.r1 < self.r2):
            raise ValueError(f"need 0 < r1 < r2, got r1={self.r1}, r2={self.r2}")

    def __call__(self, dist):
        dist = np.asarray(dist, dtype=float)
        out = np.zeros_like(dist)
        out[dist <= self.r1] = 1.0
        mask = (dist > self.r1) & (dist < self.r2)
        if np.any(mask):
            s = (dist[mask] - self.r1) / (self.r2 - self.r1)
            out[mask] = np.exp(1.0 - 1.0 / (1.0 - s * s))
        return out if out.ndim else float(out)


@dataclass(frozen=True)
class MomentumWavePacket:
    """Packet data: mass, on-shell center, Gaussian width parameter and bump.

    ``spatial_dim`` 1 keeps tests fast; 3 is the physical case.  The bump is
    centered on the spatial part of the center momentum.
    """

    mass: float
    pbar: FourVector
    gamma: float
    chi: BumpProfile
    spatial_dim: int = 3

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError("mass must be positive")
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.spatial_dim not in (1, 3):
            raise ValueError("spatial_dim must be 1 or 3")
        gap = abs(self.pbar.lorentz_square() - self.mass**2)
        if gap > 1e-9 * max(1.0, self.mass**2):
            raise ValueError(f"center momentum off shell by {gap:.3e}")
        if self.pbar.t <= 0:
            raise ValueError("center momentum must have positive energy")

    def pbar_spatial(self) -> np.ndarray:
        return self.pbar.spatial()[: self.spatial_dim]

    def support_radius(self) -> float:
        return self.chi.r2

    def max_velocity(self) -> float:
        """Largest |p|/omega(p) over the support: the velocity-cone opening."""
        pmax = float(np.linalg.norm(self.pbar_spatial())) + self.chi.r2
        return pmax / math.sqrt(self.mass**2 + pmax**2)

    def with_gamma(self, gamma: float) -> "MomentumWavePacket":
        return replace(self, gamma=gamma)


def rest_packet(mass: float = 1.0, r1: float = 0.3, r2: float = 0.45,
                gamma: float = 0.0, spatial_dim: int = 3) -> MomentumWavePacket:
    """Packet centered on a particle at rest."""
    return MomentumWavePacket(
        mass=mass,
        pbar=FourVector(mass, 0.0, 0.0, 0.0),
        gamma=gamma,
        chi=BumpProfile(r1, r2),
        spatial_dim=spatial_dim,
    )
