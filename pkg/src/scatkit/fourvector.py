"""Real four-vectors with explicit metric accessors.

Two inner products are in play throughout the toolkit: kinematics uses the
Lorentz square t^2 - x^2 - y^2 - z^2, while projections, grids and sampling
geometry use the plain Euclidean square.  Every caller states which one it
wants; nothing in this module assumes a default signature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class FourVector:
    t: float
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def lorentz_square(self) -> float:
        return self.t * self.t - self.x * self.x - self.y * self.y - self.z * self.z

    def euclidean_square(self) -> float:
        return self.t * self.t + self.x * self.x + self.y * self.y + self.z * self.z

    def lorentz_dot(self, other: "FourVector") -> float:
        return self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z

    def euclidean_dot(self, other: "FourVector") -> float:
        return self.t * other.t + self.x * other.x + self.y * other.y + self.z * other.z

    def euclidean_norm(self) -> float:
        return math.sqrt(self.euclidean_square())

    def spatial(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def spatial_norm(self) -> float:
        return math.sqrt(self.x * self.x + self.y * self.y + self.z * self.z)

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.x, self.y, self.z])

    @staticmethod
    def from_array(arr) -> "FourVector":
        t, x, y, z = (float(c) for c in arr)
        return FourVector(t, x, y, z)

    def __add__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t + other.t, self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "FourVector") -> "FourVector":
        return FourVector(self.t - other.t, self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "FourVector":
        return FourVector(-self.t, -self.x, -self.y, -self.z)

    def __mul__(self, scale: float) -> "FourVector":
        return FourVector(self.t * scale, self.x * scale, self.y * scale, self.z * scale)

    __rmul__ = __mul__

    def __truediv__(self, scale: float) -> "FourVector":
        return FourVector(self.t / scale, self.x / scale, self.y / scale, self.z / scale)


ZERO = FourVector(0.0, 0.0, 0.0, 0.0)
