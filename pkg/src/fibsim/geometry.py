"""Geometric primitives: 2D/3D points in nm and invertible affine maps."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

_MIN_DET = 1e-12


@dataclass(frozen=True)
class Point2D:
    """Lateral position on the sample surface, in nm."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise DomainError(f"point components must be finite: ({self.x}, {self.y})")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y], dtype=float)

    def distance_to(self, other: "Point2D") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Point3D:
    """Position in the sample, in nm; z >= 0 measured downward from the surface."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise DomainError("point components must be finite")
        if self.z < 0:
            raise DomainError(f"depth z must be >= 0 (below the surface), got {self.z}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def lateral(self) -> Point2D:
        return Point2D(self.x, self.y)


@dataclass(frozen=True)
class AffineTransform2D:
    """Invertible 2D affine map: p -> M p + t, with t in nm.

    ``matrix`` is row-major ((m11, m12), (m21, m22)); dimensionless.
    """

    matrix: tuple[tuple[float, float], tuple[float, float]] = ((1.0, 0.0), (0.0, 1.0))
    translation: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        m = self.matrix_array()
        if not np.all(np.isfinite(m)) or not all(
            math.isfinite(v) for v in self.translation
        ):
            raise DomainError("affine components must be finite")
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det) <= _MIN_DET:
            raise DomainError(f"linear part is singular (|det| = {abs(det):.3g})")

    @staticmethod
    def identity() -> "AffineTransform2D":
        return AffineTransform2D()

    @staticmethod
    def from_translation(dx: float, dy: float) -> "AffineTransform2D":
        return AffineTransform2D(translation=(dx, dy))

    @staticmethod
    def rotation(angle_rad: float) -> "AffineTransform2D":
        c, s = math.cos(angle_rad), math.sin(angle_rad)
        return AffineTransform2D(matrix=((c, -s), (s, c)))

    def matrix_array(self) -> np.ndarray:
        return np.array(self.matrix, dtype=float)

    def translation_array(self) -> np.ndarray:
        return np.array(self.translation, dtype=float)

    def apply(self, p: Point2D) -> Point2D:
        v = self.matrix_array() @ p.as_array() + self.translation_array()
        return Point2D(float(v[0]), float(v[1]))

    def apply_array(self, points: np.ndarray) -> np.ndarray:
        """Apply to an (n, 2) array of points."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.matrix_array().T + self.translation_array()

    def compose(self, inner: "AffineTransform2D") -> "AffineTransform2D":
        """Return the map equivalent to applying ``inner`` first, then self."""
        m = self.matrix_array() @ inner.matrix_array()
        t = self.matrix_array() @ inner.translation_array() + self.translation_array()
        return AffineTransform2D(
            matrix=((m[0, 0], m[0, 1]), (m[1, 0], m[1, 1])),
            translation=(float(t[0]), float(t[1])),
        )

    def inverse(self) -> "AffineTransform2D":
        minv = np.linalg.inv(self.matrix_array())
        t = -minv @ self.translation_array()
        return AffineTransform2D(
            matrix=((minv[0, 0], minv[0, 1]), (minv[1, 0], minv[1, 1])),
            translation=(float(t[0]), float(t[1])),
        )


def apply_affine(transform: AffineTransform2D, point: Point2D) -> Point2D:
    """Apply an affine transform to a point (function form of .apply)."""
    return transform.apply(point)
