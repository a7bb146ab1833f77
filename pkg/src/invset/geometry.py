"""Point clouds, axis-aligned boxes and set distances between finite clouds."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np


@dataclass(frozen=True)
class PointCloud:
    """An ordered multiset of ``n`` points in R^d stored as an ``(n, d)`` array.

    Point order is meaningful (indices identify points in assignments) but
    every set distance in this module is invariant under permutations.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise ValueError(f"point cloud needs shape (n>=1, d>=1), got {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("point cloud coordinates must be finite")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def to_csv(self, path) -> None:
        write_cloud_csv(path, self.points)

    @classmethod
    def from_csv(cls, path) -> "PointCloud":
        return cls(read_cloud_csv(path))


@dataclass(frozen=True)
class AxisBox:
    """Axis-aligned box ``[lower_0, upper_0] x ... x [lower_{d-1}, upper_{d-1}]``."""

    lower: tuple
    upper: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lower))
        hi = tuple(float(v) for v in np.atleast_1d(self.upper))
        if len(lo) != len(hi) or not lo:
            raise ValueError("box bounds must be nonempty and of equal length")
        if any(a >= b for a, b in zip(lo, hi)):
            raise ValueError(f"box needs lower < upper componentwise, got {lo} / {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "AxisBox":
        return cls((lo,) * dim, (hi,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def widths(self) -> np.ndarray:
        return np.asarray(self.upper) - np.asarray(self.lower)

    @property
    def volume(self) -> float:
        return float(np.prod(self.widths))

    def contains(self, points) -> np.ndarray:
        pts = as_points(points)
        return np.all((pts >= self.lower) & (pts <= self.upper), axis=1)

    def to_dict(self) -> dict:
        return {"lower": list(self.lower), "upper": list(self.upper)}


def as_points(X) -> np.ndarray:
    """Return ``X`` (cloud or array-like) as a float ``(n, d)`` array."""
    if isinstance(X, PointCloud):
        return X.points
    pts = np.asarray(X, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] < 1:
        raise ValueError(f"expected a nonempty (n, d) point array, got shape {pts.shape}")
    return pts


def _pair(X, Y):
    a, b = as_points(X), as_points(Y)
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    return a, b


def _min_sq_dists(Y: np.ndarray, X: np.ndarray) -> np.ndarray:
    """For every row of ``Y`` the squared distance to its nearest row of ``X``."""
    from .knn import NeighborTree

    return NeighborTree(X).min_sq_dists(Y)


def point_to_set_sq(y, X) -> tuple[float, int]:
    """Squared distance from ``y`` to the cloud ``X`` and the minimizing index.

    Ties go to the smallest index.
    """
    pts = as_points(X)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    if y.shape != (pts.shape[1],):
        raise ValueError(f"point of shape {y.shape} does not match cloud dimension {pts.shape[1]}")
    sq = ((pts - y) ** 2).sum(axis=1)
    i = int(np.argmin(sq))  # argmin returns the first occurrence
    return float(sq[i]), i


def modified_hausdorff(X, Y) -> float:
    """Symmetrized mean squared nearest-neighbour distance between two clouds.

    ``0.5 * (mean_x min_y |x-y|^2 + mean_y min_x |x-y|^2)``, counting
    duplicated points with multiplicity.
    """
    a, b = _pair(X, Y)
    return 0.5 * (_min_sq_dists(a, b).mean() + _min_sq_dists(b, a).mean())


def directed_hausdorff(X, Y) -> float:
    """``max_{x in X} min_{y in Y} |x - y|`` (unsquared)."""
    a, b = _pair(X, Y)
    return float(np.sqrt(_min_sq_dists(a, b).max()))


def hausdorff_exact(X, Y) -> float:
    """Classical Hausdorff distance between two finite clouds."""
    return max(directed_hausdorff(X, Y), directed_hausdorff(Y, X))


def write_cloud_csv(path, points) -> None:
    pts = as_points(points)
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow([f"x{i}" for i in range(pts.shape[1])])
        for row in pts:
            writer.writerow([format(float(v), ".17g") for v in row])


def read_cloud_csv(path) -> np.ndarray:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ValueError(f"{path}: empty cloud file")
    header = rows[0]
    if header != [f"x{i}" for i in range(len(header))]:
        raise ValueError(f"{path}: bad header {header!r}")
    data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    if data.size == 0:
        raise ValueError(f"{path}: no points")
    return data.reshape(-1, len(header))
