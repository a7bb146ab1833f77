"""Reference invariant sets and approximation-quality measures."""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .dynamics import euler_disk_radius, make_map
from .geometry import PointCloud, as_points, directed_hausdorff

KINDS = ("PointSingleton", "IntervalGrid", "SegmentGrid", "DiskSample", "TrajectorySample")
GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))


@dataclass(frozen=True)
class ReferenceSet:
    kind: str
    sample: PointCloud
    meta: dict = field(default_factory=dict)


def sunflower_disk(radius: float, N: int, center=(0.0, 0.0)) -> np.ndarray:
    """Quasi-uniform golden-angle sample of a closed disk."""
    i = np.arange(N)
    r = radius * np.sqrt((i + 0.5) / N)
    theta = i * GOLDEN_ANGLE
    return np.stack([center[0] + r * np.cos(theta), center[1] + r * np.sin(theta)], axis=1)


def trajectory(system, start, transient: int, samples: int) -> np.ndarray:
    x = np.asarray(start, dtype=float).reshape(1, system.dim)
    for _ in range(transient):
        x = system.eval(x)
    out = np.empty((samples, system.dim))
    for t in range(samples):
        x = system.eval(x)
        out[t] = x[0]
    return out


def reference(kind: str, params: dict | None = None) -> ReferenceSet:
    """Dense discretization of a known invariant set.

    ``params`` per kind:

    * PointSingleton: ``point``
    * IntervalGrid: ``a``, ``b``, ``N`` (default 10000)
    * SegmentGrid: ``N`` (default 10000); the segment ``[-1, 1] x {0}``
    * DiskSample: ``radius`` (default: invariant radius of the Euler disk map), ``N``
    * TrajectorySample: ``map``, ``params``, ``start``, ``transient``, ``samples``
    """
    p = dict(params or {})
    try:
        if kind == "PointSingleton":
            pts = np.atleast_2d(np.asarray(p["point"], dtype=float))
        elif kind == "IntervalGrid":
            a, b, N = float(p.get("a", 0.0)), float(p.get("b", 1.0)), int(p.get("N", 10_000))
            if not (b > a and N >= 2):
                raise ValueError("IntervalGrid needs b > a and N >= 2")
            pts = np.linspace(a, b, N)[:, None]
        elif kind == "SegmentGrid":
            N = int(p.get("N", 10_000))
            if N < 2:
                raise ValueError("SegmentGrid needs N >= 2")
            pts = np.stack([np.linspace(-1.0, 1.0, N), np.zeros(N)], axis=1)
        elif kind == "DiskSample":
            radius = float(p.get("radius", euler_disk_radius()))
            N = int(p.get("N", 10_000))
            if radius <= 0 or N < 1:
                raise ValueError("DiskSample needs radius > 0 and N >= 1")
            p["radius"] = radius
            pts = sunflower_disk(radius, N)
        elif kind == "TrajectorySample":
            system = make_map(p.get("map", "henon"), p.get("params"))
            start = p.get("start", [0.0] * system.dim)
            transient, samples = int(p.get("transient", 1000)), int(p.get("samples", 100_000))
            if transient < 0 or samples < 1:
                raise ValueError("TrajectorySample needs transient >= 0 and samples >= 1")
            pts = trajectory(system, start, transient, samples)
            if not np.all(np.isfinite(pts)):
                raise ValueError("trajectory diverged; choose another start point")
        else:
            raise ValueError(f"unknown reference kind {kind!r}; choose from {KINDS}")
    except KeyError as exc:
        raise ValueError(f"{kind} reference is missing parameter {exc.args[0]!r}") from None
    return ReferenceSet(kind, PointCloud(pts), p)


def reference_from_spec(spec: dict) -> ReferenceSet:
    """Build a reference from a config entry such as ``{"kind": "IntervalGrid", "N": 10000}``."""
    return _cached_reference(json.dumps(spec, sort_keys=True))


@functools.lru_cache(maxsize=8)
def _cached_reference(key: str) -> ReferenceSet:
    spec = json.loads(key)
    if not isinstance(spec, dict):
        raise ValueError("reference spec must be a JSON object")
    kind = spec.pop("kind", None)
    return reference(kind, spec)


def report_quality(X, ref: ReferenceSet) -> tuple[float, float, float]:
    """``(d_H, d_forward, d_backward)`` of the cloud against a reference set.

    ``d_forward`` is the worst distance from a reference sample to the cloud
    (coverage defect); ``d_backward`` the worst distance from a cloud point
    to the reference (spurious points).
    """
    pts = as_points(X)
    d_fwd = directed_hausdorff(ref.sample, pts)
    d_bwd = directed_hausdorff(pts, ref.sample)
    return max(d_fwd, d_bwd), d_fwd, d_bwd


def distance_to_disk(X, radius: float) -> np.ndarray:
    """Euclidean distance of each point from the closed disk of ``radius`` about 0."""
    pts = as_points(X)
    return np.maximum(np.linalg.norm(pts, axis=1) - radius, 0.0)


def distance_to_segment(X) -> np.ndarray:
    """Distance of planar points from the segment ``[-1, 1] x {0}``."""
    pts = as_points(X)
    dx = np.maximum(np.abs(pts[:, 0]) - 1.0, 0.0)
    return np.hypot(dx, pts[:, 1])
