"""Initial point clouds: seeded uniform random, cell-centred grid, Halton."""

from __future__ import annotations

import numpy as np

from .geometry import AxisBox, PointCloud

PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)


def uniform_random(box: AxisBox, n: int, seed: int) -> PointCloud:
    """``n`` i.i.d. uniform points in ``box`` from a PCG64 stream seeded with ``seed``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    rng = np.random.default_rng(np.uint64(seed))
    u = rng.random((n, box.dim))
    return PointCloud(np.asarray(box.lower) + u * box.widths)


def grid(box: AxisBox, counts) -> PointCloud:
    """Tensor grid of cell centres; ``counts[i]`` cells along axis ``i``."""
    counts = [int(c) for c in np.atleast_1d(counts)]
    if len(counts) != box.dim or min(counts) < 1:
        raise ValueError(f"need one positive count per axis ({box.dim}), got {counts}")
    axes = [
        lo + (np.arange(c) + 0.5) * (hi - lo) / c
        for lo, hi, c in zip(box.lower, box.upper, counts)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return PointCloud(np.stack([m.ravel() for m in mesh], axis=1))


def radical_inverse(i: int, base: int) -> float:
    inv, f = 0.0, 1.0 / base
    while i > 0:
        i, digit = divmod(i, base)
        inv += digit * f
        f /= base
    return inv


def halton(box: AxisBox, n: int, skip: int = 0) -> PointCloud:
    """Points ``skip+1 .. skip+n`` of the Halton sequence mapped into ``box``."""
    if box.dim > len(PRIMES):
        raise ValueError(f"halton supports at most {len(PRIMES)} dimensions")
    if n < 1 or skip < 0:
        raise ValueError("need n >= 1 and skip >= 0")
    u = np.array(
        [[radical_inverse(i, PRIMES[k]) for k in range(box.dim)] for i in range(skip + 1, skip + n + 1)]
    )
    return PointCloud(np.asarray(box.lower) + u * box.widths)


def from_spec(spec: dict, box: AxisBox, seed: int) -> PointCloud:
    """Build a cloud from a config entry ``{"kind": ..., "n" | "counts", "seed" | "skip"}``."""
    kind = spec.get("kind")
    if kind == "uniform":
        return uniform_random(box, int(spec["n"]), int(spec.get("seed", seed)))
    if kind == "grid":
        return grid(box, spec["counts"])
    if kind == "halton":
        return halton(box, int(spec["n"]), int(spec.get("skip", 0)))
    raise ValueError(f"init.kind must be one of uniform, grid, halton; got {kind!r}")
