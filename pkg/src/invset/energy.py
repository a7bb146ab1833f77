"""Invariance energy of a point cloud and its Lennard-Jones augmented form.

The energy of ``X = {x_1, ..., x_n}`` under a map ``f`` is

    E(X) = 1/(2n) sum_i |x_i - f(x_{j(i)})|^2 + 1/(2n) sum_i |f(x_i) - x_{k(i)}|^2

with ``j(i)`` the index of the image point nearest to ``x_i`` and ``k(i)`` the
index of the cloud point nearest to ``f(x_i)``. Gradients are taken with the
assignments held fixed, i.e. the gradient of the smooth piece that is active
at ``X``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import MapSystem
from .geometry import as_points
from .knn import NeighborTree

R_MIN = 1e-12


@dataclass
class EnergyReport:
    value: float
    grad: np.ndarray
    assign_fwd: np.ndarray
    assign_bwd: np.ndarray
    lj_value: float = 0.0
    neighbors: np.ndarray | None = None


@dataclass
class LJParams:
    """Spacing potential settings: exponent ``p``, ``m`` neighbours, weight ``mu``, radius ``delta``."""

    p: int = 1
    m: int = 6
    mu: float = 1.0
    delta: float = 0.1

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise ValueError(f"LJ exponent p must be a positive integer, got {self.p}")
        if int(self.m) != self.m or self.m < 1:
            raise ValueError(f"LJ neighbour count m must be a positive integer, got {self.m}")
        if self.mu < 0:
            raise ValueError(f"LJ weight mu must be nonnegative, got {self.mu}")
        self.p, self.m = int(self.p), int(self.m)


def _check(X, f: MapSystem) -> np.ndarray:
    pts = as_points(X)
    if pts.shape[1] != f.dim:
        raise ValueError(f"cloud dimension {pts.shape[1]} does not match map {f.name!r} of dimension {f.dim}")
    return pts


def energy(X, f: MapSystem) -> EnergyReport:
    """Evaluate the invariance energy, its gradient and both assignments."""
    X = _check(X, f)
    n = X.shape[0]
    FX = f.eval(X)
    Df = f.jacobian(X)

    x_tree = NeighborTree(X)
    j, _ = NeighborTree(FX).query(X, 1)
    k, _ = x_tree.query(FX, 1)
    j, k = j[:, 0], k[:, 0]

    r_fwd = X - FX[j]
    r_bwd = FX - X[k]
    value = 0.5 * (np.sum(r_fwd**2) + np.sum(r_bwd**2)) / n

    # scatter sums over {i : j(i) = m} and {i : k(i) = m}
    pulled = np.zeros_like(X)
    np.add.at(pulled, j, r_fwd)
    pushed = np.zeros_like(X)
    np.add.at(pushed, k, r_bwd)

    grad = r_fwd - np.einsum("mrc,mr->mc", Df, pulled) + np.einsum("mrc,mr->mc", Df, r_bwd) - pushed
    grad /= n
    return EnergyReport(float(value), grad.ravel(), j, k)


def energy_grad(X, f: MapSystem) -> np.ndarray:
    return energy(X, f).grad


def lj_potential(r, delta, p: int = 1):
    """``(delta/r)^(2p) - 2 (delta/r)^p + 1``; ``r`` is clamped below at 1e-12."""
    r = np.maximum(np.asarray(r, dtype=float), R_MIN)
    u = (delta / r) ** p
    return u * u - 2.0 * u + 1.0


def lj_derivs(r, delta, p: int = 1):
    """Partial derivatives ``(dV/dr, dV/ddelta)`` of the clamped potential."""
    r = np.maximum(np.asarray(r, dtype=float), R_MIN)
    u = (delta / r) ** p
    # dV/du = 2u - 2;  du/dr = -p u / r;  du/ddelta = p delta^(p-1) / r^p
    dV_du = 2.0 * u - 2.0
    dV_dr = dV_du * (-p * u / r)
    dV_ddelta = dV_du * (p * delta ** (p - 1) / r**p)
    return dV_dr, dV_ddelta


def lj_neighbors(tree: NeighborTree, m: int) -> np.ndarray:
    """The ``m`` nearest other points of every source point, shape ``(n, m)``."""
    X = tree.source
    n = X.shape[0]
    if m >= n:
        raise ValueError(f"need m < n for the spacing term, got m={m}, n={n}")
    idx, _ = tree.query(X, m + 1)
    self_hit = idx == np.arange(n)[:, None]
    # drop the self match; if i was crowded out by coincident points, drop the last candidate
    no_self = ~self_hit.any(axis=1)
    self_hit[no_self, m] = True
    return idx[~self_hit].reshape(n, m)


def augmented(X, lj: LJParams, f: MapSystem, delta: float | None = None) -> EnergyReport:
    """Energy plus ``mu/(n m) sum_i sum_{j in N_m(i)} V(|x_i - x_j|)``.

    The returned gradient has ``n*d`` point components followed by the
    derivative with respect to ``delta``.
    """
    X = _check(X, f)
    n = X.shape[0]
    delta = lj.delta if delta is None else float(delta)
    base = energy(X, f)

    nbr = lj_neighbors(NeighborTree(X), lj.m)
    diff = X[:, None, :] - X[nbr]
    r_raw = np.sqrt(np.sum(diff**2, axis=-1))
    scale = lj.mu / (n * lj.m)

    V = lj_potential(r_raw, delta, lj.p)
    lj_value = scale * float(np.sum(V))
    dV_dr, dV_ddelta = lj_derivs(r_raw, delta, lj.p)

    live = r_raw >= R_MIN  # the clamp makes V flat in x below R_MIN
    unit = np.zeros_like(diff)
    unit[live] = diff[live] / r_raw[live][:, None]
    pair_force = scale * dV_dr[..., None] * unit

    g_pts = base.grad.reshape(n, -1) + pair_force.sum(axis=1)
    np.add.at(g_pts, nbr.ravel(), -pair_force.reshape(-1, X.shape[1]))
    g_delta = scale * float(np.sum(dV_ddelta))

    return EnergyReport(
        base.value + lj_value,
        np.concatenate([g_pts.ravel(), [g_delta]]),
        base.assign_fwd,
        base.assign_bwd,
        lj_value,
        nbr,
    )
