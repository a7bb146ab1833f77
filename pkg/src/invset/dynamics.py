"""Benchmark maps with analytic Jacobians.

Every map works on batches: ``eval`` takes an ``(n, d)`` array and returns
``(n, d)``; ``jacobian`` returns ``(n, d, d)`` with ``J[i, r, c] = d f_r / d x_c``
at ``x_i``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .geometry import AxisBox


@dataclass(frozen=True)
class MapSystem:
    name: str
    dim: int
    params: dict
    eval_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    jac_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    box: AxisBox | None = None

    def _batch(self, X):
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, self.dim)
        if X.ndim != 2 or X.shape[1] != self.dim:
            raise ValueError(f"{self.name}: expected points of dimension {self.dim}, got shape {X.shape}")
        return X

    def eval(self, X) -> np.ndarray:
        return self.eval_fn(self._batch(X))

    def jacobian(self, X) -> np.ndarray:
        return self.jac_fn(self._batch(X))

    def __call__(self, X):
        return self.eval(X)


@dataclass(frozen=True)
class VectorField:
    dim: int
    eval_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    jac_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    params: dict = field(default_factory=dict)

    def eval(self, X) -> np.ndarray:
        return self.eval_fn(np.asarray(X, dtype=float).reshape(-1, self.dim))

    def jacobian(self, X) -> np.ndarray:
        return self.jac_fn(np.asarray(X, dtype=float).reshape(-1, self.dim))


def _cols(X):
    return [X[:, i] for i in range(X.shape[1])]


def linear_1d(a: float = 0.1) -> MapSystem:
    """``f(x) = a x`` on the line."""
    if a == 0:
        raise ValueError("linear_1d: a must be nonzero")
    return MapSystem(
        "linear_1d", 1, {"a": a},
        lambda X: a * X,
        lambda X: np.full((X.shape[0], 1, 1), float(a)),
        AxisBox((-1.0,), (1.0,)),
    )


def connecting_1d(a: float = 0.8) -> MapSystem:
    """``f(x) = x + a x (1 - x)``; heteroclinic from 0 to 1."""
    if not a > 0:
        raise ValueError("connecting_1d: a must be positive")
    return MapSystem(
        "connecting_1d", 1, {"a": a},
        lambda X: X + a * X * (1.0 - X),
        lambda X: (1.0 + a * (1.0 - 2.0 * X)).reshape(-1, 1, 1),
        AxisBox((-1.0,), (2.0,)),
    )


def connecting_2d() -> MapSystem:
    """``f(x, y) = (1.5 x^3 - 0.5 x, 10 y)``."""

    def f(X):
        x, y = _cols(X)
        return np.stack([1.5 * x**3 - 0.5 * x, 10.0 * y], axis=1)

    def df(X):
        x, _ = _cols(X)
        J = np.zeros((X.shape[0], 2, 2))
        J[:, 0, 0] = 4.5 * x**2 - 0.5
        J[:, 1, 1] = 10.0
        return J

    return MapSystem("connecting_2d", 2, {}, f, df, AxisBox.cube(-2.0, 2.0, 2))


def disk_field(a: float = 10.0) -> VectorField:
    """Planar field with an unstable invariant circle near radius 1 for ``a > 0``."""

    def v(X):
        x, y = _cols(X)
        s = x**2 + y**2 - 1.0
        return np.stack([-y + a * x * s, x + a * y * s], axis=1)

    def dv(X):
        x, y = _cols(X)
        s = x**2 + y**2 - 1.0
        J = np.empty((X.shape[0], 2, 2))
        J[:, 0, 0] = a * s + 2 * a * x**2
        J[:, 0, 1] = -1.0 + 2 * a * x * y
        J[:, 1, 0] = 1.0 + 2 * a * x * y
        J[:, 1, 1] = a * s + 2 * a * y**2
        return J

    return VectorField(2, v, dv, {"a": a})


def euler_step(v: VectorField, h: float = 0.1, name: str = "euler_step", box: AxisBox | None = None) -> MapSystem:
    """One explicit Euler step ``x + h v(x)`` of the field ``v``."""
    if not h > 0:
        raise ValueError("euler_step: h must be positive")
    eye = np.eye(v.dim)
    return MapSystem(
        name, v.dim, {**v.params, "h": h},
        lambda X: X + h * v.eval(X),
        lambda X: eye + h * v.jacobian(X),
        box,
    )


def euler_disk(a: float = 10.0, h: float = 0.1) -> MapSystem:
    return euler_step(disk_field(a), h, name="euler_disk", box=AxisBox.cube(-2.0, 2.0, 2))


def euler_disk_radius(a: float = 10.0, h: float = 0.1) -> float:
    """Radius of the circle mapped onto itself by ``euler_disk(a, h)``.

    With ``u = r^2 - 1`` the invariance condition is ``a^2 h u^2 + 2 a u + h = 0``;
    the root near zero is taken.
    """
    u = (-1.0 + math.sqrt(1.0 - h * h)) / (a * h)
    return math.sqrt(1.0 + u)


def henon(a: float = 1.3, b: float = 0.3) -> MapSystem:
    """Scaled Henon map ``(1 - a x^2 + y/3, 3 b x)``."""

    def f(X):
        x, y = _cols(X)
        return np.stack([1.0 - a * x**2 + y / 3.0, 3.0 * b * x], axis=1)

    def df(X):
        x, _ = _cols(X)
        J = np.zeros((X.shape[0], 2, 2))
        J[:, 0, 0] = -2.0 * a * x
        J[:, 0, 1] = 1.0 / 3.0
        J[:, 1, 0] = 3.0 * b
        return J

    return MapSystem("henon", 2, {"a": a, "b": b}, f, df, AxisBox.cube(-2.0, 2.0, 2))


def henon_3d(a: float = 1.4, b: float = 0.1, c: float = 0.3) -> MapSystem:
    """``(x, y, z) -> (y, z, a + b x + c y - z^2)``."""

    def f(X):
        x, y, z = _cols(X)
        return np.stack([y, z, a + b * x + c * y - z**2], axis=1)

    def df(X):
        _, _, z = _cols(X)
        J = np.zeros((X.shape[0], 3, 3))
        J[:, 0, 1] = 1.0
        J[:, 1, 2] = 1.0
        J[:, 2, 0] = b
        J[:, 2, 1] = c
        J[:, 2, 2] = -2.0 * z
        return J

    return MapSystem("henon_3d", 3, {"a": a, "b": b, "c": c}, f, df, AxisBox.cube(-2.0, 2.0, 3))


def identity(dim: int = 1) -> MapSystem:
    eye = np.eye(dim)
    return MapSystem(
        "identity", dim, {"dim": dim},
        lambda X: X.copy(),
        lambda X: np.broadcast_to(eye, (X.shape[0], dim, dim)).copy(),
    )


MAPS = {
    "linear_1d": linear_1d,
    "connecting_1d": connecting_1d,
    "connecting_2d": connecting_2d,
    "euler_disk": euler_disk,
    "henon": henon,
    "henon_3d": henon_3d,
    "identity": identity,
}


def make_map(name: str, params: dict | None = None) -> MapSystem:
    """Build a registered map by name, e.g. ``make_map("henon", {"a": 1.3, "b": 0.3})``."""
    try:
        factory = MAPS[name]
    except KeyError:
        raise ValueError(f"unknown map {name!r}; choose from {sorted(MAPS)}") from None
    return factory(**(params or {}))


def fixed_points(system: MapSystem) -> np.ndarray:
    """Analytically known fixed points of the benchmark maps, shape ``(k, d)``."""
    p = system.params
    if system.name == "linear_1d":
        return np.array([[0.0]])
    if system.name == "connecting_1d":
        return np.array([[0.0], [1.0]])
    if system.name == "connecting_2d":
        return np.array([[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]])
    if system.name == "euler_disk":
        return np.array([[0.0, 0.0]])
    if system.name == "henon":
        a, b = p["a"], p["b"]
        disc = math.sqrt((1.0 - b) ** 2 + 4.0 * a)
        xs = [(-(1.0 - b) - disc) / (2.0 * a), (-(1.0 - b) + disc) / (2.0 * a)]
        return np.array([[x, 3.0 * b * x] for x in xs])
    if system.name == "henon_3d":
        # x = a + (b + c) x - x^2
        a, s = p["a"], p["b"] + p["c"]
        disc = math.sqrt((s - 1.0) ** 2 + 4.0 * a)
        xs = [((s - 1.0) - disc) / 2.0, ((s - 1.0) + disc) / 2.0]
        return np.array([[x, x, x] for x in xs])
    raise ValueError(f"no known fixed points for {system.name!r}")
