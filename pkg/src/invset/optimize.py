"""Limited-memory BFGS with a strong Wolfe line search.

Line search follows Nocedal & Wright, Numerical Optimization (2nd ed.),
Algorithms 3.5/3.6 with safeguarded cubic interpolation in the zoom phase.
"""

from __future__ import annotations

import enum
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)

Objective = Callable[[np.ndarray], tuple]


class Termination(str, enum.Enum):
    GRAD_TOL = "GradTol"
    MAX_ITERS = "MaxIters"
    LINE_SEARCH_FAILURE = "LineSearchFailure"


@dataclass
class OptimOptions:
    grad_tol: float = 1e-6
    max_iters: int = 500
    memory: int = 10
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    snapshot_every: int = 0
    max_line_search: int = 30

    def __post_init__(self):
        if not self.grad_tol > 0:
            raise ValueError("grad_tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if self.memory < 1:
            raise ValueError("memory must be at least 1")
        if not 0 < self.wolfe_c1 < self.wolfe_c2 < 1:
            raise ValueError("need 0 < wolfe_c1 < wolfe_c2 < 1")
        if self.snapshot_every < 0:
            raise ValueError("snapshot_every must be nonnegative")


@dataclass
class TraceRow:
    iteration: int
    value: float
    grad_inf: float
    snapshot: np.ndarray | None = None


@dataclass
class OptimRun:
    final_x: np.ndarray
    final_value: float
    final_grad_norm: float
    iterations: int
    termination: Termination
    trace: list = field(default_factory=list)
    evaluations: int = 0


class _Counted:
    def __init__(self, obj):
        self.obj = obj
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        value, grad = self.obj(x)
        return float(value), np.asarray(grad, dtype=float)


def _finite(value, grad) -> bool:
    return np.isfinite(value) and bool(np.all(np.isfinite(grad)))


def _cubic_min(a1, f1, g1, a2, f2, g2, lo, hi):
    """Minimizer of the cubic interpolating two (step, value, slope) triples, clipped to [lo, hi]."""
    d1 = g1 + g2 - 3.0 * (f1 - f2) / (a1 - a2)
    disc = d1 * d1 - g1 * g2
    if disc >= 0.0:
        d2 = np.sqrt(disc) * np.sign(a2 - a1)
        denom = g2 - g1 + 2.0 * d2
        if denom != 0.0:
            a = a2 - (a2 - a1) * (g2 + d2 - d1) / denom
            if np.isfinite(a):
                return min(max(a, lo), hi)
    return 0.5 * (lo + hi)


def strong_wolfe(fun, x, f0, g0, d, alpha0, c1=1e-4, c2=0.9, max_evals=30):
    """Find a step length satisfying the strong Wolfe conditions along ``d``.

    Returns ``(alpha, f, g)`` on success. When no step satisfies both
    conditions within ``max_evals`` evaluations, the best point found that
    satisfies sufficient decrease is returned instead; ``None`` is returned
    if there is no such point.
    """
    dphi0 = float(g0 @ d)
    if not dphi0 < 0:
        return None

    best = None  # (f, alpha, g) of the lowest Armijo-satisfying trial

    def trial(alpha):
        nonlocal best
        f, g = fun(x + alpha * d)
        if not _finite(f, g):
            return np.inf, None, np.nan
        if f <= f0 + c1 * alpha * dphi0 and (best is None or f < best[0]):
            best = (f, alpha, g)
        return f, g, float(g @ d)

    evals = 0
    a_prev, f_prev, dphi_prev = 0.0, f0, dphi0
    alpha = alpha0
    lo = hi = None
    while evals < max_evals:
        f, g, dphi = trial(alpha)
        evals += 1
        if g is None:
            # non-finite: shrink back toward the last good step
            lo, hi = (a_prev, f_prev, dphi_prev), (alpha, np.inf, np.nan)
            break
        if f > f0 + c1 * alpha * dphi0 or (evals > 1 and f >= f_prev):
            lo, hi = (a_prev, f_prev, dphi_prev), (alpha, f, dphi)
            break
        if abs(dphi) <= -c2 * dphi0:
            return alpha, f, g
        if dphi >= 0:
            lo, hi = (alpha, f, dphi), (a_prev, f_prev, dphi_prev)
            break
        a_prev, f_prev, dphi_prev = alpha, f, dphi
        alpha = min(alpha * 2.0, alpha + 1e4 * max(alpha, 1.0))
    else:
        return None if best is None else (best[1], best[0], best[2])

    # zoom: lo always satisfies Armijo and has the lower value
    while evals < max_evals:
        a_lo, f_lo, dp_lo = lo
        a_hi, f_hi, dp_hi = hi
        left, right = min(a_lo, a_hi), max(a_lo, a_hi)
        width = right - left
        if width <= 1e-16 * max(1.0, right):
            break
        if np.isfinite(f_hi) and np.isfinite(dp_hi):
            alpha = _cubic_min(a_lo, f_lo, dp_lo, a_hi, f_hi, dp_hi, left + 0.1 * width, right - 0.1 * width)
        else:
            alpha = left + 0.5 * width if a_lo == left else right - 0.5 * width
        f, g, dphi = trial(alpha)
        evals += 1
        if g is None or f > f0 + c1 * alpha * dphi0 or f >= f_lo:
            hi = (alpha, f, dphi)
            continue
        if abs(dphi) <= -c2 * dphi0:
            return alpha, f, g
        if dphi * (a_hi - a_lo) >= 0:
            hi = lo
        lo = (alpha, f, dphi)

    if best is None:
        return None
    return best[1], best[0], best[2]


def _two_loop(g, pairs):
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(pairs):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    if pairs:
        s, y, _ = pairs[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(pairs, reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return -q


def minimize(obj: Objective, x0, opts: OptimOptions | None = None, callback=None) -> OptimRun:
    """Minimize ``obj`` (returning ``(value, gradient)``) from ``x0`` with L-BFGS.

    One iteration is one accepted step. The run stops when the infinity norm
    of the gradient drops below ``opts.grad_tol``, after ``opts.max_iters``
    steps, or when the line search fails twice in a row (the second attempt
    uses the steepest-descent direction with a cleared memory).

    ``callback(iteration, x, value, grad)`` is called for iteration 0 and
    after every accepted step.
    """
    opts = opts or OptimOptions()
    fun = _Counted(obj)
    x = np.array(x0, dtype=float).ravel()
    f, g = fun(x)
    if not _finite(f, g) or g.shape != x.shape:
        raise ValueError("objective must return a finite value and a finite gradient matching x0")

    pairs: deque = deque(maxlen=opts.memory)
    trace = []

    def record(it):
        gi = float(np.max(np.abs(g)))
        snap = None
        if opts.snapshot_every and it % opts.snapshot_every == 0:
            snap = x.copy()
        trace.append(TraceRow(it, f, gi, snap))
        if callback is not None:
            callback(it, x, f, g)
        return gi

    it = 0
    g_inf = record(it)
    termination = Termination.MAX_ITERS
    while True:
        if g_inf < opts.grad_tol:
            termination = Termination.GRAD_TOL
            break
        if it >= opts.max_iters:
            termination = Termination.MAX_ITERS
            break

        result = None
        for attempt in ("lbfgs", "steepest"):
            if attempt == "steepest":
                if not pairs:
                    break  # direction was already steepest descent
                pairs.clear()
            d = _two_loop(g, list(pairs))
            if pairs:
                alpha0 = 1.0
            else:
                alpha0 = min(1.0, 1.0 / max(np.sum(np.abs(g)), 1e-300))
            if not d @ g < 0:
                continue
            result = strong_wolfe(fun, x, f, g, d, alpha0, opts.wolfe_c1, opts.wolfe_c2, opts.max_line_search)
            if result is not None:
                break
            log.debug("line search failed at iteration %d (%s direction)", it, attempt)
        if result is None:
            termination = Termination.LINE_SEARCH_FAILURE
            break

        alpha, f_new, g_new = result
        s = alpha * d
        y = g_new - g
        sy = float(s @ y)
        if sy > 1e-12 * np.linalg.norm(s) * np.linalg.norm(y):
            pairs.append((s, y, 1.0 / sy))
        x = x + s
        f, g = f_new, g_new
        it += 1
        g_inf = record(it)

    return OptimRun(x, f, g_inf, it, termination, trace, fun.calls)
