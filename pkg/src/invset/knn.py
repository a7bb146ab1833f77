"""Exact k-nearest-neighbour queries with a deterministic tie-break.

The spatial index is scipy's balanced kd-tree (median split on the widest
coordinate). On top of it every result is re-ranked by ``(squared distance,
index)`` and any query whose k-th and (k+1)-th candidates are tied falls
back to an exhaustive scan, so results coincide with brute force including
the smallest-index rule.
"""

from __future__ import annotations

import numpy as np
from scipy.spatial import cKDTree

LEAF_SIZE = 8
# relative gap below which the k-th/(k+1)-th candidates count as tied
_TIE_RTOL = 1e-12


def _sq_dists(Y: np.ndarray, X: np.ndarray, idx: np.ndarray) -> np.ndarray:
    return ((Y[:, None, :] - X[idx]) ** 2).sum(axis=-1)


def brute_force_knn(X: np.ndarray, Y: np.ndarray, k: int):
    """Exhaustive k-NN of each row of ``Y`` among rows of ``X``.

    Returns ``(indices, squared_distances)``, each of shape ``(len(Y), k)``,
    ordered by distance then by index.
    """
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    n = X.shape[0]
    all_idx = np.broadcast_to(np.arange(n), (Y.shape[0], n))
    sq = _sq_dists(Y, X, all_idx)
    order = np.argsort(sq, axis=1, kind="stable")[:, :k]
    return order, np.take_along_axis(sq, order, axis=1)


class NeighborTree:
    """Immutable k-NN index over a snapshot of a point cloud."""

    def __init__(self, X):
        from .geometry import as_points

        pts = np.array(as_points(X), dtype=float)
        pts.setflags(write=False)
        self.source = pts
        self._tree = cKDTree(pts, leafsize=LEAF_SIZE, balanced_tree=True, compact_nodes=True)

    @property
    def n(self) -> int:
        return self.source.shape[0]

    @property
    def dim(self) -> int:
        return self.source.shape[1]

    def query(self, Y, k: int = 1):
        """Return ``(indices, squared_distances)`` of the ``k`` nearest points.

        ``Y`` may be a single point (shape ``(d,)``) or a batch ``(q, d)``;
        the output has shape ``(k,)`` or ``(q, k)`` accordingly. Rows are in
        ascending distance with ties broken by the smaller index. The query
        point itself is not excluded.
        """
        k = int(k)
        if not 1 <= k <= self.n:
            raise ValueError(f"k must lie in [1, {self.n}], got {k}")
        Y = np.asarray(Y, dtype=float)
        single = Y.ndim == 0 or (Y.ndim == 1 and Y.shape[0] == self.dim)
        if single:
            Y = Y.reshape(1, -1)
        elif Y.ndim == 1 and self.dim == 1:
            Y = Y[:, None]
        if Y.ndim != 2 or Y.shape[1] != self.dim:
            raise ValueError(f"query points of shape {Y.shape} do not match tree dimension {self.dim}")

        if k == self.n:
            idx, sq = brute_force_knn(self.source, Y, k)
        else:
            idx, sq = self._query_tree(Y, k)
        if single:
            return idx[0], sq[0]
        return idx, sq

    def _query_tree(self, Y: np.ndarray, k: int):
        X = self.source
        _, cand = self._tree.query(Y, k=k + 1)
        cand = np.asarray(cand, dtype=np.intp).reshape(Y.shape[0], k + 1)
        sq = _sq_dists(Y, X, cand)
        order = np.lexsort((cand, sq), axis=-1)
        cand = np.take_along_axis(cand, order, axis=1)
        sq = np.take_along_axis(sq, order, axis=1)

        kth, nxt = sq[:, k - 1], sq[:, k]
        tied = nxt <= kth * (1.0 + _TIE_RTOL) + 1e-300
        for row in np.flatnonzero(tied):
            cand[row, :k], sq[row, :k] = self._resolve_tie(Y[row], k, nxt[row])
        return cand[:, :k], sq[:, :k]

    def _resolve_tie(self, y: np.ndarray, k: int, bound: float):
        # every point ranked among the first k lies within the (k+1)-th distance
        radius = np.sqrt(bound) * (1.0 + 1e-9) + 1e-150
        idx = np.array(sorted(self._tree.query_ball_point(y, radius)), dtype=np.intp)
        if idx.size < k:
            bi, bs = brute_force_knn(self.source, y[None, :], k)
            return bi[0], bs[0]
        sq = ((self.source[idx] - y) ** 2).sum(axis=1)
        order = np.lexsort((idx, sq))[:k]
        return idx[order], sq[order]

    def min_sq_dists(self, Y) -> np.ndarray:
        """Squared distance from each row of ``Y`` to its nearest source point.

        Cheaper than ``query(Y, 1)`` because the winning index (and hence the
        tie-break) is not needed.
        """
        Y = np.asarray(Y, dtype=float).reshape(-1, self.dim)
        _, idx = self._tree.query(Y, k=1)
        return ((Y - self.source[idx]) ** 2).sum(axis=1)
