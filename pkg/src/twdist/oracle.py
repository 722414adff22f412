"""Brute-force reference computations used by the test suites.

Everything here is definition-level: distance matrices come straight from
library shortest-path routines over the raw adjacency, reports are row
maxima and pair sums, and range queries are linear scans.  By convention a
disagreement between these oracles and the main modules is a bug in the
main module.
"""

from __future__ import annotations

import os

import numpy as np

from .graph import (
    UNREACHABLE,
    DisconnectedGraphError,
    DistanceReport,
    Graph,
    distance_rows,
)

DEFAULT_ORACLE_LIMIT = 3000

# Floyd-Warshall is the plainest reference, but cubic; beyond this size the
# oracle switches to per-source Dijkstra rows.
_FLOYD_WARSHALL_LIMIT = 400


def _oracle_limit() -> int:
    env = os.environ.get("TWDIST_ORACLE_LIMIT")
    if env is None:
        return DEFAULT_ORACLE_LIMIT
    return int(env)


def apsp_oracle(g: Graph) -> np.ndarray:
    """Exact all-pairs distance matrix (int64, UNREACHABLE off-component)."""
    if g.n > _oracle_limit():
        raise ValueError(
            f"graph has {g.n} vertices, above the oracle limit {_oracle_limit()}"
            " (override with TWDIST_ORACLE_LIMIT)"
        )
    if g.n == 0:
        return np.empty((0, 0), dtype=np.int64)
    if g.n <= _FLOYD_WARSHALL_LIMIT:
        from scipy.sparse.csgraph import floyd_warshall

        mat = floyd_warshall(g.csr(), directed=False)
        out = np.full((g.n, g.n), UNREACHABLE, dtype=np.int64)
        finite = np.isfinite(mat)
        out[finite] = mat[finite].astype(np.int64)
        return out
    return distance_rows(g)


def report_oracle(g: Graph) -> DistanceReport:
    """Eccentricities, diameter, radius and Wiener index by definition."""
    if g.n == 0:
        raise ValueError("empty graph has no distance report")
    mat = apsp_oracle(g)
    if np.any(mat == UNREACHABLE):
        raise DisconnectedGraphError("graph is not connected")
    ecc = mat.max(axis=1)
    iu = np.triu_indices(g.n, k=1)
    wiener = int(mat[iu].sum())
    return DistanceReport.from_eccentricities(ecc.tolist(), wiener)


def range_query_oracle(points, box, monoid):
    """Fold the monoid over every point inside the closed box."""
    acc = monoid.identity()
    for p in points:
        inside = all(lo <= c <= hi for c, (lo, hi) in zip(p.coords, box.bounds))
        if inside:
            acc = monoid.combine(acc, p.value)
    return acc
