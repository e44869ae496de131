"""Weighted sensor-network graphs, their Laplacians and cheap spectral bounds.

The graphs used throughout the package are undirected, weighted and free of
self-loops.  Random geometric graphs follow the thresholded Gaussian kernel
construction used for wireless sensor networks: nodes are dropped uniformly
in the unit square and nearby nodes are linked with weight
``exp(-d**2 / (2 * sigma**2))``.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

__all__ = [
    "WeightedGraph",
    "build_geometric_graph",
    "laplacian",
    "normalized_laplacian",
    "lambda_max_bound",
    "gershgorin_bound",
    "is_connected",
    "smoothness",
    "save_graph",
    "load_graph",
    "save_signal",
    "load_signal",
]


@dataclass(frozen=True)
class WeightedGraph:
    """Undirected weighted graph with optional planar node coordinates.

    ``edges`` is an ``(E, 3)`` float array of ``(m, n, weight)`` rows with
    ``m < n``, sorted lexicographically.
    """

    node_count: int
    edges: np.ndarray
    coords: Optional[np.ndarray] = None
    _adjacency: sp.csr_matrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n = int(self.node_count)
        if n < 1:
            raise ValueError("node_count must be positive")
        edges = np.asarray(self.edges, dtype=float).reshape(-1, 3)
        if len(edges):
            i = edges[:, 0].astype(np.int64)
            j = edges[:, 1].astype(np.int64)
            w = edges[:, 2]
            if np.any(i == j):
                raise ValueError("self-loops are not allowed")
            if np.any(w <= 0):
                raise ValueError("edge weights must be positive")
            if i.min() < 0 or max(i.max(), j.max()) >= n:
                raise ValueError("edge endpoint out of range")
            lo, hi = np.minimum(i, j), np.maximum(i, j)
            order = np.lexsort((hi, lo))
            lo, hi, w = lo[order], hi[order], w[order]
            key = lo * n + hi
            if np.any(np.diff(key) == 0):
                raise ValueError("duplicate edge")
            edges = np.column_stack([lo, hi, w]).astype(float)
        object.__setattr__(self, "node_count", n)
        object.__setattr__(self, "edges", edges)
        if self.coords is not None:
            coords = np.asarray(self.coords, dtype=float)
            if coords.shape != (n, 2):
                raise ValueError("coords must have shape (node_count, 2)")
            object.__setattr__(self, "coords", coords)
        lo = edges[:, 0].astype(np.int64)
        hi = edges[:, 1].astype(np.int64)
        w = edges[:, 2]
        W = sp.coo_matrix(
            (np.concatenate([w, w]), (np.concatenate([lo, hi]), np.concatenate([hi, lo]))),
            shape=(n, n),
        ).tocsr()
        W.sort_indices()
        object.__setattr__(self, "_adjacency", W)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def adjacency(self) -> sp.csr_matrix:
        """Symmetric sparse weight matrix ``W``."""
        return self._adjacency.copy()

    @property
    def degrees(self) -> np.ndarray:
        return np.asarray(self._adjacency.sum(axis=1)).ravel()

    def neighbors(self, n: int) -> np.ndarray:
        """Sorted neighbor ids of node ``n``."""
        W = self._adjacency
        return W.indices[W.indptr[n]:W.indptr[n + 1]].copy()


def build_geometric_graph(
    n: int,
    sigma: float,
    kappa: float,
    seed=None,
    threshold: str = "weight",
) -> WeightedGraph:
    """Random geometric sensor graph with thresholded Gaussian weights.

    Parameters
    ----------
    n : int
        Number of sensors, placed uniformly at random in ``[0, 1]^2``.
    sigma : float
        Gaussian kernel width.
    kappa : float
        Threshold.  With ``threshold="weight"`` (default) an edge is kept iff
        its weight is at least ``kappa``; with ``threshold="distance"`` iff the
        node separation is at most ``kappa``.
    seed : int or numpy.random.Generator, optional
        Seed or generator used to draw coordinates.
    threshold : {"weight", "distance"}

    Returns
    -------
    WeightedGraph
        Possibly disconnected; see :func:`is_connected`.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    coords = rng.uniform(0.0, 1.0, size=(n, 2))
    return geometric_graph_from_coords(coords, sigma, kappa, threshold=threshold)


def geometric_graph_from_coords(coords, sigma: float, kappa: float,
                                threshold: str = "weight") -> WeightedGraph:
    """Thresholded Gaussian kernel graph on fixed coordinates."""
    coords = np.asarray(coords, dtype=float)
    n = len(coords)
    if threshold == "weight":
        if not 0 < kappa < 1:
            raise ValueError("weight threshold must lie in (0, 1)")
        radius = sigma * np.sqrt(2.0 * np.log(1.0 / kappa))
    elif threshold == "distance":
        if kappa <= 0:
            raise ValueError("distance threshold must be positive")
        radius = kappa
    else:
        raise ValueError(f"unknown threshold mode {threshold!r}")

    # candidate pairs with a small radius margin; the exact test follows
    pairs = cKDTree(coords).query_pairs(radius * (1 + 1e-9) + 1e-12, output_type="ndarray")
    if len(pairs) == 0:
        return WeightedGraph(n, np.empty((0, 3)), coords)
    pairs = np.sort(pairs, axis=1)
    d2 = np.sum((coords[pairs[:, 0]] - coords[pairs[:, 1]]) ** 2, axis=1)
    w = np.exp(-d2 / (2.0 * sigma**2))
    keep = w >= kappa if threshold == "weight" else np.sqrt(d2) <= kappa
    pairs, w = pairs[keep], w[keep]
    edges = np.column_stack([pairs, w]).astype(float)
    return WeightedGraph(n, edges, coords)


def laplacian(g: WeightedGraph) -> sp.csr_matrix:
    """Combinatorial Laplacian ``L = D - W`` in CSR form with sorted indices."""
    W = g.adjacency
    L = (sp.diags(g.degrees) - W).tocsr()
    L.sort_indices()
    return L


def normalized_laplacian(g: WeightedGraph) -> sp.csr_matrix:
    """Symmetric normalized Laplacian ``D^{-1/2} L D^{-1/2}``."""
    d = g.degrees
    if np.any(d <= 0):
        raise ValueError("zero-degree node")
    s = sp.diags(1.0 / np.sqrt(d))
    Ln = (s @ laplacian(g) @ s).tocsr()
    Ln.sort_indices()
    return Ln


def lambda_max_bound(m, g: WeightedGraph) -> float:
    """Anderson-Morley bound ``max{d(m) + d(n) : m ~ n}`` on the Laplacian spectrum.

    ``m`` is the Laplacian itself; only the graph degrees enter the bound, so
    every node can compute it from neighbor degrees alone.
    """
    if g.edge_count == 0:
        return 0.0
    d = g.degrees
    i = g.edges[:, 0].astype(np.int64)
    j = g.edges[:, 1].astype(np.int64)
    return float(np.max(d[i] + d[j]))


def gershgorin_bound(p) -> float:
    """Upper bound on the spectral radius of ``p`` from absolute row sums."""
    p = sp.csr_matrix(p)
    return float(np.max(np.asarray(abs(p).sum(axis=1)).ravel()))


def is_connected(g: WeightedGraph) -> bool:
    if g.node_count == 1:
        return True
    ncomp, _ = connected_components(g.adjacency, directed=False)
    return ncomp == 1


def smoothness(m, f, r: int = 1) -> float:
    """Quadratic form ``f^T M^r f`` via ``r`` sparse mat-vec products."""
    if r < 1:
        raise ValueError("r must be a positive integer")
    f = np.asarray(f, dtype=float)
    x = f
    for _ in range(int(r)):
        x = m @ x
    return float(f @ x)


# --- file formats -----------------------------------------------------------

def _g17(x: float) -> str:
    return format(float(x), ".17g")


def save_graph(g: WeightedGraph, path) -> None:
    """Write ``{n, coords, edges}`` JSON with 0-based node ids."""
    payload = {
        "n": g.node_count,
        "coords": None if g.coords is None else [[float(x), float(y)] for x, y in g.coords],
        "edges": [[int(m), int(n), float(w)] for m, n, w in g.edges],
    }
    # json emits shortest round-trip reprs, which are exact
    Path(path).write_text(json.dumps(payload))


def load_graph(path) -> WeightedGraph:
    payload = json.loads(Path(path).read_text())
    coords = payload.get("coords")
    edges = payload.get("edges") or []
    return WeightedGraph(int(payload["n"]), np.asarray(edges, dtype=float).reshape(-1, 3),
                         None if coords is None else np.asarray(coords, dtype=float))


def save_signal(f: Sequence[float], path) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("value\n")
        for v in np.asarray(f, dtype=float):
            fh.write(_g17(v) + "\n")


def load_signal(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if [h.strip() for h in header] != ["value"]:
            raise ValueError(f"{path}: expected header 'value'")
        return np.array([float(row[0]) for row in reader if row], dtype=float)
