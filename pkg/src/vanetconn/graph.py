"""Adjacency/Laplacian construction and the connectivity deciders.

The spectral decider follows the Laplacian route: the number of zero
eigenvalues equals the number of connected components, so a graph is
connected exactly when the second-smallest eigenvalue (the algebraic
connectivity) is positive.  A disjoint-set count over the same edges serves
as the exact combinatorial oracle, since "zero" needs a tolerance in floating
point.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

__all__ = [
    "GraphMatrices",
    "UnionFind",
    "matrices_from_adjacency",
    "adjacency_from_snr",
    "laplacian_eigenvalues",
    "algebraic_connectivity",
    "count_partitions_eigen",
    "count_partitions_unionfind",
    "is_connected",
    "dump_matrices",
]

_RELATIVE_ZERO_TOL = 1e-8


@dataclass(frozen=True)
class GraphMatrices:
    """Adjacency, degree vector and Laplacian of one snapshot.

    Stored as integer arrays so Laplacian row sums are exactly zero before any
    eigensolve; the arrays are locked read-only after construction.
    """

    adjacency: np.ndarray
    degrees: np.ndarray
    laplacian: np.ndarray

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


def matrices_from_adjacency(adjacency: np.ndarray) -> GraphMatrices:
    """Validate a 0/1 adjacency matrix and derive degrees and Laplacian."""
    a = np.asarray(adjacency)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"adjacency must be square, got shape {a.shape}")
    if a.shape[0] < 2:
        raise ValueError("need at least two nodes")
    a = a.astype(np.int64)
    if not np.array_equal(a, a.T):
        raise ValueError("adjacency must be symmetric (undirected graph)")
    if np.any(np.diagonal(a) != 0):
        raise ValueError("adjacency must have a zero diagonal (no self-loops)")
    if not np.all((a == 0) | (a == 1)):
        raise ValueError("adjacency entries must be 0 or 1")
    degrees = a.sum(axis=1)
    laplacian = np.diag(degrees) - a
    for arr in (a, degrees, laplacian):
        arr.flags.writeable = False
    return GraphMatrices(adjacency=a, degrees=degrees, laplacian=laplacian)


def adjacency_from_snr(snr: np.ndarray, psi: float) -> GraphMatrices:
    """Threshold a symmetric SNR matrix: an edge exists where snr >= psi."""
    s = np.asarray(snr, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"SNR matrix must be square, got shape {s.shape}")
    if not np.array_equal(s, s.T):
        raise ValueError("SNR matrix must be symmetric (channel reciprocity)")
    if not psi > 0:
        raise ValueError(f"threshold must be > 0, got {psi!r}")
    adjacency = (s >= psi).astype(np.int64)
    np.fill_diagonal(adjacency, 0)
    return matrices_from_adjacency(adjacency)


def laplacian_eigenvalues(g: GraphMatrices) -> np.ndarray:
    """All Laplacian eigenvalues, ascending; raises on eigensolver failure."""
    return np.linalg.eigvalsh(g.laplacian.astype(float))


def algebraic_connectivity(g: GraphMatrices) -> float:
    """Second-smallest Laplacian eigenvalue; positive iff the graph is connected."""
    return float(laplacian_eigenvalues(g)[1])


def _zero_tolerance(eigenvalues: np.ndarray, zero_tol: float | None) -> float:
    if zero_tol is not None:
        return zero_tol
    return _RELATIVE_ZERO_TOL * max(1.0, float(eigenvalues[-1]))


def count_partitions_eigen(g: GraphMatrices, zero_tol: float | None = None) -> int:
    """Number of connected components as the count of (near-)zero eigenvalues."""
    eigenvalues = laplacian_eigenvalues(g)
    tol = _zero_tolerance(eigenvalues, zero_tol)
    return int(np.count_nonzero(np.abs(eigenvalues) < tol))


def count_partitions_unionfind(g: GraphMatrices) -> int:
    """Exact component count by disjoint-set union over the edges."""
    uf = UnionFind(g.n)
    rows, cols = np.nonzero(np.triu(g.adjacency, k=1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        uf.union(i, j)
    return uf.n_components


def is_connected(g: GraphMatrices, zero_tol: float | None = None) -> bool:
    """Spectral connectivity decision: algebraic connectivity above the zero tolerance."""
    eigenvalues = laplacian_eigenvalues(g)
    return float(eigenvalues[1]) > _zero_tolerance(eigenvalues, zero_tol)


def dump_matrices(g: GraphMatrices, directory: str, stem: str = "graph") -> tuple[str, str]:
    """Write adjacency and Laplacian as space-separated text files for inspection."""
    os.makedirs(directory, exist_ok=True)
    adjacency_path = os.path.join(directory, f"{stem}_adjacency.txt")
    laplacian_path = os.path.join(directory, f"{stem}_laplacian.txt")
    np.savetxt(adjacency_path, g.adjacency, fmt="%d")
    np.savetxt(laplacian_path, g.laplacian, fmt="%d")
    return adjacency_path, laplacian_path


class UnionFind:
    """Disjoint-set forest with path compression and union by size."""

    def __init__(self, size: int):
        if size < 1:
            raise ValueError("size must be >= 1")
        self.parent = list(range(size))
        self.size = [1] * size
        self.n_components = size

    def find(self, i: int) -> int:
        root = i
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[i] != root:
            self.parent[i], i = root, self.parent[i]
        return root

    def union(self, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if self.size[ri] < self.size[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        self.size[ri] += self.size[rj]
        self.n_components -= 1
        return True
