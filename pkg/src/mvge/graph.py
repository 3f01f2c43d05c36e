"""Undirected graph in compressed sparse row form plus the symmetrically
normalized propagation operator used by the GCN branch."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp


class ValidationError(ValueError):
    """Raised when input data violates a structural contract."""


@dataclass(frozen=True)
class EdgeRepairs:
    """Counts of repairs applied while canonicalizing an edge list."""

    self_loops_dropped: int = 0
    duplicates_dropped: int = 0


def canonicalize_edges(edges: np.ndarray, num_nodes: int) -> tuple[np.ndarray, EdgeRepairs]:
    """Symmetrize an edge list, dropping self-loops and duplicates.

    ``edges`` is an (E, 2) integer array of directed or undirected entries.
    Returns the unique undirected pairs as an (M, 2) array with u < v in
    each row, sorted lexicographically, together with repair counts.
    Duplicate count is in undirected pairs (an edge listed in both
    directions counts as one duplicate).
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if edges.size and (edges.min() < 0 or edges.max() >= num_nodes):
        raise ValidationError(
            f"edge endpoint out of range [0, {num_nodes}): "
            f"found {int(edges.min())}..{int(edges.max())}"
        )
    loops = edges[:, 0] == edges[:, 1]
    n_loops = int(loops.sum())
    edges = edges[~loops]
    lo = np.minimum(edges[:, 0], edges[:, 1])
    hi = np.maximum(edges[:, 0], edges[:, 1])
    pairs = np.unique(np.stack([lo, hi], axis=1), axis=0) if len(lo) else np.empty((0, 2), np.int64)
    n_dup = len(edges) - len(pairs)
    return pairs, EdgeRepairs(self_loops_dropped=n_loops, duplicates_dropped=n_dup)


@dataclass(frozen=True)
class Graph:
    """Undirected, unweighted graph stored as CSR adjacency.

    ``offsets`` has length num_nodes + 1; ``neighbors[offsets[v]:offsets[v+1]]``
    lists v's neighbors in ascending order. Every undirected edge is stored
    in both directions; self-loops and duplicates are rejected.
    """

    num_nodes: int
    offsets: np.ndarray
    neighbors: np.ndarray

    def __post_init__(self):
        self.offsets.setflags(write=False)
        self.neighbors.setflags(write=False)

    @classmethod
    def from_edges(
        cls, num_nodes: int, edges: np.ndarray
    ) -> tuple["Graph", EdgeRepairs]:
        """Build a graph from a raw (possibly dirty) edge list.

        Self-loops are dropped and duplicate/bidirectional entries collapse
        to a single undirected edge; the applied repairs are returned.
        """
        if num_nodes < 0:
            raise ValidationError("num_nodes must be non-negative")
        pairs, repairs = canonicalize_edges(edges, num_nodes)
        directed = np.concatenate([pairs, pairs[:, ::-1]], axis=0)
        order = np.lexsort((directed[:, 1], directed[:, 0]))
        directed = directed[order]
        counts = np.bincount(directed[:, 0], minlength=num_nodes)
        offsets = np.zeros(num_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=offsets[1:])
        return cls(num_nodes, offsets, np.ascontiguousarray(directed[:, 1])), repairs

    def validate(self) -> None:
        """Check the CSR invariants; raises ValidationError on violation."""
        if len(self.offsets) != self.num_nodes + 1:
            raise ValidationError("offsets length must be num_nodes + 1")
        if np.any(np.diff(self.offsets) < 0):
            raise ValidationError("offsets must be non-decreasing")
        if self.offsets[0] != 0 or self.offsets[-1] != len(self.neighbors):
            raise ValidationError("offsets must span the neighbor array")
        if len(self.neighbors) and (
            self.neighbors.min() < 0 or self.neighbors.max() >= self.num_nodes
        ):
            raise ValidationError("neighbor id out of range")
        for v in range(self.num_nodes):
            nb = self.neighbors_of(v)
            if np.any(nb == v):
                raise ValidationError(f"self-loop at node {v}")
            if np.any(np.diff(nb) <= 0):
                raise ValidationError(f"neighbor list of node {v} not strictly increasing")
        # symmetry check via sorted directed pair sets, O(E log E)
        src = np.repeat(np.arange(self.num_nodes), np.diff(self.offsets))
        fwd = src * self.num_nodes + self.neighbors
        rev = self.neighbors * self.num_nodes + src
        if not np.array_equal(np.sort(fwd), np.sort(rev)):
            raise ValidationError("adjacency is not symmetric")

    def neighbors_of(self, v: int) -> np.ndarray:
        return self.neighbors[self.offsets[v] : self.offsets[v + 1]]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return len(self.neighbors) // 2

    def edge_array(self) -> np.ndarray:
        """Undirected edges as an (E, 2) array with u < v, sorted."""
        src = np.repeat(np.arange(self.num_nodes), np.diff(self.offsets))
        mask = src < self.neighbors
        return np.stack([src[mask], self.neighbors[mask]], axis=1)

    def has_edge_mask(self, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Vectorized membership test for node pairs."""
        keys = self._edge_keys()
        q = np.minimum(u, v) * self.num_nodes + np.maximum(u, v)
        idx = np.searchsorted(keys, q)
        idx = np.clip(idx, 0, max(len(keys) - 1, 0))
        return (len(keys) > 0) & (keys[idx] == q) & (u != v)

    def _edge_keys(self) -> np.ndarray:
        cached = getattr(self, "_keys_cache", None)
        if cached is None:
            e = self.edge_array()
            cached = np.sort(e[:, 0] * self.num_nodes + e[:, 1])
            object.__setattr__(self, "_keys_cache", cached)
        return cached


@dataclass(frozen=True)
class NormalizedAdjacency:
    """Sparse operator D^{-1/2} (A + I) D^{-1/2} with D = deg + 1.

    Stored as a scipy CSR matrix with sorted indices, so the (row, col,
    weight) triples have a deterministic order.
    """

    matrix: sp.csr_matrix

    @property
    def num_nodes(self) -> int:
        return self.matrix.shape[0]

    def triples(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        m = self.matrix
        rows = np.repeat(np.arange(m.shape[0]), np.diff(m.indptr))
        return rows, m.indices.copy(), m.data.copy()

    def __matmul__(self, other: np.ndarray) -> np.ndarray:
        return self.matrix @ other


def normalized_adjacency(g: Graph) -> NormalizedAdjacency:
    """Build the symmetrically normalized operator over A + I.

    Isolated nodes get only the diagonal entry with weight 1.
    """
    n = g.num_nodes
    src = np.repeat(np.arange(n), np.diff(g.offsets))
    a = sp.csr_matrix(
        (np.ones(len(src)), (src, g.neighbors)), shape=(n, n), dtype=np.float64
    )
    a_tilde = a + sp.identity(n, dtype=np.float64, format="csr")
    dinv = 1.0 / np.sqrt(g.degrees + 1.0)
    s = sp.diags(dinv) @ a_tilde @ sp.diags(dinv)
    s = sp.csr_matrix(s)
    s.sort_indices()
    return NormalizedAdjacency(s)
