"""Graph container, edge canonicalization, and normalized adjacency."""

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings

from mvge.graph import (
    Graph,
    NormalizedAdjacency,
    ValidationError,
    canonicalize_edges,
    normalized_adjacency,
)

from conftest import edge_lists


def test_triangle_degrees(triangle):
    assert triangle.degrees.tolist() == [2, 2, 2]
    assert triangle.num_edges == 3


def test_duplicate_and_reversed_edges_collapse():
    g, rep = Graph.from_edges(2, [(0, 1), (1, 0), (0, 1)])
    assert g.num_edges == 1
    assert rep.duplicates_dropped == 2
    # one undirected edge stored as two directed entries
    assert g.neighbors.size == 2
    assert g.neighbors_of(0).tolist() == [1]
    assert g.neighbors_of(1).tolist() == [0]


def test_self_loops_dropped():
    g, rep = Graph.from_edges(3, [(0, 0), (0, 1), (2, 2)])
    assert rep.self_loops_dropped == 2
    assert g.num_edges == 1


def test_out_of_range_node_rejected():
    with pytest.raises(ValidationError):
        Graph.from_edges(3, [(0, 3)])
    with pytest.raises(ValidationError):
        Graph.from_edges(3, [(-1, 0)])


def test_canonicalize_orders_within_pair():
    out, rep = canonicalize_edges(np.array([[2, 0], [1, 2]]), num_nodes=3)
    assert out.tolist() == [[0, 2], [1, 2]]
    assert rep.self_loops_dropped == 0 and rep.duplicates_dropped == 0


def test_neighbors_sorted_and_csr_consistent():
    g, _ = Graph.from_edges(5, [(3, 1), (3, 0), (3, 4), (0, 1)])
    assert g.neighbors_of(3).tolist() == [0, 1, 4]
    assert g.offsets[-1] == g.neighbors.size
    g.validate()


def test_edge_array_is_canonical():
    g, _ = Graph.from_edges(4, [(2, 1), (3, 0)])
    ea = g.edge_array()
    assert ea.tolist() == [[0, 3], [1, 2]]
    assert np.all(ea[:, 0] < ea[:, 1])


def test_has_edge_mask_accepts_either_order(triangle):
    u = np.array([0, 1, 0, 2])
    v = np.array([1, 0, 2, 1])
    assert triangle.has_edge_mask(u, v).all()
    assert not triangle.has_edge_mask(np.array([0]), np.array([0]))[0]


def test_single_node_adjacency_is_identity(single_node):
    s = normalized_adjacency(single_node)
    rows, cols, vals = s.triples()
    assert rows.tolist() == [0]
    assert cols.tolist() == [0]
    assert vals.tolist() == [1.0]


def test_one_edge_adjacency_weights():
    g, _ = Graph.from_edges(2, [(0, 1)])
    s = normalized_adjacency(g)
    dense = s.matrix.toarray()
    # both nodes have degree 1, every entry is 1/(1+1)
    assert np.allclose(dense, 0.5)


def test_path_adjacency_off_diagonal():
    g, _ = Graph.from_edges(3, [(0, 1), (1, 2)])
    s = normalized_adjacency(g)
    dense = s.matrix.toarray()
    # deg(0)=1, deg(1)=2 so the 0-1 weight is 1/sqrt(2*3)
    assert dense[0, 1] == pytest.approx(1.0 / np.sqrt(6.0))
    assert dense[1, 0] == pytest.approx(1.0 / np.sqrt(6.0))
    assert dense[0, 2] == 0.0


def test_regular_graph_rows_sum_to_one(triangle):
    s = normalized_adjacency(triangle)
    sums = np.asarray(s.matrix.sum(axis=1)).ravel()
    assert np.allclose(sums, 1.0)


def test_adjacency_row_sum_formula():
    g, _ = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2)])
    s = normalized_adjacency(g)
    deg = g.degrees.astype(np.float64)
    sums = np.asarray(s.matrix.sum(axis=1)).ravel()
    for v in range(4):
        expected = 1.0 / (deg[v] + 1.0)
        for u in g.neighbors_of(v):
            expected += 1.0 / np.sqrt((deg[v] + 1.0) * (deg[u] + 1.0))
        assert sums[v] == pytest.approx(expected)


def test_adjacency_matmul_matches_scipy(triangle):
    s = normalized_adjacency(triangle)
    x = np.arange(6, dtype=np.float64).reshape(3, 2)
    assert np.allclose(s @ x, s.matrix @ x)


def test_normalized_adjacency_triples_sorted(star5):
    rows, cols, vals = normalized_adjacency(star5).triples()
    assert np.all(np.diff(rows) >= 0)
    same_row = np.diff(rows) == 0
    assert np.all(np.diff(cols)[same_row] > 0)
    assert vals.shape == rows.shape == cols.shape


@given(edge_lists())
@settings(max_examples=60, deadline=None)
def test_from_edges_roundtrip_properties(ne):
    n, edges = ne
    g, _ = Graph.from_edges(n, edges)
    g.validate()
    # symmetry: u in N(v) iff v in N(u)
    for v in range(n):
        for u in g.neighbors_of(v):
            assert v in g.neighbors_of(u)
    # degrees consistent with CSR widths
    assert g.degrees.sum() == g.neighbors.size
    assert g.num_edges * 2 == g.neighbors.size


@given(edge_lists())
@settings(max_examples=40, deadline=None)
def test_normalized_adjacency_symmetric(ne):
    n, edges = ne
    g, _ = Graph.from_edges(n, edges)
    m = normalized_adjacency(g).matrix
    assert (abs(m - m.T) > 1e-12).nnz == 0
    assert np.allclose(m.diagonal(), 1.0 / (g.degrees + 1.0))
