import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import TWO_TRIANGLES, random_graph
from hsrl.graph import (
    EdgeListParseError,
    Graph,
    GraphError,
    load_edge_list,
    total_weight,
    weighted_degree,
    write_dot,
    write_edge_list,
)


def test_load_simple_path():
    g = load_edge_list("a b\nb c")
    assert g.node_count == 3
    assert g.edge_count == 2
    assert g.labels == ("a", "b", "c")
    assert list(g.edges[2]) == [1.0, 1.0]


def test_duplicate_reversed_edges_merge():
    g = load_edge_list("a b 2\nb a 3")
    assert g.edge_count == 1
    assert g.edges[2][0] == 5.0


@pytest.mark.parametrize(
    "text, lineno",
    [
        ("a b -1", 1),
        ("a b\nb c x", 2),
        ("# header\na b c d", 2),
        ("a\n", 1),
    ],
)
def test_parse_errors_carry_line_number(text, lineno):
    with pytest.raises(EdgeListParseError) as exc:
        load_edge_list(text)
    assert exc.value.lineno == lineno


def test_empty_input_rejected():
    with pytest.raises(GraphError):
        load_edge_list("# only a comment\n\n")


def test_default_weight_and_comments():
    g = load_edge_list("# c\nx y\n\ny z 0.5\n", default_weight=2.0)
    assert sorted(g.edges[2].tolist()) == [0.5, 2.0]


def test_fixed_node_mapping_keeps_isolated_nodes():
    g = load_edge_list("a b\n", nodes=["a", "b", "c"])
    assert g.node_count == 3
    assert weighted_degree(g, 2) == 0.0
    with pytest.raises(EdgeListParseError):
        load_edge_list("a z\n", nodes=["a", "b"])


def test_weighted_degree_examples():
    assert weighted_degree(Graph.from_edges(2, [(0, 1)]), 0) == 1.0
    g = Graph.from_edges(3, [(0, 0, 3.0), (0, 1, 1.0)])
    assert weighted_degree(g, 0) == 7.0
    assert weighted_degree(g, 2) == 0.0
    with pytest.raises(GraphError):
        weighted_degree(g, 3)


def test_total_weight_examples():
    assert total_weight(Graph.from_edges(2, [(0, 1)])) == 1.0
    assert total_weight(Graph.from_edges(6, TWO_TRIANGLES)) == 7.0
    loop = Graph.from_edges(1, [(0, 0, 3.0)])
    assert total_weight(loop) == 3.0
    assert weighted_degree(loop, 0) == 6.0
    with pytest.raises(GraphError):
        total_weight(Graph(3, [], []))


def test_adjacency_is_symmetric(two_triangles):
    for u in range(6):
        for v, w in two_triangles.neighbors(u):
            assert (u, w) in two_triangles.neighbors(v)


def test_negative_or_out_of_range_edges_rejected():
    with pytest.raises(GraphError):
        Graph(2, [0], [1], [-1.0])
    with pytest.raises(GraphError):
        Graph(2, [0], [2])


def test_transition_csr_drops_self_loops():
    g = Graph.from_edges(3, [(0, 0, 2.0), (0, 1), (1, 2), (2, 2)])
    indptr, indices, weights = g.transition_csr()
    assert indices[indptr[0]:indptr[1]].tolist() == [1]
    assert indices[indptr[2]:indptr[3]].tolist() == [1]


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 25), st.floats(0.05, 0.9), st.integers(0, 10_000), st.booleans())
def test_half_degree_sum_equals_total_weight(n, p, seed, loops):
    g = random_graph(n, p, seed, weighted=True, loops=loops)
    if g.edge_count == 0:
        return
    assert abs(0.5 * sum(weighted_degree(g, i) for i in range(n)) - total_weight(g)) < 1e-9


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 8), st.integers(0, 8), st.integers(1, 5)), min_size=1, max_size=30),
       st.randoms(use_true_random=False))
def test_load_is_order_invariant(edges, rnd):
    text = "\n".join(f"n{u} n{v} {w}" for u, v, w in edges)
    shuffled = list(edges)
    rnd.shuffle(shuffled)
    flipped = [(v, u, w) if rnd.random() < 0.5 else (u, v, w) for u, v, w in shuffled]
    other = "\n".join(f"n{u} n{v} {w}" for u, v, w in flipped)

    def by_label(g):
        u, v, w = g.edges
        return {tuple(sorted((g.label(a), g.label(b)))): x for a, b, x in zip(u, v, w)}

    a, b = load_edge_list(text), load_edge_list(other)
    assert set(a.labels) == set(b.labels)
    assert by_label(a) == by_label(b)


def test_edge_list_round_trip(tmp_path):
    g = load_edge_list("a b 2.5\nb c\nc c 4\nd a 1e-3\n")
    path = tmp_path / "g.edges"
    write_edge_list(g, path)
    h = load_edge_list(str(path))
    assert sorted(h.labels) == sorted(g.labels)
    assert h == load_edge_list(str(path), nodes=h.labels)
    # fixing the id mapping to the original labels gives back the same graph
    assert load_edge_list(str(path), nodes=g.labels) == g


def test_dot_output(two_triangles):
    buf = io.StringIO()
    write_dot(two_triangles, buf)
    text = buf.getvalue()
    assert text.startswith("graph G {")
    assert text.count(" -- ") == 7
    assert '"2" -- "3" [weight=1];' in text


def test_graph_arrays_are_read_only(two_triangles):
    with pytest.raises(ValueError):
        two_triangles.edges[2][0] = 9.0
    assert np.all(two_triangles.degrees >= 0)
