import numpy as np
import pytest
from hypothesis import given, strategies as st

from rgraph.errors import GraphFormatError, ValidationError
from rgraph.graph import Graph, degrees, load_graph, read_graph, save_graph, write_graph

from conftest import graphs


def test_degrees_of_small_graphs():
    assert degrees(Graph.empty(4)).tolist() == [0, 0, 0, 0]
    assert degrees(Graph.complete(4)).tolist() == [3, 3, 3, 3]
    assert degrees(Graph.from_edges(3, [(0, 1), (1, 2)])).tolist() == [1, 2, 1]


def test_read_single_edge_and_empty():
    g = read_graph("3 1\n0 1\n")
    assert g.n == 3 and g.m == 1 and g.has_edge(0, 1) and g.has_edge(1, 0)
    e = read_graph("2 0\n")
    assert e.n == 2 and e.m == 0


@pytest.mark.parametrize(
    "text, line",
    [
        ("3 1\n1 1\n", 2),        # self-loop
        ("3 1\n0 3\n", 2),        # out of range
        ("3 2\n0 1\n0 1\n", 3),   # duplicate
        ("3 1\n1 0\n", 2),        # i > j
        ("3 1\n0 x\n", 2),        # malformed
        ("3\n", 1),               # bad header
        ("3 2\n0 1\n", None),     # too few edges
        ("3 1\n0 1\n1 2\n", 3),   # too many edges
        ("-1 0\n", 1),
    ],
)
def test_read_errors_name_the_line(text, line):
    with pytest.raises(GraphFormatError) as info:
        read_graph(text)
    if line is not None:
        assert info.value.line == line
        assert f"line {line}" in str(info.value)


def test_writer_sorts_and_ends_with_newline():
    g = Graph.from_edges(4, [(2, 3), (0, 3), (0, 1)])
    assert write_graph(g) == "4 3\n0 1\n0 3\n2 3\n"


def test_graph_validation():
    with pytest.raises(ValidationError):
        Graph(np.array([[0, 1], [0, 0]], dtype=bool))
    with pytest.raises(ValidationError):
        Graph(np.eye(2, dtype=bool))
    with pytest.raises(ValidationError):
        Graph.from_edges(2, [(0, 0)])
    with pytest.raises(ValidationError):
        Graph(np.zeros((0, 0), dtype=bool))


def test_adjacency_is_read_only():
    g = Graph.complete(3)
    with pytest.raises(ValueError):
        g.adjacency[0, 1] = False


def test_file_round_trip(tmp_path):
    g = Graph.from_edges(5, [(0, 4), (1, 2)])
    path = tmp_path / "g.txt"
    save_graph(g, path)
    assert load_graph(path) == g
    assert path.read_bytes() == b"5 2\n0 4\n1 2\n"


@given(graphs())
def test_round_trip_property(g):
    assert read_graph(write_graph(g)) == g


@given(graphs())
def test_degree_sum_is_twice_edges(g):
    d = degrees(g)
    assert d.sum() == 2 * g.m
    assert 0 <= g.m <= g.n * (g.n - 1) // 2
    assert np.all(d <= g.n - 1)


@given(graphs(min_n=2), st.randoms(use_true_random=False))
def test_permute_preserves_degree_multiset(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = g.permute(perm)
    assert sorted(degrees(h)) == sorted(degrees(g))
    assert degrees(h)[perm].tolist() == degrees(g).tolist()
