import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from udgp import fileio
from udgp.fileio import ParseError
from udgp.instance import Assignment, DistanceList, WeightedGraph, random_instance

pos = st.floats(1e-300, 1e300, allow_nan=False, allow_infinity=False)


@given(st.lists(pos, min_size=1, max_size=10), st.integers(1, 3))
def test_distance_round_trip(vals, K):
    d = DistanceList(5, K, vals)
    text = fileio.format_distances(d)
    back = fileio.parse_distances(text)
    assert back == d
    assert fileio.format_distances(back) == text


def test_distance_header_example():
    d = fileio.parse_distances("UDGP 3 3 2\n1\n1\n1\n")
    assert (d.n, d.m, d.K) == (3, 3, 2)


@pytest.mark.parametrize("text, line", [
    ("", 1),
    ("UDGP 3 2\n1\n1\n", 1),
    ("UDGP 3 2 2\n1\n", 2),
    ("UDGP 3 2 2\n1\n-1\n", 3),
    ("UDGP 3 2 2\n1\nabc\n", 3),
    ("UDGP 3 2 2\n1\n0\n", 3),
    ("UDGP 3 2 2\n1 2\n1\n", 2),
])
def test_distance_parse_errors(text, line):
    with pytest.raises(ParseError) as e:
        fileio.parse_distances(text)
    assert e.value.line == line


def test_graph_round_trip_and_errors():
    g = WeightedGraph.from_edges(4, [(0, 1, 1.0), (2, 3, 0.1), (1, 3, 2 ** 0.5)], K=2)
    text = fileio.format_graph(g)
    assert text.splitlines()[0] == "DGP 4 3 2"
    assert fileio.parse_graph(text) == g
    with pytest.raises(ParseError) as e:
        fileio.parse_graph("DGP 3 1 2\n2 1 1.0\n")
    assert e.value.line == 2
    with pytest.raises(ParseError):
        fileio.parse_graph("DGP 3 2 2\n1 2 1.0\n1 2 2.0\n")
    with pytest.raises(ParseError):
        fileio.parse_graph("DGP 3 1 2\n1 4 1.0\n")


def test_assignment_round_trip():
    a = Assignment(4, [[0, 1], [2, 3], [1, 3]])
    text = fileio.format_assignment(a)
    assert text.startswith("ASSIGN 4 3\n1 1 2\n")
    assert fileio.parse_assignment(text) == a
    with pytest.raises(ParseError):
        fileio.parse_assignment("ASSIGN 3 2\n1 1 2\n2 2 1\n")


@pytest.mark.parametrize("K", [1, 2, 3])
def test_xyz_round_trip(K):
    x, _ = random_instance(6, K, seed=K)
    text = fileio.format_xyz(x)
    lines = text.splitlines()
    assert lines[0] == "6" and lines[1].startswith(f"K={K}")
    assert all(ln.startswith("C ") and len(ln.split()) == 4 for ln in lines[2:])
    assert np.array_equal(fileio.parse_xyz(text), x)


def test_xyz_errors():
    with pytest.raises(ParseError):
        fileio.parse_xyz("2\nK=3\nC 0 0 0\n")
    with pytest.raises(ParseError):
        fileio.parse_xyz("1\nK=3\nC 0 0\n")
    with pytest.raises(ValueError):
        fileio.format_xyz(np.zeros((2, 4)))


def test_files_round_trip_byte_for_byte(tmp_path):
    _, d = random_instance(5, 2, seed=1)
    p = tmp_path / "d.udgp"
    fileio.write_distances(p, d)
    first = p.read_bytes()
    fileio.write_distances(p, fileio.read_distances(p))
    assert p.read_bytes() == first
    assert not [q for q in tmp_path.iterdir() if q.name.startswith(".tmp-")]


def test_read_error_names_path(tmp_path):
    p = tmp_path / "bad.udgp"
    p.write_text("UDGP 3 1 2\nx\n")
    with pytest.raises(ParseError, match="bad.udgp:2"):
        fileio.read_distances(p)
