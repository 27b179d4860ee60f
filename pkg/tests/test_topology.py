import pytest

from topology import (
    DisconnectedTopologyError,
    EmptyTopologyError,
    MalformedLineError,
    SelfLoopError,
    UnknownNodeError,
    dump_topology,
    grid_topology,
    id_of,
    label_of,
    load_topology,
    neighbors,
    nodes_within_radius,
    random_connected_topology,
    ring_topology,
    star_topology,
    topology_from_edges,
    two_cluster_topology,
)


def labels(t, ids):
    return {label_of(t, x) for x in ids}


def test_load_minimal_path(path_abc):
    assert path_abc.n == 3
    assert path_abc.labels == ("a", "b", "c")
    assert path_abc.edges() == [(0, 1), (1, 2)]


def test_load_collapses_duplicate_edges():
    t = load_topology("a b\na b\nb a\n")
    assert t.n == 2
    assert t.edges() == [(0, 1)]


def test_load_ignores_comments_and_blank_lines():
    t = load_topology("# мережа\n\nx y  # ребро\n\ny z\n")
    assert t.labels == ("x", "y", "z")


def test_load_disconnected():
    with pytest.raises(DisconnectedTopologyError):
        load_topology("a b\nc d\n")


def test_load_empty_document():
    with pytest.raises(EmptyTopologyError):
        load_topology("# nothing here\n\n")


def test_load_self_loop():
    with pytest.raises(SelfLoopError):
        load_topology("a b\nb b\n")


def test_load_malformed_line():
    with pytest.raises(MalformedLineError):
        load_topology("a b c\n")


def test_dump_is_read_back(grid5):
    t = load_topology(dump_topology(grid5))
    assert t.labels == grid5.labels
    assert t.edges() == grid5.edges()


def test_neighbors_path(path_abc):
    assert labels(path_abc, neighbors(path_abc, id_of(path_abc, "b"))) == {"a", "c"}


def test_neighbors_star_center(star4):
    assert labels(star4, neighbors(star4, 0)) == {"l1", "l2", "l3", "l4"}


def test_neighbors_sorted(grid5):
    assert neighbors(grid5, 12) == [7, 11, 13, 17]


def test_neighbors_unknown_id(path_abc):
    with pytest.raises(UnknownNodeError):
        neighbors(path_abc, 7)


def test_unknown_label(path_abc):
    with pytest.raises(KeyError):
        id_of(path_abc, "zz")


def test_radius_path(path_abcde):
    a = id_of(path_abcde, "a")
    assert labels(path_abcde, nodes_within_radius(path_abcde, a, 2, 3)) == {"c", "d"}


def test_radius_ring():
    t = ring_topology(6)
    assert labels(t, nodes_within_radius(t, 0, 2, 3)) == {"n2", "n3", "n4"}


def test_radius_empty_range(grid5):
    assert nodes_within_radius(grid5, 0, 1, 0) == set()


def test_radius_negative_lower_bound(grid5):
    with pytest.raises(ValueError):
        nodes_within_radius(grid5, 0, -1, 2)


@pytest.mark.parametrize("seed", range(10))
def test_radius_partition_and_symmetry(seed):
    t = random_connected_topology(30, seed, 0.08)
    for x in range(t.n):
        n1 = nodes_within_radius(t, x, 1, 1)
        tlen = nodes_within_radius(t, x, 2, 3)
        assert n1 == set(neighbors(t, x))
        assert not n1 & tlen
        assert nodes_within_radius(t, x, 1, 3) == n1 | tlen
        for v in nodes_within_radius(t, x, 2, 2):
            assert x in nodes_within_radius(t, v, 2, 2)


def test_single_node_topology():
    t = topology_from_edges([], labels=["solo"])
    assert t.n == 1
    assert neighbors(t, 0) == []


def test_random_topology_is_deterministic():
    a = random_connected_topology(40, 7)
    b = random_connected_topology(40, 7)
    assert a.edges() == b.edges()
    assert random_connected_topology(40, 8).edges() != a.edges()


def test_generators_shapes():
    assert grid_topology(3, 4).graph.number_of_edges() == 3 * 3 + 2 * 4
    assert star_topology(5).n == 6
    t = two_cluster_topology(4, bridge_len=3)
    assert t.n == 10
    assert "p1" in t.labels and "p2" in t.labels
