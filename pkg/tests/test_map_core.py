"""Tests for map_core: permutation maps, validation, BFS."""

import numpy as np
import pytest

from errors import Disconnected, HalfEdgeOutOfRange, InvalidInvolution, QuadLabError, UsageError
from map_core import (bfs_levels, build_map, dense_cycles, face_count, genus, invert,
                      torus_grid_map, vertex_count)


def torus_one_vertex():
    return build_map(2, [2, 3, 0, 1], [1, 2, 3, 0], root=0)


def plane_path():
    # two edges 0-1, 2-3 hanging off a middle vertex: a planar tree
    return build_map(2, [1, 0, 3, 2], [0, 2, 1, 3], root=0)


def test_torus_one_vertex_counts():
    m = torus_one_vertex()
    assert vertex_count(m) == 1
    assert face_count(m) == 1
    assert genus(m) == 1


def test_plane_tree_counts():
    m = plane_path()
    assert m.vertex_count == 3
    assert m.face_count == 1
    assert m.genus == 0


def test_phi_is_facial_successor_for_polygon_gluing():
    # pairing glued with sigma = roll(pairing, 1) walks the face as i -> i + 1
    pairing = np.array([2, 3, 0, 1])
    m = build_map(2, pairing, np.roll(pairing, 1), root=0)
    assert list(m.phi) == [1, 2, 3, 0]


def test_fixed_point_in_alpha_rejected():
    with pytest.raises(InvalidInvolution) as exc:
        build_map(2, [0, 3, 2, 1], [1, 2, 3, 0], root=0)
    assert exc.value.half_edge == 0


def test_non_involution_rejected():
    with pytest.raises(InvalidInvolution):
        build_map(2, [1, 2, 3, 0], [1, 2, 3, 0], root=0)


def test_out_of_range_entries_rejected():
    with pytest.raises(HalfEdgeOutOfRange):
        build_map(2, [2, 3, 0, 4], [1, 2, 3, 0], root=0)
    with pytest.raises(HalfEdgeOutOfRange):
        build_map(2, [2, 3, 0, 1], [1, 2, 3, 0], root=7)
    with pytest.raises(HalfEdgeOutOfRange):
        build_map(2, [2, 3, 0, 1], [1, 1, 3, 0], root=0)


def test_disconnected_rejected():
    # two separate loops
    with pytest.raises(Disconnected):
        build_map(2, [1, 0, 3, 2], [1, 0, 3, 2], root=0)


def test_validation_errors_are_value_errors():
    with pytest.raises(ValueError):
        build_map(2, [0, 3, 2, 1], [1, 2, 3, 0], root=0)
    with pytest.raises(QuadLabError):
        build_map(0, [], [], root=0)


def test_dense_cycles_orders_by_smallest_element():
    labels, sizes = dense_cycles(np.array([2, 3, 0, 1]))
    assert list(labels) == [0, 1, 0, 1]
    assert list(sizes) == [2, 2]


def test_invert():
    p = np.array([3, 0, 2, 1])
    assert list(invert(p)[p]) == [0, 1, 2, 3]


def test_rotation_and_face_cover_every_half_edge():
    m = torus_grid_map(4)
    seen = sorted(h for v in range(m.vertex_count) for h in m.rotation(v))
    assert seen == list(range(m.n_half_edges))
    assert all(len(m.face(f)) == 4 for f in range(m.face_count))


def test_origin_and_head():
    m = plane_path()
    for h in range(m.n_half_edges):
        assert m.head(h) == m.origin(int(m.alpha[h]))


def test_relabel_preserves_invariants():
    m = torus_grid_map(4)
    rng = np.random.default_rng(3)
    perm = rng.permutation(m.n_half_edges)
    r = m.relabel(perm)
    assert (r.vertex_count, r.face_count, r.genus) == (m.vertex_count, m.face_count, m.genus)
    assert r.root == perm[m.root]


def test_equality_and_hash():
    assert torus_one_vertex() == torus_one_vertex()
    assert len({torus_one_vertex(), torus_one_vertex(), plane_path()}) == 2


def test_dict_round_trip():
    m = torus_grid_map(3)
    assert type(m).from_dict(m.to_dict()) == m


def test_torus_grid_is_genus_one_quadrangulation():
    m = torus_grid_map(6)
    assert m.genus == 1
    assert m.vertex_count == 36
    assert m.face_count == 36
    assert set(int(d) for d in m.face_degrees) == {4}
    assert m.is_bipartite()


def test_odd_torus_grid_not_bipartite():
    assert not torus_grid_map(5).is_bipartite()


def test_torus_grid_too_small():
    with pytest.raises(UsageError):
        torus_grid_map(2)


def test_bfs_levels_on_torus_grid():
    side = 6
    m = torus_grid_map(side)
    dist = bfs_levels(m.adjacency(), 0)
    # vertex y * side + x sits at torus L1 distance from the origin
    expected = [min(x, side - x) + min(y, side - y) for y in range(side) for x in range(side)]
    assert list(dist) == expected


def test_bfs_levels_unreachable_is_minus_one():
    from scipy import sparse
    adj = sparse.csr_matrix(np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=np.int8))
    assert list(bfs_levels(adj, 0)) == [0, 1, -1]


def test_chord_diagrams_on_one_vertex():
    star = [1, 2, 3, 0]
    crossing = build_map(2, [2, 3, 0, 1], star, root=0)
    nested = build_map(2, [3, 2, 1, 0], star, root=0)
    assert (crossing.face_count, crossing.genus) == (1, 1)
    assert (nested.face_count, nested.genus) == (3, 0)


def test_alpha_is_an_involution_on_random_relabellings():
    m = torus_grid_map(5)
    for seed in range(3):
        r = m.relabel(np.random.default_rng(seed).permutation(m.n_half_edges))
        assert np.array_equal(r.alpha[r.alpha], np.arange(r.n_half_edges))
        assert r.genus == 1
