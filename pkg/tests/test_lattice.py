import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wavedens.errors import DegenerateSplitError, InvalidShapeError, UnsupportedError
from wavedens.lattice import (LatticeShape, adjacency_matrix, build_index_set, concliques,
                              four_neighbors, parity_mask, partition_train_validate,
                              train_extent, train_mask)


def test_index_set_examples():
    assert build_index_set((1, 1)) == [(1, 1)]
    assert build_index_set((2, 2)) == [(1, 1), (1, 2), (2, 1), (2, 2)]
    assert len(build_index_set((20, 20))) == 400


@pytest.mark.parametrize("dims", [(0, 3), (3, -1), ()])
def test_invalid_shape(dims):
    with pytest.raises(InvalidShapeError):
        LatticeShape(dims)


def test_ratio_warning():
    with pytest.warns(UserWarning):
        assert not LatticeShape((2, 20)).check_ratio(0.5)
    assert LatticeShape((20, 20)).check_ratio(0.5)


def test_neighbors_examples():
    assert four_neighbors((1, 1), (3, 3)) == {(1, 2), (2, 1)}
    assert four_neighbors((2, 2), (3, 3)) == {(1, 2), (3, 2), (2, 1), (2, 3)}
    assert four_neighbors((1, 2), (3, 3)) == {(1, 1), (1, 3), (2, 2)}
    with pytest.raises(IndexError):
        four_neighbors((4, 1), (3, 3))


@pytest.mark.parametrize("dims", [(3, 3), (4, 7), (8, 8)])
def test_neighbor_symmetry(dims):
    for s in build_index_set(dims):
        for t in four_neighbors(s, dims):
            assert s in four_neighbors(t, dims)


def test_concliques_examples():
    pair = concliques((2, 2))
    assert pair.c1 == {(1, 1), (2, 2)} and pair.c2 == {(1, 2), (2, 1)}
    pair = concliques((3, 3))
    assert (len(pair.c1), len(pair.c2)) == (5, 4)
    pair = concliques((20, 20))
    assert len(pair.c1) == len(pair.c2) == 200
    with pytest.raises(UnsupportedError):
        concliques((3, 3, 3))


def test_concliques_exhaustive():
    for dims in itertools.product(range(1, 9), repeat=2):
        pair = concliques(dims)
        sites = set(build_index_set(dims))
        assert pair.c1 | pair.c2 == sites and not pair.c1 & pair.c2
        for c in (pair.c1, pair.c2):
            for s in c:
                assert not four_neighbors(s, dims) & c
        mask = parity_mask(dims)
        assert {s for s in sites if mask[s[0] - 1, s[1] - 1]} == pair.c1


def test_split_examples():
    train, val = partition_train_validate((20, 20))
    assert (len(train), len(val)) == (324, 76)
    train, _ = partition_train_validate((10, 10), 0.99)
    assert len(train) == 81
    assert train_extent((65, 65)) == (58, 58)
    assert train_mask((65, 65)).sum() == 3364
    with pytest.raises(DegenerateSplitError):
        partition_train_validate((1, 1), 0.5)
    with pytest.raises(DegenerateSplitError):
        partition_train_validate((5, 5), 1.0)


@settings(max_examples=50, deadline=None)
@given(st.integers(2, 30), st.integers(2, 30), st.floats(0.05, 0.95))
def test_split_partitions(n1, n2, frac):
    try:
        train, val = partition_train_validate((n1, n2), frac)
    except DegenerateSplitError:
        return
    assert set(train) | set(val) == set(build_index_set((n1, n2)))
    assert not set(train) & set(val)
    mask = train_mask((n1, n2), frac)
    assert mask.sum() == len(train)


def test_adjacency_matches_neighbors():
    dims = (4, 5)
    H = adjacency_matrix(dims).toarray()
    sites = build_index_set(dims)
    index = {s: i for i, s in enumerate(sites)}
    ref = np.zeros_like(H)
    for s in sites:
        for t in four_neighbors(s, dims):
            ref[index[s], index[t]] = 1
    np.testing.assert_array_equal(H, ref)
