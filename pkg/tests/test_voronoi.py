import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import PENTAGON, points_in, seeds
from swarmcover.geom2d import contains, polygon_area
from swarmcover.voronoi import DuplicateGeneratorError, GeneratorOutsideError, voronoi_cells


def owner_oracle(gens, q):
    d = np.hypot(q[:, None, 0] - gens[None, :, 0], q[:, None, 1] - gens[None, :, 1])
    order = np.sort(d, axis=1)
    return np.argmin(d, axis=1), order[:, 1] - order[:, 0]


def test_two_generators_split_square(square):
    vd = voronoi_cells([(0.25, 0.5), (0.75, 0.5)], square)
    assert len(vd) == 2
    for cell in vd.cells:
        assert polygon_area(cell) == pytest.approx(0.5)
    assert vd.cells[0].as_array()[:, 0].max() == pytest.approx(0.5)
    assert vd.cells[1].as_array()[:, 0].min() == pytest.approx(0.5)


def test_single_generator_is_whole_arena(pentagon):
    vd = voronoi_cells([(3, 3)], pentagon)
    assert np.array_equal(vd.cells[0].as_array(), pentagon.as_array())


def test_duplicate_pair_reported(pentagon):
    with pytest.raises(DuplicateGeneratorError) as exc:
        voronoi_cells([(2, 2), (3, 3), (2, 2)], pentagon)
    assert exc.value.pair == (0, 2)


def test_outside_generator(pentagon):
    with pytest.raises(GeneratorOutsideError) as exc:
        voronoi_cells([(2, 2), (9, 9)], pentagon)
    assert exc.value.index == 1


def test_owner_lowest_index_on_tie(square):
    vd = voronoi_cells([(0.25, 0.5), (0.75, 0.5)], square)
    assert vd.owner((0.5, 0.1)) == 0
    assert vd.owner((0.9, 0.1)) == 1


@settings(max_examples=100, deadline=None)
@given(seeds, st.integers(1, 20))
def test_partition_membership_convexity(seed, n):
    rng = np.random.default_rng(seed)
    gens = points_in(PENTAGON, rng, n)
    vd = voronoi_cells(gens, PENTAGON)
    assert vd.total_area() == pytest.approx(42.5, rel=1e-9)
    for g, cell in zip(gens, vd.cells):
        assert contains(cell, g)
        a = cell.as_array()
        e = np.roll(a, -1, axis=0) - a
        turn = e[:, 0] * np.roll(e, -1, axis=0)[:, 1] - e[:, 1] * np.roll(e, -1, axis=0)[:, 0]
        assert np.all(turn > -1e-9)


@settings(max_examples=30, deadline=None)
@given(seeds, st.integers(2, 20))
def test_ownership_oracle(seed, n):
    rng = np.random.default_rng(seed)
    gens = points_in(PENTAGON, rng, n)
    vd = voronoi_cells(gens, PENTAGON)
    q = points_in(PENTAGON, rng, 10**4)
    nearest, gap = owner_oracle(gens, q)
    keep = gap > 1e-9
    inside = np.stack([np.all(c.signed_distances(q) >= -1e-9, axis=1) for c in vd.cells], axis=1)
    assert np.all(inside[np.arange(len(q)), nearest][keep])
    assert np.all(inside.sum(axis=1)[keep] == 1)


@settings(max_examples=50, deadline=None)
@given(seeds, st.integers(2, 12))
def test_permutation_equivariance(seed, n):
    rng = np.random.default_rng(seed)
    gens = points_in(PENTAGON, rng, n)
    perm = rng.permutation(n)
    a = voronoi_cells(gens, PENTAGON)
    b = voronoi_cells(gens[perm], PENTAGON)
    for k, j in enumerate(perm):
        assert polygon_area(b.cells[k]) == pytest.approx(polygon_area(a.cells[j]), rel=1e-12, abs=1e-12)
        assert np.allclose(np.sort(b.cells[k].as_array(), axis=0), np.sort(a.cells[j].as_array(), axis=0), atol=1e-9)
