import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from reidkit.errors import DimensionError
from reidkit.retrieval.kdtree import LEAF_SIZE, build_index, linear_scan

from oracles import knn as knn_oracle


def test_build_empty_rejected():
    with pytest.raises(ValueError):
        build_index(np.zeros((0, 3)))


def test_build_single_point():
    index = build_index(np.array([[1.0, 2.0]]))
    ids, dists = index.knn(np.array([1.0, 2.0]), 1)
    assert ids.tolist() == [0]
    assert dists[0] == 0.0


def test_perm_is_permutation():
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(137, 4))
    index = build_index(pts)
    assert sorted(index.perm.tolist()) == list(range(137))


def test_leaves_cover_everything_once():
    rng = np.random.default_rng(1)
    pts = rng.normal(size=(200, 3))
    index = build_index(pts)
    seen = np.zeros(200, dtype=int)
    for node in range(len(index.node_dim)):
        if index.node_dim[node] < 0:
            lo, hi = index.node_start[node], index.node_end[node]
            assert hi - lo <= LEAF_SIZE
            for i in index.perm[lo:hi]:
                seen[i] += 1
    np.testing.assert_array_equal(seen, 1)


def test_split_planes_partition_points():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(150, 5))
    index = build_index(pts)

    def walk(node, lo, hi):
        dim = index.node_dim[node]
        if dim < 0:
            assert (index.node_start[node], index.node_end[node]) == (lo, hi)
            return
        # interior nodes carry no range; the lower-median rule fixes it
        mid = (hi - lo - 1) // 2
        split = index.node_split[node]
        assert pts[index.perm[lo:lo + mid + 1], dim].max() <= split
        assert pts[index.perm[lo + mid + 1:hi], dim].min() >= split
        walk(index.node_left[node], lo, lo + mid + 1)
        walk(index.node_right[node], lo + mid + 1, hi)

    walk(0, 0, index.size)


@pytest.mark.parametrize("seed", range(6))
def test_knn_matches_linear_scan(seed):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(5, 400))
    d = int(rng.integers(1, 9))
    pts = rng.normal(size=(n, d))
    index = build_index(pts)
    for _ in range(30):
        q = rng.normal(size=d) * 2.0
        k = int(rng.integers(1, min(n, 12) + 1))
        ids_t, d_t = index.knn(q, k)
        ids_l, d_l = linear_scan(pts, q, k)
        np.testing.assert_array_equal(ids_t, ids_l)
        np.testing.assert_allclose(d_t, d_l, rtol=1e-12, atol=1e-12)


def test_linear_scan_matches_oracle():
    rng = np.random.default_rng(11)
    pts = rng.normal(size=(60, 3))
    q = rng.normal(size=3)
    ids, dists = linear_scan(pts, q, 7)
    want_ids, want_dists = knn_oracle(pts, q, 7)
    np.testing.assert_array_equal(ids, want_ids)
    np.testing.assert_allclose(dists, want_dists, rtol=1e-12)


def test_duplicate_points_tie_break_by_id():
    pts = np.array([[1.0, 1.0]] * 5 + [[3.0, 3.0]] * 3)
    index = build_index(pts)
    ids, dists = index.knn(np.array([1.0, 1.0]), 5)
    assert ids.tolist() == [0, 1, 2, 3, 4]
    np.testing.assert_array_equal(dists, 0.0)


def test_k_clamped_to_size():
    pts = np.arange(12.0).reshape(6, 2)
    index = build_index(pts)
    ids, dists = index.knn(np.zeros(2), 50)
    assert len(ids) == 6
    assert (np.diff(dists) >= 0).all()


def test_query_validation():
    index = build_index(np.zeros((4, 3)))
    with pytest.raises(DimensionError):
        index.knn(np.zeros(2), 1)
    with pytest.raises(ValueError):
        index.knn(np.zeros(3), 0)


def test_results_sorted_by_distance_then_id():
    rng = np.random.default_rng(4)
    pts = np.round(rng.normal(size=(300, 2)))  # heavy ties
    index = build_index(pts)
    for _ in range(20):
        q = np.round(rng.normal(size=2))
        ids, dists = index.knn(q, 17)
        pairs = list(zip(dists.tolist(), ids.tolist()))
        assert pairs == sorted(pairs)


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_knn_property_fuzz(data):
    n = data.draw(st.integers(1, 120))
    d = data.draw(st.integers(1, 6))
    seed = data.draw(st.integers(0, 2**31 - 1))
    rng = np.random.default_rng(seed)
    # round to force many exact ties; ints keep d2 exact in float64
    pts = rng.integers(-4, 5, size=(n, d)).astype(np.float64)
    q = rng.integers(-4, 5, size=d).astype(np.float64)
    k = data.draw(st.integers(1, n))
    index = build_index(pts)
    ids_t, d_t = index.knn(q, k)
    ids_l, d_l = linear_scan(pts, q, k)
    np.testing.assert_array_equal(ids_t, ids_l)
    np.testing.assert_array_equal(d_t, d_l)


def test_depth_reasonable_for_balanced_build():
    rng = np.random.default_rng(9)
    pts = rng.normal(size=(1024, 3))
    index = build_index(pts)
    # lower-median splits keep the tree near log2(n / leaf)
    assert index.depth() <= 10
