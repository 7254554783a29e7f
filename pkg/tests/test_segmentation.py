import numpy as np
import pytest

from reidkit.parsing.segmentation import (
    oversegment,
    pose_bbox,
    pose_normalize,
    superpixel_stats,
)


def two_tone_image(h=24, w=24):
    img = np.zeros((h, w, 3), dtype=np.uint8)
    img[:, w // 2:] = 200
    return img


def test_labels_contiguous_first_occurrence():
    rng = np.random.default_rng(0)
    img = rng.integers(0, 256, size=(20, 20, 3), dtype=np.uint8)
    labels = oversegment(img, k_scale=50.0, min_size=5)
    flat = labels.ravel()
    seen = []
    for v in flat:
        if v not in seen:
            seen.append(v)
    # first occurrences count up from zero in row-major order
    assert seen == list(range(len(seen)))
    assert labels.dtype == np.int32


def test_two_regions_for_two_tones():
    # sigma=0 keeps the step edge sharp: exactly two segments
    labels = oversegment(two_tone_image(), k_scale=100.0, sigma=0.0, min_size=5)
    assert labels.max() == 1
    assert (labels[:, :12] == 0).all()
    assert (labels[:, 12:] == 1).all()
    # smoothing blurs the edge into at most a couple of transition strips
    smoothed = oversegment(two_tone_image(), k_scale=100.0, min_size=5)
    assert 2 <= smoothed.max() + 1 <= 4
    assert (smoothed[:, :10] == smoothed[0, 0]).all()
    assert (smoothed[:, 14:] == smoothed[0, -1]).all()


def test_huge_k_merges_everything():
    rng = np.random.default_rng(1)
    img = rng.integers(0, 256, size=(16, 16, 3), dtype=np.uint8)
    labels = oversegment(img, k_scale=1e9, min_size=1)
    assert labels.max() == 0


def test_min_size_respected():
    rng = np.random.default_rng(2)
    img = rng.integers(0, 256, size=(24, 24, 3), dtype=np.uint8)
    for min_size in (1, 10, 40):
        labels = oversegment(img, k_scale=10.0, min_size=min_size)
        sizes = np.bincount(labels.ravel())
        assert sizes.min() >= min_size


def test_deterministic():
    rng = np.random.default_rng(3)
    img = rng.integers(0, 256, size=(24, 24, 3), dtype=np.uint8)
    a = oversegment(img, k_scale=80.0)
    b = oversegment(img, k_scale=80.0)
    np.testing.assert_array_equal(a, b)


def test_segments_are_connected():
    rng = np.random.default_rng(4)
    img = rng.integers(0, 256, size=(18, 18, 3), dtype=np.uint8)
    labels = oversegment(img, k_scale=60.0, min_size=4)
    h, w = labels.shape
    for seg_id in range(labels.max() + 1):
        mask = labels == seg_id
        # flood fill from the first pixel must reach every pixel (8-connexity)
        seed = tuple(np.argwhere(mask)[0])
        reach = np.zeros_like(mask)
        stack = [seed]
        reach[seed] = True
        while stack:
            r, c = stack.pop()
            for dr in (-1, 0, 1):
                for dc in (-1, 0, 1):
                    rr, cc = r + dr, c + dc
                    if 0 <= rr < h and 0 <= cc < w and mask[rr, cc] and not reach[rr, cc]:
                        reach[rr, cc] = True
                        stack.append((rr, cc))
        assert (reach == mask).all()


def test_pose_bbox_ignores_nan():
    pose = np.array([[1.0, 2.0], [np.nan, np.nan], [5.0, 10.0]])
    assert pose_bbox(pose) == (1.0, 2.0, 5.0, 10.0)
    with pytest.raises(ValueError):
        pose_bbox(np.full((3, 2), np.nan))


def test_pose_normalize_scale_free():
    bbox = (0.0, 0.0, 30.0, 40.0)
    pts = np.array([[0.0, 0.0], [30.0, 40.0], [15.0, 20.0]])
    out = pose_normalize(pts, bbox)
    np.testing.assert_allclose(out[0], [0.0, 0.0])
    np.testing.assert_allclose(np.linalg.norm(out[1]), 1.0)
    # doubling all coordinates leaves normalized positions unchanged
    out2 = pose_normalize(pts * 2, (0.0, 0.0, 60.0, 80.0))
    np.testing.assert_allclose(out, out2)


def test_superpixel_stats_centroids():
    labels = np.zeros((4, 6), dtype=np.int32)
    labels[:, 3:] = 1
    pose = np.array([[0.0, 0.0], [5.0, 3.0]])
    stats = superpixel_stats(labels, pose)
    assert [s.id for s in stats] == [0, 1]
    np.testing.assert_allclose(stats[0].centroid, [1.5, 1.0])
    np.testing.assert_allclose(stats[1].centroid, [1.5, 4.0])
    assert stats[0].size == 12 and stats[1].size == 12
    diag = np.hypot(5.0, 3.0)
    np.testing.assert_allclose(stats[1].centroid_norm, [4.0 / diag, 1.5 / diag])
