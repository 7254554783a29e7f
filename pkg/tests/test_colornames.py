import numpy as np
import pytest

import oracles
from reidkit.colornames import dominant_color, item_color, load_anchors, name_color


def test_eleven_anchors():
    terms, rgbs = load_anchors()
    assert len(terms) == 11
    assert len(set(terms)) == 11
    assert rgbs.shape == (11, 3)


def test_anchors_are_fixed_points():
    terms, rgbs = load_anchors()
    for term, rgb in zip(terms, rgbs):
        assert name_color(tuple(int(v) for v in rgb)) == term


def test_fuzzed_naming_matches_scalar_oracle():
    terms, rgbs = load_anchors()
    rng = np.random.default_rng(0)
    for rgb in rng.integers(0, 256, size=(500, 3)):
        value = tuple(int(v) for v in rgb)
        assert name_color(value) == oracles.nearest_color_term(value, terms, rgbs)


def test_rgb_space_option():
    # in plain RGB distance, (200, 200, 200) is closest to gray (190,190,190)
    assert name_color((200, 200, 200), space="rgb") == "gray"
    with pytest.raises(ValueError):
        name_color((1, 2, 3), space="hsl")


@pytest.mark.parametrize("seed", range(4))
def test_dominant_color_matches_counting_oracle(seed):
    rng = np.random.default_rng(seed)
    rgb = rng.integers(0, 256, size=(13, 9, 3)).astype(np.uint8)
    mask = rng.random((13, 9)) < 0.6
    if not mask.any():
        mask[0, 0] = True
    got = dominant_color(rgb, mask)
    want = oracles.dominant_color([tuple(p) for p in rgb[mask]])
    assert got == want


def test_dominant_color_uniform_region():
    rgb = np.zeros((5, 5, 3), dtype=np.uint8)
    rgb[..., 0] = 255
    assert dominant_color(rgb, np.ones((5, 5), dtype=bool)) == (255, 0, 0)


def test_dominant_color_majority_wins():
    rgb = np.zeros((1, 10, 3), dtype=np.uint8)
    rgb[0, :7] = (250, 10, 10)
    rgb[0, 7:] = (10, 250, 10)
    assert dominant_color(rgb, np.ones((1, 10), dtype=bool)) == (250, 10, 10)


def test_dominant_color_empty_mask_raises():
    with pytest.raises(ValueError):
        dominant_color(np.zeros((4, 4, 3), dtype=np.uint8), np.zeros((4, 4), dtype=bool))


def test_item_color_end_to_end():
    rgb = np.zeros((6, 6, 3), dtype=np.uint8)
    rgb[:, :, 2] = 240
    assert item_color(rgb, np.ones((6, 6), dtype=bool)) == "blue"
