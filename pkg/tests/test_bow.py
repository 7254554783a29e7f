import numpy as np
import pytest

from reidkit.errors import FormatError
from reidkit.features import stack
from reidkit.parsing.bow import (
    BowVocabulary,
    GROUPS,
    bow_histograms,
    kmeans_farthest,
    nearest_word,
    train_bow,
)


def test_groups_cover_expected_channels():
    assert GROUPS == ("lab", "lbp", "gradient")
    cols = np.concatenate([np.asarray(stack.BOW_GROUPS[g]).ravel() for g in GROUPS])
    np.testing.assert_array_equal(np.sort(cols), np.arange(50))


def test_kmeans_deterministic():
    rng = np.random.default_rng(0)
    data = rng.normal(size=(200, 4))
    a = kmeans_farthest(data, 8)
    b = kmeans_farthest(data, 8)
    np.testing.assert_array_equal(a, b)


def test_kmeans_recovers_separated_clusters():
    rng = np.random.default_rng(1)
    left = rng.normal(size=(60, 2)) * 0.05
    right = rng.normal(size=(60, 2)) * 0.05 + 10.0
    data = np.vstack([left, right])
    centers = kmeans_farthest(data, 2)
    centers = centers[np.argsort(centers[:, 0])]
    np.testing.assert_allclose(centers[0], left.mean(axis=0), atol=1e-8)
    np.testing.assert_allclose(centers[1], right.mean(axis=0), atol=1e-8)


def test_kmeans_k_clamped_to_n():
    data = np.arange(6.0).reshape(3, 2)
    centers = kmeans_farthest(data, 10)
    assert centers.shape == (3, 2)


def test_kmeans_rejects_empty():
    with pytest.raises(ValueError):
        kmeans_farthest(np.zeros((0, 3)), 4)


def test_nearest_word_tie_low_index():
    centers = np.array([[0.0], [2.0], [0.0]])
    assign = nearest_word(np.array([[0.0], [1.0], [2.0]]), centers)
    # 1.0 is equidistant from centers 0 and 1: lower index wins
    assert assign.tolist() == [0, 0, 1]


def test_nearest_word_chunking_invariant():
    rng = np.random.default_rng(2)
    pts = rng.normal(size=(100, 3))
    centers = rng.normal(size=(7, 3))
    a = nearest_word(pts, centers)
    b = nearest_word(pts, centers, chunk=3)
    np.testing.assert_array_equal(a, b)


def test_vocabulary_roundtrip(tmp_path):
    rng = np.random.default_rng(3)
    books = {
        "lab": rng.normal(size=(5, 3)),
        "lbp": rng.normal(size=(5, 38)),
        "gradient": rng.normal(size=(4, 9)),
    }
    vocab = BowVocabulary(books)
    assert vocab.n_bins == 14
    path = tmp_path / "v.ridw"
    vocab.save(path)
    back = BowVocabulary.load(path)
    for name in GROUPS:
        np.testing.assert_array_equal(back.codebooks[name], books[name])


def test_vocabulary_bad_magic(tmp_path):
    path = tmp_path / "v.ridw"
    path.write_bytes(b"ZZZZ" + b"\x00" * 16)
    with pytest.raises(FormatError):
        BowVocabulary.load(path)


def make_features(seed, h=12, w=10):
    rng = np.random.default_rng(seed)
    return rng.normal(size=(h, w, 50))


def test_train_bow_and_histograms_shape():
    feats = [make_features(4), make_features(5)]
    vocab = train_bow(feats, words=6)
    labels = np.zeros((12, 10), dtype=np.int32)
    labels[6:] = 1
    hists = bow_histograms(feats[0], labels, vocab)
    assert hists.shape == (2, vocab.n_bins)
    # one L1-normalized histogram per group
    np.testing.assert_allclose(hists.sum(axis=1), 3.0)
    assert (hists >= 0).all()


def test_histograms_separate_distinct_content():
    rng = np.random.default_rng(6)
    feats = np.zeros((10, 10, 50))
    feats[:5] = rng.normal(size=(5, 10, 50)) * 0.1
    feats[5:] = rng.normal(size=(5, 10, 50)) * 0.1 + 5.0
    vocab = train_bow([feats], words=4)
    labels = np.zeros((10, 10), dtype=np.int32)
    labels[5:] = 1
    hists = bow_histograms(feats, labels, vocab)
    assert np.linalg.norm(hists[0] - hists[1]) > 0.5


def test_histograms_require_dense_ids():
    feats = make_features(7)
    labels = np.zeros((12, 10), dtype=np.int32)
    labels[0, 0] = 5  # ids 1..4 unused
    vocab = train_bow([feats], words=3)
    with pytest.raises(ValueError):
        bow_histograms(feats, labels, vocab)
