import numpy as np
import pytest

from reidkit.data.vocab import load_vocabulary, label_id
from reidkit.data.types import AnnotatedImage
from reidkit.errors import DimensionError, FormatError
from reidkit.features import stack
from reidkit.parsing.global_model import (
    GlobalParseModel,
    global_parse,
    parse_features,
    train_global,
)

from oracles import global_parse_scores


def test_parse_features_drops_boundary_and_skin_channels():
    base = np.arange(4 * 3 * stack.N_CHANNELS, dtype=float).reshape(4, 3, -1)
    sel = parse_features(base)
    assert sel.shape == (4, 3, 70)
    # channel 50 (boundary) and 71/72 (skin, hair) are excluded
    np.testing.assert_array_equal(sel[..., :50], base[..., :50])
    np.testing.assert_array_equal(sel[..., 50:], base[..., 51:71])


def synthetic_annotated(seed):
    """Two-label toy scene: label A fills the top half, null the bottom."""
    vocab = load_vocabulary()
    rng = np.random.default_rng(seed)
    h, w = 10, 8
    base = rng.normal(size=(h, w, stack.N_CHANNELS)) * 0.05
    shirt = label_id("shirt")
    null = label_id("null")
    labels = np.full((h, w), null, dtype=np.int32)
    labels[: h // 2] = shirt
    # make the shirt rows separable on a parse-visible channel
    base[: h // 2, :, 5] += 3.0
    img = AnnotatedImage(
        rgb=np.zeros((h, w, 3), dtype=np.uint8),
        labels=labels,
        pose2d=np.array([[1.0, 1.0]] * 20),
    )
    return img, base


def test_train_and_probabilities():
    img, base = synthetic_annotated(0)
    model = train_global([img], [base], max_epochs=300)
    shirt = label_id("shirt")
    null = label_id("null")
    assert model.trained[shirt] and model.trained[null]
    flat = parse_features(base).reshape(-1, 70)
    p_shirt = model.label_probability(flat, shirt).reshape(10, 8)
    assert p_shirt[:5].mean() > 0.8
    assert p_shirt[5:].mean() < 0.2


def test_untrained_label_probability_zero():
    img, base = synthetic_annotated(1)
    model = train_global([img], [base], max_epochs=50)
    jeans = label_id("jeans")
    assert not model.trained[jeans]
    flat = parse_features(base).reshape(-1, 70)
    np.testing.assert_array_equal(model.label_probability(flat, jeans), 0.0)


def test_probability_matches_scalar_oracle():
    img, base = synthetic_annotated(2)
    model = train_global([img], [base], max_epochs=100)
    shirt = label_id("shirt")
    flat = parse_features(base).reshape(-1, 70)[:17]
    got = model.label_probability(flat, shirt)
    want = global_parse_scores(model.weights, model.bias, model.trained, flat, shirt)
    np.testing.assert_allclose(got, want, atol=1e-12)


def test_dim_mismatch_raises():
    img, base = synthetic_annotated(3)
    model = train_global([img], [base], max_epochs=10)
    with pytest.raises(DimensionError):
        model.label_probability(np.zeros((4, 69)), 0)


def test_save_load_roundtrip(tmp_path):
    img, base = synthetic_annotated(4)
    model = train_global([img], [base], max_epochs=60)
    path = tmp_path / "g.ridl"
    model.save(path)
    back = GlobalParseModel.load(path)
    np.testing.assert_array_equal(back.weights, model.weights)
    np.testing.assert_array_equal(back.bias, model.bias)
    np.testing.assert_array_equal(back.trained, model.trained)


def test_load_rejects_garbage(tmp_path):
    path = tmp_path / "bad.ridl"
    path.write_bytes(b"NOPE" + b"\x00" * 20)
    with pytest.raises(FormatError):
        GlobalParseModel.load(path)
    path.write_bytes(b"RIDL" + b"\x00" * 4)
    with pytest.raises(FormatError):
        GlobalParseModel.load(path)


def test_global_parse_masks_by_tau():
    img, base = synthetic_annotated(5)
    model = train_global([img], [base], max_epochs=100)
    tau = frozenset({"shirt", "null"})
    maps = global_parse(model, base, tau)
    vocab = load_vocabulary()
    assert set(maps) == set(vocab)
    assert maps["shirt"].shape == (10, 8)
    assert maps["shirt"].max() > 0.5
    # everything outside tau is hard zero, trained or not
    np.testing.assert_array_equal(maps["jeans"], 0.0)
    np.testing.assert_array_equal(maps["dress"], 0.0)


def test_subsampling_is_deterministic():
    img, base = synthetic_annotated(6)
    a = train_global([img], [base], max_epochs=30, max_pixels=40)
    b = train_global([img], [base], max_epochs=30, max_pixels=40)
    np.testing.assert_array_equal(a.weights, b.weights)
