import numpy as np
import pytest

from reidkit.data import fixture as fx
from reidkit.data.io import load_annotated_dir, load_ground_truth, load_sequence
from reidkit.data.vocab import label_id, null_id
from reidkit.skeleton import gate_frame


def test_generation_deterministic(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    fx.generate_fixture(a, seed=5, n_subjects=2, frames_per_subject=2)
    fx.generate_fixture(b, seed=5, n_subjects=2, frames_per_subject=2)
    files_a = sorted(p.relative_to(a) for p in a.rglob("*") if p.is_file())
    files_b = sorted(p.relative_to(b) for p in b.rglob("*") if p.is_file())
    assert files_a == files_b
    for rel in files_a:
        assert (a / rel).read_bytes() == (b / rel).read_bytes(), rel


def test_seed_changes_content(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    fx.generate_fixture(a, seed=1, n_subjects=1, frames_per_subject=1)
    fx.generate_fixture(b, seed=2, n_subjects=1, frames_per_subject=1)
    pa = a / "subject01" / "frame_000000.rgb.png"
    pb = b / "subject01" / "frame_000000.rgb.png"
    assert pa.read_bytes() != pb.read_bytes()


def test_frames_pass_gate(corpus_sequences):
    for frames in corpus_sequences:
        for f in frames:
            assert gate_frame(f)
            assert f.person_mask.any()
            assert (f.depth[f.person_mask] > 0).all()


def test_labels_expected_vocabulary(corpus_annotated):
    want = {
        label_id("shoes"), label_id("shirt"), label_id("jeans"),
        label_id("hair"), label_id("skin"), null_id(),
    }
    seen = set()
    for img in corpus_annotated:
        seen |= set(np.unique(img.labels).tolist())
    assert seen == want


def test_annotated_matches_sequences(corpus_root, corpus_sequences):
    annotated = load_annotated_dir(corpus_root / "annotated")
    n_frames = sum(len(frames) for frames in corpus_sequences)
    assert len(annotated) == n_frames
    by_id = {img.image_id: img for img in annotated}
    f = corpus_sequences[0][0]
    img = by_id[f"{f.sequence_id}_{f.frame_index:06d}"]
    np.testing.assert_array_equal(img.rgb, f.rgb)
    # labeled foreground and the person mask agree
    np.testing.assert_array_equal(img.labels != null_id(), f.person_mask)


def test_ground_truth_tags_written(corpus_root, corpus_sequence_dirs):
    records = load_ground_truth(corpus_root / "ground_truth.tsv")
    assert {r.sequence_id for r in records} == {d.name for d in corpus_sequence_dirs}
    for r in records:
        assert r.tags == frozenset(fx.FIXTURE_TAGS)


def test_frame_offset_changes_noise_not_identity(tmp_path):
    fx.generate_fixture(tmp_path / "a", seed=9, n_subjects=1, frames_per_subject=1)
    fx.generate_fixture(tmp_path / "b", seed=9, n_subjects=1, frames_per_subject=1,
                        frame_offset=50)
    ra = (tmp_path / "a" / "subject01" / "frame_000000.rgb.png").read_bytes()
    rb = (tmp_path / "b" / "subject01" / "frame_000000.rgb.png").read_bytes()
    assert ra != rb  # different noise stream
    fa = load_sequence(tmp_path / "a" / "subject01")[0]
    fb = load_sequence(tmp_path / "b" / "subject01")[0]
    # same subject: skeleton geometry stays close (sub-pixel jitter only)
    ja = np.array([j.position3d for j in fa.skeleton])
    jb = np.array([j.position3d for j in fb.skeleton])
    assert np.abs(ja - jb).max() < 0.3


def test_color_permutation_swaps_wardrobes(tmp_path):
    fx.generate_fixture(tmp_path / "plain", seed=4, n_subjects=2,
                        frames_per_subject=1)
    fx.generate_fixture(tmp_path / "swapped", seed=4, n_subjects=2,
                        frames_per_subject=1, color_permutation=[1, 0])
    plain = load_sequence(tmp_path / "plain" / "subject01")[0]
    swapped = load_sequence(tmp_path / "swapped" / "subject01")[0]
    # geometry identical, clothing colors exchanged
    np.testing.assert_array_equal(plain.person_mask, swapped.person_mask)
    assert (plain.rgb[plain.person_mask] != swapped.rgb[swapped.person_mask]).any()


def test_color_permutation_validation(tmp_path):
    with pytest.raises(ValueError):
        fx.generate_fixture(tmp_path, n_subjects=2, color_permutation=[0, 0])
    with pytest.raises(ValueError):
        fx.generate_fixture(tmp_path, n_subjects=0)


def test_z_range_respected(tmp_path):
    fx.generate_fixture(tmp_path, seed=2, n_subjects=1, frames_per_subject=2,
                        z_range=(1.8, 2.0))
    frames = load_sequence(tmp_path / "subject01")
    for f in frames:
        z = np.array([j.position3d[2] for j in f.skeleton])
        assert z.min() > 1.5 and z.max() < 2.3
        depth_m = f.depth[f.person_mask].astype(float) / 1000.0
        assert 1.5 < depth_m.mean() < 2.3


def test_corpus_split_layout(tmp_path):
    out = fx.generate_corpus(tmp_path, seed=0, n_train=2, n_test=3)
    assert len(out["train"]) == 2 and len(out["test"]) == 3
    # test subjects continue the numbering after the train block
    assert out["test"][0].name == "subject03"
    f = load_sequence(out["train"][0])[0]
    assert f.rgb.shape == (96, 64, 3)
