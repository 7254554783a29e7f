import numpy as np
import pytest

from reidkit.config import Config
from reidkit.data import fixture as fixture_mod
from reidkit.data.io import load_annotated_dir, load_sequence
from reidkit.descriptor.pipeline import collect_training_stats, frame_appearance_vector
from reidkit.descriptor.pca import train_pca
from reidkit.features import stack
from reidkit.features.skinhair import train_skin_hair
from reidkit.skeleton import gate_frame


def base_features_for(annotated, config=None):
    config = config or Config()
    h, w = annotated.labels.shape
    uv, tracked = stack.joints_from_pose2d(annotated.pose2d, w, h)
    return stack.base_features(annotated.rgb, uv, tracked,
                               lbp_window=config.lbp_window, cell_size=config.hog_cell)


@pytest.fixture(scope="session")
def corpus_root(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    fixture_mod.generate_fixture(root, seed=3, n_subjects=4, frames_per_subject=3)
    return root


@pytest.fixture(scope="session")
def corpus_sequence_dirs(corpus_root):
    return sorted(d for d in corpus_root.iterdir() if (d / "calib.json").exists())


@pytest.fixture(scope="session")
def corpus_sequences(corpus_sequence_dirs):
    return [load_sequence(d) for d in corpus_sequence_dirs]


@pytest.fixture(scope="session")
def corpus_annotated(corpus_root):
    return load_annotated_dir(corpus_root / "annotated")


@pytest.fixture(scope="session")
def skin_hair_model(corpus_annotated):
    return train_skin_hair(corpus_annotated, base_features_for, max_epochs=200)


@pytest.fixture(scope="session")
def pca_model(corpus_sequences, skin_hair_model):
    config = Config()
    pooled = [frame_appearance_vector(f, skin_hair_model, config)
              for frames in corpus_sequences for f in frames if gate_frame(f)]
    stats = collect_training_stats(corpus_sequences)
    return train_pca(np.stack(pooled), k=min(8, len(pooled) - 1), skeleton_stats=stats)
