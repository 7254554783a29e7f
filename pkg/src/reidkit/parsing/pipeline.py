"""End-to-end clothing parse of one query image."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from reidkit.colornames import item_color
from reidkit.config import Config
from reidkit.data.vocab import load_vocabulary
from reidkit.features import stack
from reidkit.features.skinhair import SkinHairModel
from reidkit.parsing import segmentation
from reidkit.parsing.bow import BowVocabulary, bow_histograms
from reidkit.parsing.combine import ParseResult, ParseWeights, combine
from reidkit.parsing.fashion import FashionGallery
from reidkit.parsing.global_model import GlobalParseModel, global_parse
from reidkit.parsing.transfer import transfer_parse
from reidkit.retrieval.gallery import vote_tags


@dataclass
class ParseModels:
    skin_hair: SkinHairModel
    global_model: GlobalParseModel
    bow: BowVocabulary
    fashion: FashionGallery


def parse_query(rgb: np.ndarray, pose2d: np.ndarray, person_mask: np.ndarray,
                descriptor: np.ndarray, models: ParseModels,
                config: Config | None = None) -> tuple[ParseResult, dict[str, str]]:
    """Parse one image into clothing items and name each item's color.

    The descriptor drives attribute retrieval (tau); rgb + pose drive the
    per-pixel terms.
    """
    config = config or Config()
    h, w = person_mask.shape

    ids, _ = models.fashion.index.knn(descriptor, min(config.fashion_k,
                                                      models.fashion.index.size))
    neighbors = [models.fashion.entries[i] for i in ids]
    tau = vote_tags([e.tags for e in neighbors], config.vote_min)

    uv, tracked = stack.joints_from_pose2d(pose2d, w, h)
    base = stack.base_features(rgb, uv, tracked,
                               lbp_window=config.lbp_window, cell_size=config.hog_cell)
    s_global = global_parse(models.global_model, base, tau)

    sp_labels = segmentation.oversegment(rgb, config.felz_k, config.felz_sigma,
                                         config.felz_min_size)
    sps = segmentation.superpixel_stats(sp_labels, pose2d)
    bows = bow_histograms(base, sp_labels, models.bow)
    centroids = np.stack([sp.centroid_norm for sp in sps])
    s_transfer = transfer_parse(sp_labels, centroids, bows, neighbors, tau,
                                config.match_radius)

    weights = ParseWeights(config.lambda1, config.lambda2)
    result = combine(s_global, s_transfer, weights, tau, person_mask)

    colors = {}
    for name, mask in result.item_masks.items():
        if name in ("skin", "hair"):
            continue
        colors[name] = item_color(rgb, mask, config.color_space)
    return result, colors


def predicted_tags(result: ParseResult) -> frozenset[str]:
    """Clothing labels that actually won pixels in the MAP assignment."""
    vocab = load_vocabulary()
    present = np.unique(result.label_map)
    return frozenset(vocab[i] for i in present
                     if vocab[i] not in ("skin", "hair", "null"))
