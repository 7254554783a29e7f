"""Tunable parameters, overridable from a JSON file or CLI flags."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path


@dataclass
class Config:
    # pixel features
    lbp_window: int = 15
    hog_cell: int = 8

    # appearance descriptor
    pca_dim: int = 64
    skeleton_weight: float = 1.0
    include_pose_channels: bool = False
    pool_whole_body: bool = False

    # retrieval
    identify_k: int = 5
    fashion_k: int = 25
    vote_min: int = 2

    # oversegmentation + label transfer
    felz_k: float = 100.0
    felz_sigma: float = 0.5
    felz_min_size: int = 20
    bow_words: int = 50
    match_radius: float = 0.25
    lambda1: float = 1.0
    lambda2: float = 1.0

    # color naming
    color_space: str = "lab"  # "lab" or "rgb"

    # service
    host: str = "127.0.0.1"
    port: int = 7643

    def override(self, values: dict) -> "Config":
        known = {f.name for f in dataclasses.fields(self)}
        unknown = set(values) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return dataclasses.replace(self, **values)

    @classmethod
    def from_file(cls, path: str | Path) -> "Config":
        return cls().override(json.loads(Path(path).read_text()))
