"""Canonical clothing label vocabulary.

The vocabulary ships as a versioned text asset, one label per line. A label's
id is the number of lines preceding it (zero-based). The final three entries
are always ``hair``, ``skin`` and ``null``; everything before them is a
clothing label.
"""

from functools import lru_cache
from importlib import resources

from reidkit.errors import VocabularyError

HAIR = "hair"
SKIN = "skin"
NULL = "null"
NON_CLOTHING = (HAIR, SKIN, NULL)


@lru_cache(maxsize=1)
def load_vocabulary() -> tuple[str, ...]:
    """Return the canonical label list, ordered, id = position."""
    text = resources.files("reidkit.assets").joinpath("vocabulary.txt").read_text("utf-8")
    labels = tuple(line.strip() for line in text.splitlines() if line.strip())
    if labels[-3:] != NON_CLOTHING:
        raise VocabularyError("vocabulary asset must end with hair, skin, null")
    return labels


@lru_cache(maxsize=1)
def label_ids() -> dict[str, int]:
    return {name: i for i, name in enumerate(load_vocabulary())}


def clothing_labels() -> tuple[str, ...]:
    return load_vocabulary()[:-3]


def label_id(name: str) -> int:
    try:
        return label_ids()[name]
    except KeyError:
        raise VocabularyError(f"unknown label {name!r}") from None


def null_id() -> int:
    return label_id(NULL)


def validate_tags(tags, *, context: str = "") -> set[str]:
    """Check every tag against the vocabulary; returns the tag set."""
    known = label_ids()
    bad = sorted(t for t in tags if t not in known)
    if bad:
        where = f" in {context}" if context else ""
        raise VocabularyError(f"unknown tag(s) {', '.join(bad)}{where}")
    return set(tags)
