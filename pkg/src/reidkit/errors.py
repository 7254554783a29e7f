"""Exception hierarchy shared across the toolkit."""


class ReidError(Exception):
    """Base class for all toolkit errors."""


class LoadError(ReidError):
    """A dataset or model file could not be read; message names the file."""


class FormatError(ReidError):
    """A persisted binary blob has a bad magic, version, or is truncated."""


class DimensionError(ReidError):
    """Vector or image dimensions do not match what a model/index expects."""


class DegenerateSkeletonError(ReidError):
    """Skeleton geometry makes a requested feature undefined (zero-length limb)."""


class VocabularyError(ReidError):
    """A tag string falls outside the canonical label vocabulary."""


class ProtocolError(ReidError):
    """Malformed wire message or unexpected reply."""
