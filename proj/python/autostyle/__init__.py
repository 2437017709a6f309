"""Photo stylization: Gaussian chroma transfer, parametric tone curves,
style indexing, and diverse style selection."""

from autostyle._autostyle import (
    AutostyleError,
    Descriptor,
    Index,
    __version__,
    build_index,
    describe,
    frechet,
    hellinger,
    read_image,
    semantic_feature,
    style_similarity,
    transfer,
    transfer_image,
    write_image,
)

__all__ = [
    "AutostyleError",
    "Descriptor",
    "Index",
    "__version__",
    "build_index",
    "describe",
    "frechet",
    "hellinger",
    "read_image",
    "semantic_feature",
    "style_similarity",
    "transfer",
    "transfer_image",
    "write_image",
]
