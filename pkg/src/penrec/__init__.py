"""Online handwriting recognition with beta-elliptic stroke features.

Pipeline: ink traces are size-normalized and smoothed, cut into velocity
segments, described by a 21-dimensional feature vector per segment, scored
by per-class neural networks, vector-quantized, and decoded against a
lexicon with discrete left-to-right hidden Markov models.
"""

__version__ = "0.1.0"

from .ink import InkPoint, InkTrace, InkFormatError, parse_ink, write_ink

__all__ = [
    "InkPoint",
    "InkTrace",
    "InkFormatError",
    "parse_ink",
    "write_ink",
    "__version__",
]
