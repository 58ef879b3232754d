"""Cosine and normalized compression distance between symbol strings."""

from __future__ import annotations

import logging
import math
import zlib
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from . import deflate
from .segment import ChangeSetting, SegmentPair

log = logging.getLogger(__name__)

ZLIB_LEVEL = 9
DEFAULT_CODEC = "deflate"
CODECS = ("deflate", "zlib")


class DegenerateSegmentError(ValueError):
    """One side of a pair has no symbols in the requested view."""


@dataclass(frozen=True)
class DistanceValue:
    value: float
    measure: str
    view: str


def codec_params(codec: str = DEFAULT_CODEC) -> dict:
    if codec == "deflate":
        return dict(deflate.PARAMS)
    if codec == "zlib":
        return {"codec": "zlib", "level": ZLIB_LEVEL, "zlib_version": zlib.ZLIB_RUNTIME_VERSION}
    raise ValueError(f"unknown codec {codec!r}")


@lru_cache(maxsize=65536)
def compressed_length(s: str, codec: str = DEFAULT_CODEC) -> int:
    data = s.encode("utf-8")
    if codec == "deflate":
        return deflate.compressed_size(data)
    if codec == "zlib":
        return len(zlib.compress(data, ZLIB_LEVEL))
    raise ValueError(f"unknown codec {codec!r}")


def _check(a: str, b: str):
    if not a or not b:
        raise DegenerateSegmentError("empty symbol string")


def cosine(a: str, b: str) -> float:
    """1 - cos between unigram symbol-count vectors of ``a`` and ``b``."""
    _check(a, b)
    va, vb = Counter(a), Counter(b)
    if va == vb:
        return 0.0
    # integer dot product and norms keep the result symmetric and order-free
    dot = sum(n * vb[s] for s, n in va.items())
    na = sum(n * n for n in va.values())
    nb = sum(n * n for n in vb.values())
    return min(1.0, max(0.0, 1.0 - dot / math.sqrt(na * nb)))


def ncd(a: str, b: str, codec: str = DEFAULT_CODEC) -> float:
    """Normalized compression distance, clamped to [0, 1].

    The concatenation is compressed left-then-right.
    """
    _check(a, b)
    ca = compressed_length(a, codec)
    cb = compressed_length(b, codec)
    cab = compressed_length(a + b, codec)
    raw = (cab - min(ca, cb)) / max(ca, cb)
    return min(1.0, max(0.0, raw))


def cosine_distance(a: str, b: str) -> DistanceValue:
    return DistanceValue(cosine(a, b), "cosine", "")


def compression_distance(a: str, b: str, codec: str = DEFAULT_CODEC) -> DistanceValue:
    return DistanceValue(ncd(a, b, codec), "compression", "")


def measure(a: str, b: str, distance: str, codec: str = DEFAULT_CODEC) -> float:
    if distance == "cosine":
        return cosine(a, b)
    if distance == "compression":
        return ncd(a, b, codec)
    raise ValueError(f"unknown distance {distance!r}")


def pair_distances(pair: SegmentPair, setting: ChangeSetting, codec: str = DEFAULT_CODEC
                   ) -> tuple[Optional[DistanceValue], Optional[DistanceValue]]:
    """(action, content) distances for one pair; a degenerate view yields None."""
    out = []
    for view, left, right in (
        ("action", pair.left.action_symbols, pair.right.action_symbols),
        ("content", pair.left.content_symbols, pair.right.content_symbols),
    ):
        try:
            out.append(DistanceValue(measure(left, right, setting.distance, codec),
                                     setting.distance, view))
        except DegenerateSegmentError:
            log.debug("skipping degenerate %s view for segment %d", view, pair.right.index)
            out.append(None)
    return out[0], out[1]
