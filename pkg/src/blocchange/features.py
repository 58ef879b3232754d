"""Behavioral-change histograms: the 20-value feature vector per account."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .bloc import BlocDocument
from .distance import DEFAULT_CODEC, pair_distances
from .segment import ChangeSetting, select_pairs, segment

DEFAULT_BINS = 10
MIN_SEGMENTS = 3

INSUFFICIENT_SEGMENTS = "insufficient segments"
NO_CONTENT_DISTANCES = "no content distances"


class EmptyDistancesError(ValueError):
    pass


def bin_edges(bins: int = DEFAULT_BINS) -> np.ndarray:
    # i / bins rather than linspace: linspace(0, 1, 11)[3] is 0.30000000000000004,
    # which would push 0.3 into bin 2
    return np.array([i / bins for i in range(bins)])


def bin_index(values, bins: int = DEFAULT_BINS) -> np.ndarray:
    """Bin i covers [i/bins, (i+1)/bins); the last bin also takes 1.0."""
    idx = np.searchsorted(bin_edges(bins), np.asarray(values, dtype=float), side="right") - 1
    return np.clip(idx, 0, bins - 1)


def build_histogram(distances: Sequence[float], bins: int = DEFAULT_BINS,
                    normalize: bool = True) -> np.ndarray:
    if len(distances) == 0:
        raise EmptyDistancesError("no distance values")
    d = np.asarray(distances, dtype=float)
    if np.any(d < 0) or np.any(d > 1) or np.any(np.isnan(d)):
        raise ValueError("distances must lie in [0, 1]")
    counts = np.bincount(bin_index(d, bins), minlength=bins).astype(float)
    if normalize:
        counts /= len(d)
    return counts


@dataclass
class ChangeFeatures:
    account_id: str
    action_hist: np.ndarray
    content_hist: np.ndarray
    n_action_distances: int
    n_content_distances: int
    n_segments: int = 0
    label: Optional[str] = None

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.action_hist, self.content_hist])


@dataclass(frozen=True)
class Exclusion:
    account_id: str
    reason: str
    n_segments: int = 0


@dataclass
class FeatureOptions:
    bins: int = DEFAULT_BINS
    normalize: bool = True
    action_only: bool = False
    codec: str = DEFAULT_CODEC


def account_distances(doc: BlocDocument, setting: ChangeSetting, codec: str = DEFAULT_CODEC):
    """Segment, pair, and measure; returns (n_segments, action values, content values)."""
    segs = segment(doc, setting)
    if len(segs) < 2:
        return len(segs), [], []
    action, content = [], []
    for pair in select_pairs(segs, setting.selection):
        a, c = pair_distances(pair, setting, codec)
        if a is not None:
            action.append(a.value)
        if c is not None:
            content.append(c.value)
    return len(segs), action, content


def account_features(doc: BlocDocument, setting: ChangeSetting,
                     options: Optional[FeatureOptions] = None, label: Optional[str] = None):
    """ChangeFeatures for one account, or an Exclusion with the reason."""
    opts = options or FeatureOptions()
    n_segs, action, content = account_distances(doc, setting, opts.codec)
    if n_segs < MIN_SEGMENTS:
        return Exclusion(doc.account_id, INSUFFICIENT_SEGMENTS, n_segs)
    if not content and not opts.action_only:
        return Exclusion(doc.account_id, NO_CONTENT_DISTANCES, n_segs)
    action_hist = build_histogram(action, opts.bins, opts.normalize)
    if content:
        content_hist = build_histogram(content, opts.bins, opts.normalize)
    else:
        content_hist = np.zeros(opts.bins)
    return ChangeFeatures(doc.account_id, action_hist, content_hist,
                          len(action), len(content), n_segs, label)


def feature_header(bins: int = DEFAULT_BINS) -> list[str]:
    return (["account_id", "label"] + [f"a{i}" for i in range(bins)]
            + [f"c{i}" for i in range(bins)])


def _fmt(x: float) -> str:
    return repr(float(x))


def write_features(path, features: Iterable[ChangeFeatures], bins: int = DEFAULT_BINS) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(feature_header(bins))
        for f in features:
            w.writerow([f.account_id, f.label or ""] + [_fmt(v) for v in f.vector])


def read_features(path) -> list[ChangeFeatures]:
    out = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        bins = (len(header) - 2) // 2
        for row in reader:
            vals = np.array([float(v) for v in row[2:]])
            out.append(ChangeFeatures(row[0], vals[:bins], vals[bins:], 0, 0,
                                      label=row[1] or None))
    return out
