"""Segmentation of BLOC documents and selection of segment pairs."""

from __future__ import annotations

from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Sequence

from .bloc import BlocDocument

SEGMENTATIONS = ("pauses", "weeks", "sets_of_k")
SELECTIONS = ("adjacent", "cumulative")
DISTANCES = ("cosine", "compression")


class InsufficientSegmentsError(ValueError):
    pass


def _norm(name: str) -> str:
    return name.strip().lower().replace("-", "_")


@dataclass(frozen=True)
class ChangeSetting:
    segmentation: str = "sets_of_k"
    selection: str = "cumulative"
    distance: str = "compression"
    k: int = 4
    pause_threshold: float = 3600
    count_pauses: bool = False  # sets_of_k: whether pause glyphs count toward k

    def __post_init__(self):
        object.__setattr__(self, "segmentation", _norm(self.segmentation))
        object.__setattr__(self, "selection", _norm(self.selection))
        object.__setattr__(self, "distance", _norm(self.distance))
        if self.segmentation not in SEGMENTATIONS:
            raise ValueError(f"unknown segmentation {self.segmentation!r}")
        if self.selection not in SELECTIONS:
            raise ValueError(f"unknown selection {self.selection!r}")
        if self.distance not in DISTANCES:
            raise ValueError(f"unknown distance {self.distance!r}")
        if self.segmentation == "sets_of_k" and self.k < 2:
            raise ValueError("k must be >= 2 for sets_of_k segmentation")
        if self.pause_threshold <= 0:
            raise ValueError("pause_threshold must be positive")

    @property
    def segmentation_label(self) -> str:
        if self.segmentation == "sets_of_k":
            return f"sets-of-{self.k}"
        return self.segmentation

    @property
    def name(self) -> str:
        return f"{self.segmentation_label}/{self.selection}/{self.distance}"

    def to_dict(self) -> dict:
        return {
            "segmentation": self.segmentation,
            "selection": self.selection,
            "distance": self.distance,
            "k": self.k,
            "pause_threshold": self.pause_threshold,
            "count_pauses": self.count_pauses,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ChangeSetting":
        return cls(**d)


@dataclass(frozen=True)
class Segment:
    index: int
    action_symbols: str
    content_symbols: str
    start_time: int
    end_time: int
    n_events: int


@dataclass(frozen=True)
class SegmentPair:
    left: Segment
    right: Segment
    left_indices: tuple[int, ...]


def _span(doc: BlocDocument, index: int, lo: int, hi: int) -> Segment:
    """Segment over events lo..hi-1; the pause before event lo is not included."""
    parts = [doc.actions[lo]]
    for i in range(lo + 1, hi):
        parts.append(doc.pauses[i])
        parts.append(doc.actions[i])
    return Segment(
        index=index,
        action_symbols="".join(parts),
        content_symbols="".join(doc.content_words[lo:hi]),
        start_time=doc.timestamps[lo],
        end_time=doc.timestamps[hi - 1],
        n_events=hi - lo,
    )


def _from_boundaries(doc: BlocDocument, starts: Sequence[int]) -> list[Segment]:
    ends = list(starts[1:]) + [len(doc)]
    return [_span(doc, i, lo, hi) for i, (lo, hi) in enumerate(zip(starts, ends))]


def _require(doc: BlocDocument):
    if len(doc) == 0:
        raise ValueError("cannot segment an empty document")


def segment_by_pauses(doc: BlocDocument, threshold: float = 3600) -> list[Segment]:
    """New segment after every inter-event gap longer than ``threshold`` seconds."""
    _require(doc)
    ts = doc.timestamps
    starts = [0] + [i for i in range(1, len(ts)) if ts[i] - ts[i - 1] > threshold]
    return _from_boundaries(doc, starts)


def iso_week(ts: int) -> tuple[int, int]:
    year, week, _ = datetime.fromtimestamp(ts, tz=timezone.utc).isocalendar()
    return year, week


def segment_by_weeks(doc: BlocDocument) -> list[Segment]:
    """One segment per active ISO-8601 week (UTC)."""
    _require(doc)
    weeks = [iso_week(t) for t in doc.timestamps]
    starts = [0] + [i for i in range(1, len(weeks)) if weeks[i] != weeks[i - 1]]
    return _from_boundaries(doc, starts)


def segment_by_sets_of_k(doc: BlocDocument, k: int = 4, count_pauses: bool = False) -> list[Segment]:
    """Consecutive sets of ``k`` action symbols; a shorter final set is kept.

    With ``count_pauses`` the raw action string (pause glyphs included) is cut
    into k-character chunks instead.
    """
    _require(doc)
    if k < 2:
        raise ValueError("k must be >= 2")
    if not count_pauses:
        return _from_boundaries(doc, list(range(0, len(doc), k)))

    # (glyph, event index or None for pauses)
    stream = []
    for i, (p, a) in enumerate(zip(doc.pauses, doc.actions)):
        if p:
            stream.append((p, None))
        stream.append((a, i))
    segments = []
    for index, lo in enumerate(range(0, len(stream), k)):
        chunk = stream[lo:lo + k]
        events = [e for _, e in chunk if e is not None]
        segments.append(Segment(
            index=index,
            action_symbols="".join(g for g, _ in chunk),
            content_symbols="".join(doc.content_words[e] for e in events),
            start_time=doc.timestamps[events[0]],
            end_time=doc.timestamps[events[-1]],
            n_events=len(events),
        ))
    return segments


def segment(doc: BlocDocument, setting: ChangeSetting) -> list[Segment]:
    if setting.segmentation == "pauses":
        return segment_by_pauses(doc, setting.pause_threshold)
    if setting.segmentation == "weeks":
        return segment_by_weeks(doc)
    return segment_by_sets_of_k(doc, setting.k, setting.count_pauses)


def concat(segments: Sequence[Segment]) -> Segment:
    """Join segments in order with nothing inserted at the junctions."""
    return Segment(
        index=segments[-1].index,
        action_symbols="".join(s.action_symbols for s in segments),
        content_symbols="".join(s.content_symbols for s in segments),
        start_time=segments[0].start_time,
        end_time=segments[-1].end_time,
        n_events=sum(s.n_events for s in segments),
    )


def select_pairs(segments: Sequence[Segment], selection: str = "adjacent") -> list[SegmentPair]:
    """Adjacent: (s1,s2),(s2,s3),...  Cumulative: (s1,s2),(s1s2,s3),...

    ``n`` segments give ``n - 1`` pairs under either selection.
    """
    selection = _norm(selection)
    if selection not in SELECTIONS:
        raise ValueError(f"unknown selection {selection!r}")
    if len(segments) < 2:
        raise InsufficientSegmentsError(f"need at least 2 segments, got {len(segments)}")
    pairs = []
    if selection == "adjacent":
        for a, b in zip(segments, segments[1:]):
            pairs.append(SegmentPair(a, b, (a.index,)))
        return pairs
    history = segments[0]
    for i in range(1, len(segments)):
        pairs.append(SegmentPair(history, segments[i], tuple(s.index for s in segments[:i])))
        history = concat([history, segments[i]])
    return pairs

