"""BLOC action/pause and content encoding of an account timeline."""

from __future__ import annotations

from dataclasses import dataclass

from .ingest import AccountTimeline, PostEvent

HOUR = 3600
DAY = 86400
MONTH = 30 * DAY

ACTION_SYMBOLS = {"post": "T", "reshare": "r", "reply": "p"}
# (upper bound inclusive, glyph); gaps above the last bound are 'Y'
PAUSE_CLASSES = ((HOUR, "."), (DAY, "d"), (MONTH, "D"))
LONG_PAUSE = "Y"
PAUSE_SYMBOLS = frozenset(g for _, g in PAUSE_CLASSES) | {LONG_PAUSE}
CONTENT_ORDER = ("E", "m", "U", "H", "t")
CONTENT_SYMBOLS = frozenset(CONTENT_ORDER)

DEFAULT_PAUSE_FLOOR = 60


class EmptyTimelineError(ValueError):
    pass


def pause_symbol(gap: int, pause_floor: int = DEFAULT_PAUSE_FLOOR) -> str:
    """Glyph for an inter-event gap in seconds; '' when the gap is not a pause."""
    if gap <= pause_floor:
        return ""
    for upper, glyph in PAUSE_CLASSES:
        if gap <= upper:
            return glyph
    return LONG_PAUSE


def content_word(event: PostEvent) -> str:
    c = event.content
    return ("E" * c.media + "m" * c.mentions + "U" * c.links + "H" * c.hashtags
            + ("t" if c.text_terms > 0 else ""))


@dataclass(frozen=True)
class BlocDocument:
    """Paired BLOC strings for one account.

    ``pauses[i]`` is the pause glyph between event i-1 and event i ('' when
    the gap is at or under the pause floor); ``pauses[0]`` is always ''.
    """

    account_id: str
    actions: tuple[str, ...]
    pauses: tuple[str, ...]
    content_words: tuple[str, ...]
    timestamps: tuple[int, ...]

    def __len__(self):
        return len(self.actions)

    @property
    def action_string(self) -> str:
        return "".join(p + a for p, a in zip(self.pauses, self.actions))

    @property
    def event_offsets(self) -> dict[int, int]:
        offsets = {}
        pos = 0
        for i, (p, a) in enumerate(zip(self.pauses, self.actions)):
            pos += len(p)
            offsets[pos] = i
            pos += len(a)
        return offsets


def encode(timeline: AccountTimeline, pause_floor: int = DEFAULT_PAUSE_FLOOR) -> BlocDocument:
    events = timeline.events
    if not events:
        raise EmptyTimelineError(f"account {timeline.account_id!r} has no events")
    pauses = [""]
    for prev, cur in zip(events, events[1:]):
        gap = cur.timestamp - prev.timestamp
        if gap < 0:
            raise ValueError(f"account {timeline.account_id!r}: events are not time ordered")
        pauses.append(pause_symbol(gap, pause_floor))
    return BlocDocument(
        account_id=timeline.account_id,
        actions=tuple(ACTION_SYMBOLS[e.action] for e in events),
        pauses=tuple(pauses),
        content_words=tuple(content_word(e) for e in events),
        timestamps=tuple(e.timestamp for e in events),
    )


def render(document: BlocDocument, view: str = "action") -> str:
    if view == "action":
        return document.action_string
    if view == "content":
        return "".join(f"({w})" for w in document.content_words)
    raise ValueError(f"unknown view {view!r}")
