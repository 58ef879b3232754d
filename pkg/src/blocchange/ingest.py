"""Event-log and label ingestion, account eligibility, campaign windowing."""

from __future__ import annotations

import csv
import json
import logging
import random
from collections import defaultdict
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional

log = logging.getLogger(__name__)

ACTIONS = ("post", "reshare", "reply")
CONTENT_FIELDS = ("text_terms", "links", "hashtags", "media", "mentions")
TASKS = ("automation", "coordination")

DAY = 86400

_LABEL_ALIASES = {
    "positive": "positive", "1": "positive", "bot": "positive", "io": "positive",
    "negative": "negative", "0": "negative", "human": "negative", "control": "negative",
}


class IngestError(Exception):
    """Fatal ingestion failure (unreadable file, bad label file)."""


@dataclass(frozen=True)
class ContentCounts:
    text_terms: int = 0
    links: int = 0
    hashtags: int = 0
    media: int = 0
    mentions: int = 0

    def __post_init__(self):
        for name in CONTENT_FIELDS:
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")


@dataclass(frozen=True)
class PostEvent:
    account_id: str
    timestamp: int
    action: str
    content: ContentCounts = ContentCounts()

    def __post_init__(self):
        if self.timestamp <= 0:
            raise ValueError(f"timestamp must be positive, got {self.timestamp}")
        if self.action not in ACTIONS:
            raise ValueError(f"unknown action {self.action!r}")


@dataclass(frozen=True)
class Label:
    value: str  # "positive" | "negative"
    task: str
    campaign: Optional[str] = None


@dataclass(frozen=True)
class AccountTimeline:
    account_id: str
    events: tuple[PostEvent, ...]
    label: Optional[Label] = None

    def __len__(self):
        return len(self.events)


@dataclass
class LoadReport:
    path: str
    records: int = 0
    loaded: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)

    @property
    def n_errors(self) -> int:
        return len(self.errors)


@dataclass(frozen=True)
class Rejection:
    """Eligibility outcome for an account that does not meet the thresholds."""
    account_id: str
    reason: str
    n_events: int


def parse_timestamp(value) -> int:
    """Epoch seconds (int, or digit string) or ISO-8601 -> epoch seconds UTC.

    Naive ISO timestamps are taken to be UTC.
    """
    if isinstance(value, bool):
        raise ValueError("timestamp must not be boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        if not value.is_integer():
            raise ValueError(f"fractional epoch timestamp {value!r}")
        return int(value)
    if isinstance(value, str):
        s = value.strip()
        if s.isdigit():
            return int(s)
        if s.endswith("Z") or s.endswith("z"):
            s = s[:-1] + "+00:00"
        dt = datetime.fromisoformat(s)
        if dt.tzinfo is None:
            dt = dt.replace(tzinfo=timezone.utc)
        return int(dt.timestamp())
    raise ValueError(f"unsupported timestamp {value!r}")


def parse_record(record: dict) -> PostEvent:
    """Build a PostEvent from one decoded event-lines record."""
    for key in ("account_id", "timestamp", "action"):
        if key not in record or record[key] is None:
            raise ValueError(f"missing required field {key!r}")
    counts = {}
    for name in CONTENT_FIELDS:
        v = record.get(name, 0)
        if v is None:
            v = 0
        if isinstance(v, float) and v.is_integer():
            v = int(v)
        counts[name] = v
    return PostEvent(
        account_id=str(record["account_id"]),
        timestamp=parse_timestamp(record["timestamp"]),
        action=record["action"],
        content=ContentCounts(**counts),
    )


def event_to_record(event: PostEvent) -> dict:
    rec = {"account_id": event.account_id, "timestamp": event.timestamp, "action": event.action}
    for name in CONTENT_FIELDS:
        rec[name] = getattr(event.content, name)
    return rec


def group_events(events: Iterable[PostEvent], labels: Optional[dict] = None) -> dict[str, AccountTimeline]:
    """Group events per account; stable sort by timestamp keeps input order on ties."""
    by_account: dict[str, list[PostEvent]] = defaultdict(list)
    for ev in events:
        by_account[ev.account_id].append(ev)
    labels = labels or {}
    out = {}
    for account_id in sorted(by_account):
        evs = sorted(by_account[account_id], key=lambda e: e.timestamp)
        out[account_id] = AccountTimeline(account_id, tuple(evs), labels.get(account_id))
    return out


def load_events(path, format: str = "event-lines", labels: Optional[dict] = None):
    """Read an event-lines (JSON Lines) file.

    Returns ``(timelines, report)`` where ``timelines`` maps account_id to
    AccountTimeline (ordered by account id).  Malformed lines are not fatal:
    each is recorded in ``report.errors`` as ``(line_number, message)``.
    """
    if format != "event-lines":
        raise IngestError(f"unsupported format {format!r}")
    path = Path(path)
    report = LoadReport(str(path))
    events = []
    try:
        fh = path.open("r", encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            report.records += 1
            try:
                record = json.loads(line)
                if not isinstance(record, dict):
                    raise ValueError("record is not an object")
                events.append(parse_record(record))
            except (ValueError, TypeError) as exc:
                report.errors.append((lineno, str(exc)))
    report.loaded = len(events)
    if report.errors:
        log.warning("%s: %d malformed line(s), first at line %d",
                    path, report.n_errors, report.errors[0][0])
    return group_events(events, labels), report


def write_events(path, timelines: Iterable[AccountTimeline]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for tl in timelines:
            for ev in tl.events:
                fh.write(json.dumps(event_to_record(ev), separators=(",", ":")) + "\n")


def load_labels(path) -> dict[str, Label]:
    """Read ``account_id,label,task[,campaign]`` delimited text."""
    path = Path(path)
    try:
        fh = path.open("r", encoding="utf-8", newline="")
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    labels = {}
    with fh:
        reader = csv.DictReader(fh)
        missing = {"account_id", "label", "task"} - set(reader.fieldnames or ())
        if missing:
            raise IngestError(f"{path}: label file missing column(s) {sorted(missing)}")
        for row in reader:
            raw = (row["label"] or "").strip().lower()
            if raw not in _LABEL_ALIASES:
                raise IngestError(f"{path}:{reader.line_num}: unknown label {row['label']!r}")
            task = (row["task"] or "").strip()
            if task not in TASKS:
                raise IngestError(f"{path}:{reader.line_num}: unknown task {task!r}")
            campaign = (row.get("campaign") or "").strip() or None
            labels[row["account_id"]] = Label(_LABEL_ALIASES[raw], task, campaign)
    return labels


def write_labels(path, labels: dict[str, Label]) -> None:
    with_campaign = any(l.campaign for l in labels.values())
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["account_id", "label", "task"] + (["campaign"] if with_campaign else []))
        for account_id in sorted(labels):
            l = labels[account_id]
            w.writerow([account_id, l.value, l.task] + ([l.campaign or ""] if with_campaign else []))


def apply_eligibility(timeline: AccountTimeline, min_posts: int = 20, max_posts: int = 300):
    """Reject accounts with fewer than ``min_posts`` events; keep the latest ``max_posts``."""
    n = len(timeline.events)
    if n < min_posts:
        return Rejection(timeline.account_id, f"fewer than {min_posts} posts", n)
    if n > max_posts:
        return replace(timeline, events=timeline.events[n - max_posts:])
    return timeline


@dataclass
class CampaignWindow:
    accounts: list[AccountTimeline]
    start: Optional[int]
    end: Optional[int]
    n_positive: int
    n_control: int
    warning: Optional[str] = None


def _end_of_year(ts: int) -> int:
    year = datetime.fromtimestamp(ts, tz=timezone.utc).year
    return int(datetime(year + 1, 1, 1, tzinfo=timezone.utc).timestamp()) - 1


def window_campaign(accounts: Iterable[AccountTimeline], interval_days: int = 14,
                    target_accounts: int = 10, seed: int = 0) -> CampaignWindow:
    """Restrict a campaign to the period when its positive accounts were active.

    Positive activity is scanned in ``interval_days`` intervals from the first
    positive event; intervals without positive activity are skipped.  Once
    ``target_accounts`` distinct positive accounts have appeared, the window
    runs on to the end of that calendar year (UTC).  Controls are restricted to
    the same active intervals and an equal number are drawn with a seeded RNG.
    """
    accounts = sorted(accounts, key=lambda a: a.account_id)
    positives = [a for a in accounts if a.label and a.label.value == "positive" and a.events]
    controls = [a for a in accounts if a.label and a.label.value == "negative"]
    if not positives:
        return CampaignWindow([], None, None, 0, 0, warning="no positive accounts")

    pos_events = sorted(
        ((ev.timestamp, a.account_id) for a in positives for ev in a.events))
    start = pos_events[0][0]
    seen: set[str] = set()
    end = None
    for ts, account_id in pos_events:
        if account_id not in seen:
            seen.add(account_id)
            if len(seen) >= target_accounts:
                end = _end_of_year(ts)
                break
    warning = None
    if end is None:
        # target never reached: no window, every event is kept
        warning = f"only {len(seen)} positive accounts, fewer than target {target_accounts}"
        all_ts = [e.timestamp for a in accounts for e in a.events]
        start, end = min(all_ts), max(all_ts)

        def clip(tl):
            return tl
    else:
        width = interval_days * DAY
        active = {(ts - start) // width for ts, _ in pos_events if ts <= end}

        def clip(tl):
            evs = tuple(e for e in tl.events
                        if start <= e.timestamp <= end and (e.timestamp - start) // width in active)
            return replace(tl, events=evs)

    kept_pos = [t for t in map(clip, positives) if t.events]
    in_window = [t for t in map(clip, controls) if t.events]
    rng = random.Random(seed)
    n_ctrl = len(kept_pos)
    if len(in_window) < n_ctrl:
        chosen = in_window
        msg = f"only {len(in_window)} control accounts active in window, wanted {n_ctrl}"
        warning = f"{warning}; {msg}" if warning else msg
    else:
        idx = sorted(rng.sample(range(len(in_window)), n_ctrl))
        chosen = [in_window[i] for i in idx]
    out = sorted(kept_pos + chosen, key=lambda a: a.account_id)
    return CampaignWindow(out, start, end, len(kept_pos), len(chosen), warning)
