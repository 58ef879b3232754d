"""Seeded synthetic accounts for the four behavioral regimes.

Regimes:

stable_human
    Per-account action and content preferences with mild linear drift;
    pauses drawn from a log-uniform mixture over every pause class.
repetitive_bot
    A fixed burst template (actions and content) replayed on a schedule,
    with a small per-event chance of deviating.
erratic_bot
    The timeline is cut at seeded switch points into phases; consecutive
    phases use disjoint content vocabularies and alternate between an
    organic-looking and a single-action pattern.  Within a phase each
    session posts a different content symbol from the previous session.
coordinated_group
    Every account in the group replays one shared campaign script (sessions
    of actions and content) with timing jitter and occasional substitutions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from .ingest import (ACTIONS, AccountTimeline, ContentCounts, Label, PostEvent,
                     write_events, write_labels)

REGIMES = ("stable_human", "repetitive_bot", "erratic_bot", "coordinated_group")
_REGIME_CODE = {r: i for i, r in enumerate(REGIMES)}
DEFAULT_START = int(datetime(2021, 1, 4, tzinfo=timezone.utc).timestamp())

MIN_EVENTS = 20

# pause-class bounds in seconds: sub-floor, '.', 'd', 'D', 'Y'
PAUSE_BOUNDS = ((5, 60), (61, 3600), (3601, 86400), (86401, 30 * 86400), (30 * 86400 + 1, 75 * 86400))
HUMAN_PAUSE_WEIGHTS = (0.15, 0.40, 0.33, 0.115, 0.005)
# controls active over the same few weeks as a campaign
CONTROL_PAUSE_WEIGHTS = (0.20, 0.45, 0.33, 0.02, 0.0)

VOCAB_GROUPS = (("U", "t"), ("H", "E", "m"))
_CONTENT_FIELD = {"t": "text_terms", "U": "links", "H": "hashtags", "E": "media", "m": "mentions"}


class SynthConfigError(ValueError):
    pass


@dataclass
class RegimeSpec:
    regime: str
    n_accounts: int
    n_events: int = 120
    seed: int = 0
    label: Optional[str] = None  # default: negative for stable_human, else positive
    task: str = "automation"
    campaign: Optional[str] = None
    id_prefix: str = ""
    start: int = DEFAULT_START
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise SynthConfigError(f"unknown regime {self.regime!r}")
        if self.n_accounts < 0:
            raise SynthConfigError("n_accounts must be >= 0")
        if self.n_events < MIN_EVENTS:
            raise SynthConfigError(f"n_events must be >= {MIN_EVENTS}")
        if self.label is None:
            self.label = "negative" if self.regime == "stable_human" else "positive"
        if self.label not in ("positive", "negative"):
            raise SynthConfigError(f"bad label {self.label!r}")


def _loguniform(rng, lo, hi) -> int:
    return int(round(math.exp(rng.uniform(math.log(lo), math.log(hi)))))


def _pause(rng, weights) -> int:
    cls = rng.choice(len(PAUSE_BOUNDS), p=np.asarray(weights) / np.sum(weights))
    return _loguniform(rng, *PAUSE_BOUNDS[cls])


def _counts(word: str) -> ContentCounts:
    kw = {name: 0 for name in _CONTENT_FIELD.values()}
    for ch in word:
        kw[_CONTENT_FIELD[ch]] += 1
    if kw["text_terms"]:
        kw["text_terms"] = 3 + kw["text_terms"]  # any positive term count encodes as one 't'
    return ContentCounts(**kw)


def _random_word(rng, prefs) -> str:
    """Content word from per-symbol propensities: text is Bernoulli, others Poisson."""
    text_p, rates = prefs
    word = ""
    for sym, rate in zip("EmUH", rates):
        word += sym * int(rng.poisson(rate))
    if rng.random() < text_p:
        word += "t"
    return word


def _random_prefs(rng):
    return float(rng.uniform(0.5, 1.0)), rng.gamma(1.0, 0.5, size=4)


def _human(rng, spec: RegimeSpec):
    p = spec.params
    drift = p.get("drift", 0.3)
    a0 = rng.dirichlet(np.ones(3))
    a1 = (1 - drift) * a0 + drift * rng.dirichlet(np.ones(3))
    c0 = _random_prefs(rng)
    c1 = _random_prefs(rng)
    weights = p.get("pause_weights", HUMAN_PAUSE_WEIGHTS)
    t = spec.start + int(rng.integers(0, 14 * 86400))
    out = []
    n = spec.n_events
    for i in range(n):
        f = i / max(1, n - 1)
        aw = (1 - f) * a0 + f * a1
        text_p = (1 - f) * c0[0] + f * c1[0]
        rates = (1 - f * drift) * c0[1] + f * drift * c1[1]
        action = ACTIONS[rng.choice(3, p=aw / aw.sum())]
        out.append((t, action, _random_word(rng, (text_p, rates))))
        t += _pause(rng, weights)
    return out


def _repetitive(rng, spec: RegimeSpec):
    p = spec.params
    burst = int(p.get("burst", rng.integers(3, 7)))
    noise = p.get("noise", 0.02)
    prefs = _random_prefs(rng)
    template = [(ACTIONS[rng.integers(0, 3)], _random_word(rng, prefs) or "t") for _ in range(burst)]
    intra = int(rng.integers(90, 600))
    inter = int(rng.integers(4, 13)) * 3600
    t = spec.start + int(rng.integers(0, 14 * 86400))
    out = []
    for i in range(spec.n_events):
        action, word = template[i % burst]
        if rng.random() < noise:
            action = ACTIONS[rng.integers(0, 3)]
            word = _random_word(rng, prefs)
        out.append((t, action, word))
        if (i + 1) % burst == 0:
            t += inter + int(rng.integers(-300, 301))
        else:
            t += intra + int(rng.integers(-10, 11))
    return out


def _erratic(rng, spec: RegimeSpec):
    p = spec.params
    n = spec.n_events
    session = int(p.get("session", 4))
    n_switches = int(p.get("switches", 3))
    # switch points fall on session boundaries
    slots = np.arange(session, n, session)
    if session < 1 or not 0 <= n_switches <= len(slots):
        raise SynthConfigError(f"switches must be in [0, {len(slots)}] for session size {session}")
    cuts = sorted(int(c) for c in rng.choice(slots, size=n_switches, replace=False))
    bounds = [0] + cuts + [n]
    first_group = int(rng.integers(0, len(VOCAB_GROUPS)))
    t = spec.start + int(rng.integers(0, 14 * 86400))
    out = []
    prev_sym = None
    for ph, (lo, hi) in enumerate(zip(bounds, bounds[1:])):
        vocab = VOCAB_GROUPS[(first_group + ph) % len(VOCAB_GROUPS)]
        organic = ph % 2 == 0
        fixed_action = ACTIONS[rng.integers(0, 3)]
        aw = rng.dirichlet(np.ones(3))
        for j, i in enumerate(range(lo, hi)):
            if j % session == 0:
                choices = [s for s in vocab if s != prev_sym]
                sym = choices[rng.integers(0, len(choices))]
                prev_sym = sym
                reps = int(rng.integers(1, 4))
            action = ACTIONS[rng.choice(3, p=aw)] if organic else fixed_action
            out.append((t, action, sym * reps))
            if (j + 1) % session == 0:
                t += _loguniform(rng, 2 * 3600, 3 * 86400)
            else:
                t += int(rng.integers(61, 900))
    return out


def _campaign_script(rng, n_events):
    """Shared session script for a coordinated group."""
    prefs = _random_prefs(rng)
    aw = rng.dirichlet(np.ones(3) * 0.7)
    script = []
    while len(script) < n_events:
        size = int(rng.integers(2, 7))
        sess = [(ACTIONS[rng.choice(3, p=aw)], _random_word(rng, prefs)) for _ in range(size)]
        gaps = [int(rng.integers(61, 1800)) for _ in range(size - 1)]
        gaps.append(_loguniform(rng, 2 * 3600, 4 * 86400))
        script.extend(zip(sess, gaps))
    return script[:n_events], prefs


def _coordinated(rng, spec: RegimeSpec, script):
    p = spec.params
    noise = p.get("noise", 0.03)
    script, prefs = script
    t = spec.start + int(rng.integers(0, 3600))
    out = []
    for (action, word), gap in script:
        if rng.random() < noise:
            action = ACTIONS[rng.integers(0, 3)]
            word = _random_word(rng, prefs)
        out.append((t, action, word))
        jitter = int(rng.integers(-gap // 10, gap // 10 + 1)) if gap > 10 else 0
        t += max(1, gap + jitter)
    return out


def generate(spec: RegimeSpec) -> list[AccountTimeline]:
    """Deterministic accounts for ``spec``; ids are ``{prefix}{regime}-{i:04d}``."""
    base = [spec.seed, _REGIME_CODE[spec.regime]]
    script = None
    if spec.regime == "coordinated_group":
        script = _campaign_script(np.random.default_rng(base + [1 << 20]), spec.n_events)
    label = Label(spec.label, spec.task, spec.campaign)
    out = []
    for i in range(spec.n_accounts):
        rng = np.random.default_rng(base + [i])
        if spec.regime == "stable_human":
            rows = _human(rng, spec)
        elif spec.regime == "repetitive_bot":
            rows = _repetitive(rng, spec)
        elif spec.regime == "erratic_bot":
            rows = _erratic(rng, spec)
        else:
            rows = _coordinated(rng, spec, script)
        account_id = f"{spec.id_prefix}{spec.regime}-{i:04d}"
        events = tuple(PostEvent(account_id, int(ts), action, _counts(word))
                       for ts, action, word in rows)
        out.append(AccountTimeline(account_id, events, label))
    return out


def generate_many(specs) -> list[AccountTimeline]:
    out = []
    for spec in specs:
        out.extend(generate(spec))
    return out


def write_dataset(directory, timelines, events_name="events.jsonl", labels_name="labels.csv"):
    """Write an event-lines file and a label file; returns their paths."""
    from pathlib import Path
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    timelines = sorted(timelines, key=lambda t: t.account_id)
    ev_path = directory / events_name
    lab_path = directory / labels_name
    write_events(ev_path, timelines)
    write_labels(lab_path, {t.account_id: t.label for t in timelines if t.label})
    return ev_path, lab_path


def automation_benchmark(n_per_regime: int = 200, n_events: int = 120, seed: int = 0):
    """stable_human (negative) vs repetitive_bot + erratic_bot (positive)."""
    return generate_many([
        RegimeSpec("stable_human", n_per_regime, n_events, seed),
        RegimeSpec("repetitive_bot", n_per_regime, n_events, seed),
        RegimeSpec("erratic_bot", n_per_regime, n_events, seed),
    ])


def coordination_benchmark(n_campaigns: int = 3, n_per_class: int = 10,
                           n_events: int = 120, seed: int = 0):
    """Campaigns of coordinated_group accounts against stable_human controls."""
    out = []
    for c in range(n_campaigns):
        name = f"campaign{c + 1}"
        start = DEFAULT_START + c * 400 * 86400
        out.extend(generate(RegimeSpec("coordinated_group", n_per_class, n_events, seed + c,
                                       task="coordination", campaign=name,
                                       id_prefix=f"{name}-", start=start)))
        out.extend(generate(RegimeSpec("stable_human", n_per_class, n_events, seed + c,
                                       task="coordination", campaign=name,
                                       id_prefix=f"{name}-", start=start,
                                       params={"pause_weights": CONTROL_PAUSE_WEIGHTS})))
    return out
