import math
import random

import pytest
from hypothesis import given, strategies as st

from blocchange.bloc import encode
from blocchange.segment import (ChangeSetting, InsufficientSegmentsError, Segment, iso_week,
                                segment, segment_by_pauses, segment_by_sets_of_k,
                                segment_by_weeks, select_pairs)

import oracles
from conftest import T0, make_timeline

HOUR = 3600


def n_actions(s):
    return sum(ch in "Trp" for ch in s)


def doc_from_gaps(gaps, actions="post"):
    steps = [(g, actions if isinstance(actions, str) else actions[i]) for i, g in enumerate(gaps)]
    return encode(make_timeline(steps))


def test_one_long_gap_gives_two_segments():
    doc = doc_from_gaps([0, 60, 60, 2 * HOUR, 60, 60])
    segs = segment_by_pauses(doc, HOUR)
    assert len(segs) == 2
    assert [s.n_events for s in segs] == [3, 3]


def test_short_gaps_one_session():
    doc = doc_from_gaps([0] + [120] * 9)
    segs = segment_by_pauses(doc, HOUR)
    assert len(segs) == 1 and segs[0].action_symbols == "T" + ".T" * 9


def test_alternating_long_gaps():
    doc = doc_from_gaps([0] + [2 * HOUR] * 7)
    assert [s.action_symbols for s in segment_by_pauses(doc, HOUR)] == ["T"] * 8


def test_boundary_pause_dropped_inner_kept():
    doc = doc_from_gaps([0, 120, 2 * HOUR, 120], ["reply", "post", "reshare", "post"])
    assert doc.action_string == "p.Tdr.T"
    segs = segment_by_pauses(doc, HOUR)
    assert [s.action_symbols for s in segs] == ["p.T", "r.T"]


def test_weeks_one_tuesday():
    tuesday = T0 + 4 * 86400  # 2021-01-05
    doc = encode(make_timeline([(0, "post")] + [(600, "post")] * 4, start=tuesday))
    assert len(segment_by_weeks(doc)) == 1


def test_weeks_sunday_then_monday():
    sunday = 1_609_675_200  # 2021-01-03T12:00:00Z
    assert oracles.iso_week(sunday) == (2020, 53)
    assert oracles.iso_week(sunday + 86400) == (2021, 1)
    doc = encode(make_timeline([(0, "post"), (86400, "reply")], start=sunday))
    segs = segment_by_weeks(doc)
    assert [s.action_symbols for s in segs] == ["T", "p"]


def test_weeks_idle_weeks_skipped():
    doc = doc_from_gaps([0, 60, 21 * 86400, 60, 21 * 86400])
    assert len(segment_by_weeks(doc)) == 3


def test_iso_week_matches_oracle():
    rng = random.Random(3)
    for _ in range(2000):
        ts = rng.randint(1, 2_000_000_000)
        assert iso_week(ts) == oracles.iso_week(ts)


def test_sets_of_k_remainder_kept():
    doc = doc_from_gaps([0] + [30] * 9)
    assert [s.n_events for s in segment_by_sets_of_k(doc, 4)] == [4, 4, 2]


def test_sets_of_k_exact():
    doc = doc_from_gaps([0, 30, 30, 30])
    assert len(segment_by_sets_of_k(doc, 4)) == 1


def test_sets_of_k_ignores_pauses():
    # T Δh T Δd T T Δm T T Δh T T  -> boundaries after every 4th action
    gaps = [0, 600, 5 * HOUR, 30, 3 * 86400, 30, 600, 30]
    doc = doc_from_gaps(gaps)
    assert doc.action_string == "T.TdTTDTT.TT"
    segs = segment_by_sets_of_k(doc, 4)
    assert [s.action_symbols for s in segs] == ["T.TdTT", "TT.TT"]


def test_sets_of_k_counting_pauses():
    doc = doc_from_gaps([0, 600, 5 * HOUR, 30, 3 * 86400, 30, 600, 30])
    segs = segment_by_sets_of_k(doc, 4, count_pauses=True)
    assert [s.action_symbols for s in segs] == ["T.Td", "TTDT", "T.TT"]
    assert sum(s.n_events for s in segs) == 8


def test_invalid_k():
    with pytest.raises(ValueError):
        ChangeSetting("sets_of_k", k=1)


def _segs(n):
    return [Segment(i, "T" * (i + 1), "t", T0 + i, T0 + i, i + 1) for i in range(n)]


def test_adjacent_pairs():
    s = _segs(4)
    pairs = select_pairs(s, "adjacent")
    assert [(p.left.action_symbols, p.right.action_symbols) for p in pairs] == [
        ("T", "TT"), ("TT", "TTT"), ("TTT", "TTTT")]


def test_cumulative_pairs():
    s = _segs(4)
    pairs = select_pairs(s, "cumulative")
    assert [(p.left.action_symbols, p.right.action_symbols) for p in pairs] == [
        ("T", "TT"), ("TTT", "TTT"), ("TTTTTT", "TTTT")]
    assert [p.left_indices for p in pairs] == [(0,), (0, 1), (0, 1, 2)]
    for p in pairs:
        assert max(p.left_indices) < p.right.index


def test_two_segments_same_either_way():
    s = _segs(2)
    assert select_pairs(s, "adjacent") == select_pairs(s, "cumulative")


def test_insufficient_segments():
    with pytest.raises(InsufficientSegmentsError):
        select_pairs(_segs(1), "adjacent")


def test_degenerate_thresholds_give_one_segment():
    doc = doc_from_gaps([0, 5 * 86400, 60, 40 * 86400])
    assert len(segment_by_pauses(doc, math.inf)) == 1
    assert len(segment_by_sets_of_k(doc, 10)) == 1


gaps = st.lists(st.one_of(st.integers(0, 7200), st.integers(0, 40 * 86400)), min_size=1, max_size=80)
acts = st.sampled_from(["post", "reshare", "reply"])


@given(gaps, st.data(), st.integers(2, 9), st.sampled_from(["pauses", "weeks", "sets_of_k"]),
       st.sampled_from(["adjacent", "cumulative"]))
def test_conservation_and_pair_count(g, data, k, method, selection):
    actions = [data.draw(acts) for _ in g]
    doc = doc_from_gaps(g, actions)
    setting = ChangeSetting(method, selection, "cosine", k=k)
    segs = segment(doc, setting)
    assert sum(n_actions(s.action_symbols) for s in segs) == len(doc)
    assert all(n_actions(s.action_symbols) == s.n_events for s in segs)
    assert all(s.start_time <= s.end_time for s in segs)
    expected = oracles.resegment(doc.actions, doc.pauses, doc.timestamps, doc.content_words,
                                 method, k=k)
    assert [(s.action_symbols, s.content_symbols) for s in segs] == expected
    if len(segs) >= 2:
        pairs = select_pairs(segs, selection)
        assert len(pairs) == len(segs) - 1
        if selection == "cumulative":
            for i, p in enumerate(pairs):
                prefix = segs[0].action_symbols + "".join(q.right.action_symbols for q in pairs[:i])
                assert p.left.action_symbols == prefix
