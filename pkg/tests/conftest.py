import pytest

from blocchange.ingest import AccountTimeline, ContentCounts, PostEvent

T0 = 1_609_459_200  # 2021-01-01T00:00:00Z, a Friday


def make_timeline(steps, account_id="acct", start=T0, label=None):
    """``steps`` is a list of (gap_before_seconds, action[, ContentCounts])."""
    events = []
    t = start
    for i, step in enumerate(steps):
        gap, action = step[0], step[1]
        content = step[2] if len(step) > 2 else ContentCounts(text_terms=1)
        if i:
            t += gap
        events.append(PostEvent(account_id, t, action, content))
    return AccountTimeline(account_id, tuple(events), label)


@pytest.fixture
def timeline_factory():
    return make_timeline


_CRITERIA: dict[int, tuple] = {}


def record_criterion(number, ok, detail):
    """ok is True, False, or None for a skipped criterion."""
    _CRITERIA[number] = (ok, detail)
    status = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
    print(f"criterion {number}: {status} - {detail}")


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        ok, detail = _CRITERIA[number]
        status = {True: "PASS", False: "FAIL", None: "SKIP"}[ok]
        terminalreporter.write_line(f"criterion {number}: {status} - {detail}")
