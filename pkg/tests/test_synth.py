import filecmp

import numpy as np
import pytest

from blocchange.bloc import encode
from blocchange.features import ChangeFeatures, account_features
from blocchange.ingest import Rejection, apply_eligibility, load_events, load_labels
from blocchange.segment import ChangeSetting
from blocchange.synth import (REGIMES, RegimeSpec, SynthConfigError, coordination_benchmark,
                              generate, write_dataset)

ADJ_COS = ChangeSetting("sets_of_k", "adjacent", "cosine")


def mass(timelines, view, lo, hi):
    hists = []
    for t in timelines:
        f = account_features(encode(t), ADJ_COS)
        assert isinstance(f, ChangeFeatures)
        hists.append(f.action_hist if view == "action" else f.content_hist)
    return float(np.mean(hists, axis=0)[lo:hi + 1].sum())


def test_same_seed_same_bytes(tmp_path):
    specs = [RegimeSpec(r, 5, 40, seed=7) for r in REGIMES]
    for d in ("a", "b"):
        write_dataset(tmp_path / d, [t for s in specs for t in generate(s)])
    for name in ("events.jsonl", "labels.csv"):
        assert filecmp.cmp(tmp_path / "a" / name, tmp_path / "b" / name, shallow=False)


def test_different_seed_differs():
    a = generate(RegimeSpec("stable_human", 1, 40, seed=1))[0]
    b = generate(RegimeSpec("stable_human", 1, 40, seed=2))[0]
    assert a.events != b.events


@pytest.mark.parametrize("regime", REGIMES)
def test_accounts_pass_eligibility(regime):
    for t in generate(RegimeSpec(regime, 10, 60, seed=3)):
        assert not isinstance(apply_eligibility(t), Rejection)
        ts = [e.timestamp for e in t.events]
        assert ts == sorted(ts)


def test_dataset_roundtrip(tmp_path):
    tls = coordination_benchmark(2, 3, 30, seed=1)
    ev, lab = write_dataset(tmp_path, tls)
    loaded, report = load_events(ev, labels=load_labels(lab))
    assert report.errors == [] and len(loaded) == 12
    one = loaded["campaign2-coordinated_group-0001"]
    assert one.label.value == "positive" and one.label.campaign == "campaign2"
    assert one.label.task == "coordination"


def test_default_labels():
    assert generate(RegimeSpec("stable_human", 1))[0].label.value == "negative"
    assert generate(RegimeSpec("erratic_bot", 1))[0].label.value == "positive"


def test_repetitive_mass_low():
    assert mass(generate(RegimeSpec("repetitive_bot", 30, seed=5)), "action", 0, 2) >= 0.9


def test_erratic_mass_high():
    assert mass(generate(RegimeSpec("erratic_bot", 30, seed=5)), "content", 7, 9) >= 0.5


def test_human_content_not_erratic():
    assert mass(generate(RegimeSpec("stable_human", 30, seed=5)), "content", 7, 9) < 0.2


def test_coordinated_accounts_resemble_each_other():
    def vectors(regime):
        out = []
        for t in generate(RegimeSpec(regime, 20, seed=2)):
            out.append(account_features(encode(t), ChangeSetting("pauses", "adjacent", "compression")).vector)
        return np.array(out)

    def mean_pairwise(V):
        U = V / np.linalg.norm(V, axis=1, keepdims=True)
        d = [1 - U[i] @ U[j] for i in range(len(U)) for j in range(i + 1, len(U))]
        return float(np.mean(d))

    assert mean_pairwise(vectors("coordinated_group")) < mean_pairwise(vectors("stable_human"))


@pytest.mark.parametrize("kwargs", [
    {"regime": "sleepy_bot", "n_accounts": 1},
    {"regime": "stable_human", "n_accounts": -1},
    {"regime": "stable_human", "n_accounts": 1, "n_events": 5},
    {"regime": "stable_human", "n_accounts": 1, "label": "maybe"},
])
def test_bad_specs(kwargs):
    with pytest.raises(SynthConfigError):
        RegimeSpec(**kwargs)


def test_bad_switch_count():
    with pytest.raises(SynthConfigError):
        generate(RegimeSpec("erratic_bot", 1, 20, params={"switches": 50}))
