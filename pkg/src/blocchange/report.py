"""Run reports, class-mean histograms and results tables."""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .classify import EvalReport
from .features import ChangeFeatures
from .segment import ChangeSetting

RESULTS_COLUMNS = ("dataset", "campaign", "segmentation", "selection", "distance",
                   "best_k", "precision", "recall", "f1", "accounts_in", "excluded", "best")
PER_K_COLUMNS = ("dataset", "campaign", "segmentation", "selection", "distance",
                 "k", "precision", "recall", "f1")
AVERAGE = "Average"
BEST_MARK = "*"


class ClassHistogramError(ValueError):
    pass


def class_histograms(features: Iterable[ChangeFeatures]) -> dict[str, dict[str, list[float]]]:
    """Mean action and content histogram per class label."""
    groups: dict[str, list[ChangeFeatures]] = {}
    for f in features:
        groups.setdefault(f.label, []).append(f)
    for label in ("negative", "positive"):
        if not groups.get(label):
            raise ClassHistogramError(f"class {label!r} has no accounts")
    out = {}
    for label in sorted(groups):
        members = groups[label]
        out[label] = {
            "action": np.mean([m.action_hist for m in members], axis=0).tolist(),
            "content": np.mean([m.content_hist for m in members], axis=0).tolist(),
        }
    return out


def write_class_histograms(path, hists: dict) -> None:
    bins = len(next(iter(hists.values()))["action"])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "view"] + [f"b{i}" for i in range(bins)])
        for label in sorted(hists):
            for view in ("action", "content"):
                w.writerow([label, view] + [repr(float(v)) for v in hists[label][view]])


@dataclass
class RunReport:
    dataset: str
    setting: ChangeSetting
    task: str
    accounts_loaded: int
    accounts_in: int
    excluded: dict[str, int] = field(default_factory=dict)
    evaluation: Optional[EvalReport] = None
    error: Optional[str] = None
    campaign: Optional[str] = None
    codec: dict = field(default_factory=dict)
    seed: Optional[int] = None
    options: dict = field(default_factory=dict)
    class_histograms: dict = field(default_factory=dict)
    degenerate_pairs: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def n_excluded(self) -> int:
        return sum(self.excluded.values())

    def to_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "campaign": self.campaign,
            "task": self.task,
            "setting": self.setting.to_dict(),
            "accounts_loaded": self.accounts_loaded,
            "accounts_in": self.accounts_in,
            "excluded": dict(sorted(self.excluded.items())),
            "evaluation": self.evaluation.to_dict() if self.evaluation else None,
            "error": self.error,
            "codec": self.codec,
            "seed": self.seed,
            "options": self.options,
            "class_histograms": self.class_histograms,
            "degenerate_pairs": self.degenerate_pairs,
            "warnings": self.warnings,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "RunReport":
        ev = d.get("evaluation")
        return cls(
            dataset=d["dataset"], campaign=d.get("campaign"), task=d["task"],
            setting=ChangeSetting.from_dict(d["setting"]),
            accounts_loaded=d["accounts_loaded"], accounts_in=d["accounts_in"],
            excluded=dict(d.get("excluded", {})),
            evaluation=EvalReport.from_dict(ev) if ev else None,
            error=d.get("error"), codec=d.get("codec", {}), seed=d.get("seed"),
            options=d.get("options", {}), class_histograms=d.get("class_histograms", {}),
            degenerate_pairs=d.get("degenerate_pairs", 0), warnings=list(d.get("warnings", [])),
        )


def dumps_reports(reports: Sequence[RunReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"


def loads_reports(text: str) -> list[RunReport]:
    return [RunReport.from_dict(d) for d in json.loads(text)]


def _row(r: RunReport, campaign: str) -> dict:
    s = r.setting
    row = {
        "dataset": r.dataset, "campaign": campaign,
        "segmentation": s.segmentation_label, "selection": s.selection, "distance": s.distance,
        "accounts_in": r.accounts_in, "excluded": r.n_excluded, "best": "",
    }
    if r.evaluation and r.evaluation.per_k:
        b = r.evaluation.best
        row.update(best_k=b.k, precision=b.precision, recall=b.recall, f1=b.f1)
    else:
        row.update(best_k="", precision="", recall="", f1="")
    return row


def results_table(reports: Sequence[RunReport]) -> list[dict]:
    """One row per (dataset, campaign, setting) with best-K scores.

    Reports that carry a campaign also produce an ``Average`` row per
    (dataset, setting).  Within each (dataset, campaign, segmentation) group
    the highest F1 is marked with ``*`` (first such row on ties).
    """
    if not reports:
        raise ValueError("no reports")
    rows = [_row(r, r.campaign or "") for r in reports]

    averages: dict[tuple, list[RunReport]] = {}
    for r in reports:
        if r.campaign:
            key = (r.dataset, r.setting.segmentation_label, r.setting.selection, r.setting.distance)
            averages.setdefault(key, []).append(r)
    for (dataset, seg, sel, dist), members in averages.items():
        scored = [m.evaluation.best for m in members if m.evaluation and m.evaluation.per_k]
        row = {"dataset": dataset, "campaign": AVERAGE, "segmentation": seg, "selection": sel,
               "distance": dist, "best_k": "",
               "accounts_in": sum(m.accounts_in for m in members),
               "excluded": sum(m.n_excluded for m in members), "best": ""}
        if scored:
            row.update(precision=float(np.mean([b.precision for b in scored])),
                       recall=float(np.mean([b.recall for b in scored])),
                       f1=float(np.mean([b.f1 for b in scored])))
        else:
            row.update(precision="", recall="", f1="")
        rows.append(row)

    best: dict[tuple, dict] = {}
    for row in rows:
        if row["f1"] == "":
            continue
        key = (row["dataset"], row["campaign"], row["segmentation"])
        if key not in best or row["f1"] > best[key]["f1"]:
            best[key] = row
    for row in best.values():
        row["best"] = BEST_MARK
    return rows


def per_k_table(reports: Sequence[RunReport]) -> list[dict]:
    rows = []
    for r in reports:
        if not r.evaluation:
            continue
        s = r.setting
        for kr in r.evaluation.per_k:
            rows.append({"dataset": r.dataset, "campaign": r.campaign or "",
                         "segmentation": s.segmentation_label, "selection": s.selection,
                         "distance": s.distance, "k": kr.k, "precision": kr.precision,
                         "recall": kr.recall, "f1": kr.f1})
    return rows


def _cell(v):
    return repr(v) if isinstance(v, float) else v


def format_table(rows: Sequence[dict], columns: Sequence[str] = RESULTS_COLUMNS) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def exclusion_tally(reasons: Iterable[str]) -> dict[str, int]:
    return dict(sorted(Counter(reasons).items()))
